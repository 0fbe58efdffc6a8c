#pragma once

#include "partwise/cli.hpp"
#include "partwise/core.hpp"
#include "partwise/csv.hpp"
#include "partwise/eval.hpp"
#include "partwise/loss.hpp"
#include "partwise/model.hpp"
#include "partwise/model_io.hpp"
#include "partwise/optimizer.hpp"
#include "partwise/partitions.hpp"
#include "partwise/pipeline.hpp"
#include "partwise/prox.hpp"
