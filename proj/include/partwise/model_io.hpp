#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "partwise/core.hpp"
#include "partwise/model.hpp"

namespace partwise {

using json = nlohmann::ordered_json;

inline const char* to_string(Task t) {
  return t == Task::classification ? "classification" : "regression";
}
inline const char* to_string(Direction d) {
  return d == Direction::greater ? "greater" : "less_or_equal";
}

inline Task task_from_string(const std::string& s) {
  if (s == "classification") return Task::classification;
  if (s == "regression") return Task::regression;
  throw std::invalid_argument("unknown task '" + s + "'");
}

inline Direction direction_from_string(const std::string& s) {
  if (s == "greater") return Direction::greater;
  if (s == "less_or_equal") return Direction::less_or_equal;
  throw std::invalid_argument("unknown direction '" + s + "'");
}

/// Model files are a single JSON object. Weights are stored column sparse:
/// an object keyed by partition index holding {feature index: value} with
/// exact zeros left out. Doubles survive the round trip unchanged.
inline json model_to_json(const Model& model, json training_meta = json::object()) {
  model.validate();
  json j;
  j["format_version"] = 1;
  j["task"] = to_string(model.task);
  j["input_dims"] = model.input_dims;

  json prep = json::object();
  prep["add_intercept"] = model.preprocessing.add_intercept;
  if (model.preprocessing.feature_scale.size() > 0) {
    prep["feature_scale"] = std::vector<double>(
        model.preprocessing.feature_scale.begin(), model.preprocessing.feature_scale.end());
    prep["feature_offset"] = std::vector<double>(
        model.preprocessing.feature_offset.begin(), model.preprocessing.feature_offset.end());
  }
  if (model.preprocessing.target_standardized) {
    prep["target"] = {{"mean", model.preprocessing.target_mean},
                      {"variance", model.preprocessing.target_variance}};
  }
  j["preprocessing"] = std::move(prep);

  json parts = json::array();
  for (int p = 0; p < model.partitions.size(); ++p) {
    const PartitionSpec& s = model.partitions[p];
    if (s.kind == PartitionKind::global) {
      parts.push_back({{"kind", "global"}});
    } else {
      parts.push_back({{"kind", "threshold"},
                       {"feature", s.feature},
                       {"threshold", s.threshold},
                       {"direction", to_string(s.direction)}});
    }
  }
  j["partitions"] = std::move(parts);

  json weights = json::object();
  for (Eigen::Index p = 0; p < model.weights.cols(); ++p) {
    json column = json::object();
    for (Eigen::Index d = 0; d < model.weights.rows(); ++d) {
      const double v = model.weights(d, p);
      if (v != 0.0) column[std::to_string(d)] = v;
    }
    if (!column.empty()) weights[std::to_string(p)] = std::move(column);
  }
  j["weights"] = std::move(weights);
  j["training_meta"] = std::move(training_meta);
  return j;
}

namespace io_detail {

inline Model model_from_json_checked(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("model file: not a JSON object");
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != 1) {
    throw std::invalid_argument("model file: unsupported format_version");
  }

  Model model;
  model.task = task_from_string(j.at("task").get<std::string>());
  model.input_dims = j.at("input_dims").get<int>();

  const json& prep = j.at("preprocessing");
  model.preprocessing.add_intercept = prep.at("add_intercept").get<bool>();
  if (prep.contains("feature_scale")) {
    const auto scale = prep["feature_scale"].get<std::vector<double>>();
    const auto offset = prep.at("feature_offset").get<std::vector<double>>();
    if (scale.size() != offset.size()) {
      throw std::invalid_argument("model file: feature scale/offset length mismatch");
    }
    model.preprocessing.feature_scale =
        Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    model.preprocessing.feature_offset =
        Eigen::Map<const Vector>(offset.data(), static_cast<Eigen::Index>(offset.size()));
  }
  if (prep.contains("target")) {
    model.preprocessing.target_standardized = true;
    model.preprocessing.target_mean = prep["target"].at("mean").get<double>();
    model.preprocessing.target_variance = prep["target"].at("variance").get<double>();
  }

  model.partitions.specs.clear();
  for (const json& part : j.at("partitions")) {
    const std::string kind = part.at("kind").get<std::string>();
    if (kind == "global") {
      model.partitions.specs.push_back(PartitionSpec::global());
    } else if (kind == "threshold") {
      model.partitions.specs.push_back(PartitionSpec::threshold_rule(
          part.at("feature").get<int>(), part.at("threshold").get<double>(),
          direction_from_string(part.at("direction").get<std::string>())));
    } else {
      throw std::invalid_argument("model file: unknown partition kind '" + kind + "'");
    }
  }

  const int rows = model.input_dims + (model.preprocessing.add_intercept ? 1 : 0);
  model.weights = Matrix::Zero(rows, model.partitions.size());
  for (const auto& [pkey, column] : j.at("weights").items()) {
    const int p = std::stoi(pkey);
    if (p < 0 || p >= model.partitions.size()) {
      throw std::invalid_argument("model file: weight column " + pkey + " out of range");
    }
    for (const auto& [dkey, value] : column.items()) {
      const int d = std::stoi(dkey);
      if (d < 0 || d >= rows) {
        throw std::invalid_argument("model file: weight row " + dkey + " out of range");
      }
      model.weights(d, p) = value.get<double>();
    }
  }

  model.validate();
  return model;
}

}  // namespace io_detail

/// Missing or mistyped fields surface as std::invalid_argument, never as
/// library specific exception types.
inline Model model_from_json(const json& j) {
  try {
    return io_detail::model_from_json_checked(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model file: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(std::string("model file: ") + e.what());
  }
}

inline void save_model(const Model& model, const std::string& path,
                       json training_meta = json::object()) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << model_to_json(model, std::move(training_meta)).dump(2) << '\n';
  if (!out) throw std::invalid_argument("failed writing '" + path + "'");
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("model file '" + path + "': " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument("model file '" + path + "': " + e.what());
  }
}

}  // namespace partwise
