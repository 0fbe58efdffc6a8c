// Small end-to-end tour: synthetic sign-parity data, one partition per
// coordinate, an accelerated fit, and a look at which partitions survived.
#include <iostream>

#include "partwise/partwise.hpp"

int main() {
  using namespace partwise;

  const Dataset train = generate_xor(400, 6, 7);
  const Dataset test = generate_xor(400, 6, 8);

  PipelineConfig cfg;
  cfg.scheme = PartitionScheme::fixed_threshold;
  cfg.fixed_threshold = 0.0;
  for (int d = 1; d < train.dims(); ++d) cfg.fixed_features.push_back(d);
  cfg.train.loss = LossKind::logistic;
  cfg.train.lambda0 = 0.01;
  cfg.train.lambdaP = 0.001;
  cfg.train.max_iterations = 1000;

  auto [model, report] = fit_pipeline(train, cfg);

  std::cout << "stopped after " << report.iterations << " iterations ("
            << to_string(report.reason) << ")\n";
  std::cout << "train error " << error_rate(model, train) << ", test error "
            << error_rate(model, test) << "\n";

  std::cout << "local columns kept: " << report.active_local_columns << " of "
            << model.partitions.local_count() << "\n";
  for (int p = 1; p < model.partitions.size(); ++p) {
    if (model.weights.col(p).isZero(0.0)) continue;
    const PartitionSpec& s = model.partitions[p];
    std::cout << "  x" << s.feature << " > " << s.threshold << " : largest weight on x";
    Eigen::Index d = 0;
    model.weights.col(p).cwiseAbs().maxCoeff(&d);
    std::cout << d << " = " << model.weights(d, p) << "\n";
  }

  const double bound = generalization_bound(
      report.final_objective / static_cast<double>(train.n()), static_cast<int>(train.n()),
      model.partitions.local_count(), static_cast<int>(train.dims()), 1.0, 0.05);
  std::cout << "loss bound at 95% confidence: " << bound << "\n";
  return 0;
}
