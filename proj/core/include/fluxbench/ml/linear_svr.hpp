#pragma once

#include "fluxbench/ml/regressor.hpp"

namespace fluxbench {

/// Linear support-vector regression: minimizes 0.5 w'w + C * sum of
/// epsilon-insensitive residual penalties, solved by deterministic
/// subgradient descent (fixed epoch count, 1/t step schedule, seeded sample
/// shuffling, tail-averaged iterates). With C = 0 the weights collapse to
/// zero and the bias is set to the training-target mean.
class LinearSvrRegressor final : public Regressor {
 public:
  struct Params {
    double c = 1.0;
    double epsilon = 0.01;
    std::size_t epochs = 400;
    double lr0 = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
    static Params from_set(const ParamSet& set);
    ParamSet to_set() const;
  };

  explicit LinearSvrRegressor(const Params& params) : params_(params) {}

  std::string kind() const override { return "linear_svr"; }
  bool needs_scaling() const override { return true; }
  void fit(const Matrix& x, const std::vector<double>& y) override;
  double predict_row(std::span<const double> row) const override;
  std::string serialize() const override;
  static std::unique_ptr<LinearSvrRegressor> deserialize_payload(
      const std::string& json_text);

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

  /// 0.5 w'w + C * sum_i max(0, |y_i - f(x_i)| - epsilon)
  double objective(const Matrix& x, const std::vector<double>& y) const;

 private:
  Params params_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

}  // namespace fluxbench
