#pragma once

#include "fluxbench/ml/decision_tree.hpp"

namespace fluxbench {

/// Bagged variance-reduction trees. Members train independently on bootstrap
/// resamples with per-split feature subsets; the forest prediction is the
/// plain mean of the member predictions in member order.
class RandomForestRegressor final : public Regressor {
 public:
  struct Params {
    std::size_t n_estimators = 100;
    std::size_t max_depth = 12;
    std::size_t min_samples_split = 2;
    bool bootstrap = true;
    double sample_fraction = 1.0;   // bootstrap sample size as a fraction
    double feature_fraction = 1.0;  // features considered per split
    std::uint64_t seed = 0;

    void validate() const;
    static Params from_set(const ParamSet& set);
    ParamSet to_set() const;
  };

  explicit RandomForestRegressor(const Params& params) : params_(params) {}

  std::string kind() const override { return "random_forest"; }
  bool needs_scaling() const override { return false; }
  void fit(const Matrix& x, const std::vector<double>& y) override;
  double predict_row(std::span<const double> row) const override;
  std::string serialize() const override;
  static std::unique_ptr<RandomForestRegressor> deserialize_payload(
      const std::string& json_text);

  /// Member prediction (base + tree output) for one row.
  double member_predict(std::size_t member, std::span<const double> row) const;
  std::size_t n_members() const { return trees_.size(); }

 private:
  Params params_;
  std::vector<RegressionTree> trees_;
  std::vector<double> bases_;  // per-member training means
};

}  // namespace fluxbench
