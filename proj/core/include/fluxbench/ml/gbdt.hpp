#pragma once

#include "fluxbench/ml/decision_tree.hpp"

namespace fluxbench {

/// Gradient-boosted regression trees on squared loss. Each stage fits a tree
/// to the current residuals (the negative gradients; hessians are the
/// constant 1), leaf values are L2-shrunk and L1-soft-thresholded, and the
/// prediction is the training-target mean plus eta-scaled stage outputs.
/// `growth` selects splitting every frontier node per depth (level-wise) or
/// repeatedly splitting the single highest-gain leaf (leaf-wise).
class GbdtRegressor final : public Regressor {
 public:
  struct Params {
    std::size_t n_estimators = 100;
    double eta = 0.1;
    std::size_t max_depth = 6;    // level-wise budget
    std::size_t max_leaves = 31;  // leaf-wise budget
    double subsample = 1.0;
    double reg_alpha = 0.0;
    double reg_lambda = 0.0;
    TreeGrowth growth = TreeGrowth::LevelWise;
    std::uint64_t seed = 0;

    void validate() const;
    static Params from_set(const ParamSet& set, TreeGrowth default_growth);
    ParamSet to_set() const;
  };

  explicit GbdtRegressor(const Params& params) : params_(params) {}

  std::string kind() const override {
    return params_.growth == TreeGrowth::LevelWise ? "gbdt_level"
                                                   : "gbdt_leaf";
  }
  bool needs_scaling() const override { return false; }
  void fit(const Matrix& x, const std::vector<double>& y) override;
  double predict_row(std::span<const double> row) const override;
  std::string serialize() const override;
  static std::unique_ptr<GbdtRegressor> deserialize_payload(
      const std::string& json_text);

  double base() const { return base_; }
  const std::vector<RegressionTree>& stages() const { return stages_; }
  /// Prediction truncated to the first `n_stages` trees.
  double predict_row_truncated(std::span<const double> row,
                               std::size_t n_stages) const;

 private:
  Params params_;
  std::vector<RegressionTree> stages_;
  double base_ = 0.0;
};

}  // namespace fluxbench
