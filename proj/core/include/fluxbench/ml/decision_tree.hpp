#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxbench/ml/regressor.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

enum class TreeGrowth { LevelWise, LeafWise };

/// Controls for the shared tree fitter. The same routine backs the plain
/// tree, forest members and boosting stages, so their collapse identities
/// hold bit for bit.
struct TreeGrowthParams {
  std::size_t max_depth = 6;
  /// Minimum node size eligible for a split; a node with fewer samples
  /// becomes a leaf. Matches an N_min stop threshold of min_samples_split-1.
  std::size_t min_samples_split = 2;
  double reg_lambda = 0.0;  // added to the leaf denominator
  double reg_alpha = 0.0;   // soft-thresholds the leaf numerator
  TreeGrowth growth = TreeGrowth::LevelWise;
  std::size_t max_leaves = 31;     // leaf-wise budget
  double feature_fraction = 1.0;   // features considered per split
  void validate() const;
};

struct SplitResult {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;       // score improvement, S^2/(n+lambda) units
  double reduction = 0.0;  // weighted variance reduction (gain / n)
};

/// Exhaustive scan over midpoints of sorted distinct feature values.
/// Returns nullopt when no split improves the score (pure node or constant
/// features). Ties resolve to the lowest feature index, then the lowest
/// threshold; gains closer than a relative epsilon count as ties.
std::optional<SplitResult> tree_best_split(
    const Matrix& x, const std::vector<double>& targets,
    const std::vector<std::size_t>& rows,
    const std::vector<std::size_t>& features, double reg_lambda);

class RegressionTree {
 public:
  /// Fits targets over the given row subset. `rng` drives the per-split
  /// feature subsampling and may be null when feature_fraction == 1.
  void fit(const Matrix& x, const std::vector<double>& targets,
           const std::vector<std::size_t>& rows, const TreeGrowthParams& params,
           RngStream* rng = nullptr);

  double eval(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t n_leaves() const;

  std::string nodes_json() const;
  static RegressionTree from_nodes_json(const std::string& json_text);

 private:
  std::vector<TreeNode> nodes_;
};

/// Plain variance-reduction regression tree. Fits leaf values as offsets
/// from the training-target mean, which makes a single unshrunk boosting
/// stage reproduce it exactly.
class DecisionTreeRegressor final : public Regressor {
 public:
  struct Params {
    std::size_t max_depth = 12;
    std::size_t min_samples_split = 2;
    static Params from_set(const ParamSet& set);
    ParamSet to_set() const;
  };

  DecisionTreeRegressor() = default;
  explicit DecisionTreeRegressor(const Params& params) : params_(params) {}

  std::string kind() const override { return "decision_tree"; }
  bool needs_scaling() const override { return false; }
  void fit(const Matrix& x, const std::vector<double>& y) override;
  double predict_row(std::span<const double> row) const override;
  std::string serialize() const override;
  static std::unique_ptr<DecisionTreeRegressor> deserialize_payload(
      const std::string& json_text);

  const RegressionTree& tree() const { return tree_; }
  double base() const { return base_; }

 private:
  Params params_;
  RegressionTree tree_;
  double base_ = 0.0;
};

}  // namespace fluxbench
