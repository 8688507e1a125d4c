#include "fluxbench/ml/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"

namespace fluxbench {

namespace {

constexpr double kTieEps = 1e-12;

double soft_threshold(double s, double alpha) {
  if (alpha <= 0.0) return s;
  if (s > alpha) return s - alpha;
  if (s < -alpha) return s + alpha;
  return 0.0;
}

double leaf_value(double sum, std::size_t n, const TreeGrowthParams& p) {
  return soft_threshold(sum, p.reg_alpha) /
         (static_cast<double>(n) + p.reg_lambda);
}

std::vector<std::size_t> candidate_features(std::size_t n_features,
                                            double fraction, RngStream* rng) {
  std::vector<std::size_t> all(n_features);
  for (std::size_t i = 0; i < n_features; ++i) all[i] = i;
  if (fraction >= 1.0 || rng == nullptr) return all;
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(fraction * static_cast<double>(n_features))));
  // Partial Fisher-Yates, then ascending order for a deterministic scan.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng->below(n_features - i));
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

void TreeGrowthParams::validate() const {
  if (max_depth < 1) throw ConfigError("tree: max_depth must be >= 1");
  if (min_samples_split < 2) {
    throw ConfigError("tree: min_samples_split must be >= 2");
  }
  if (reg_lambda < 0.0 || reg_alpha < 0.0) {
    throw ConfigError("tree: regularization must be >= 0");
  }
  if (max_leaves < 2) throw ConfigError("tree: max_leaves must be >= 2");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) {
    throw ConfigError("tree: feature_fraction must be in (0, 1]");
  }
}

std::optional<SplitResult> tree_best_split(
    const Matrix& x, const std::vector<double>& targets,
    const std::vector<std::size_t>& rows,
    const std::vector<std::size_t>& features, double reg_lambda) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;

  double total = 0.0;
  double total_sq = 0.0;
  for (std::size_t r : rows) {
    total += targets[r];
    total_sq += targets[r] * targets[r];
  }
  const double nd = static_cast<double>(n);
  const double parent_score = total * total / (nd + reg_lambda);
  const double sse = total_sq - total * total / nd;
  const double tol = kTieEps * std::max(sse, 0.0);

  std::optional<SplitResult> best;
  double best_gain = 0.0;

  std::vector<std::pair<double, std::size_t>> sorted(n);
  for (std::size_t f : features) {
    for (std::size_t i = 0; i < n; ++i) {
      sorted[i] = {x.at(rows[i], f), rows[i]};
    }
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front().first == sorted.back().first) continue;

    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += targets[sorted[i].second];
      const double lo = sorted[i].first;
      const double hi = sorted[i + 1].first;
      if (lo == hi) continue;
      const double n_left = static_cast<double>(i + 1);
      const double n_right = nd - n_left;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / (n_left + reg_lambda) +
                          right_sum * right_sum / (n_right + reg_lambda) -
                          parent_score;
      if (gain > best_gain + tol) {
        best_gain = gain;
        best = SplitResult{f, 0.5 * (lo + hi), gain, gain / nd};
      }
    }
  }
  return best;
}

namespace {

struct BuildNode {
  int id = -1;
  std::vector<std::size_t> rows;
  std::size_t depth = 0;
  std::optional<SplitResult> split;  // cached for leaf-wise growth
};

}  // namespace

void RegressionTree::fit(const Matrix& x, const std::vector<double>& targets,
                         const std::vector<std::size_t>& rows,
                         const TreeGrowthParams& params, RngStream* rng) {
  params.validate();
  if (rows.empty()) throw RuntimeError("tree: empty row set");
  nodes_.clear();

  const auto make_leaf_value = [&](const std::vector<std::size_t>& rs) {
    double sum = 0.0;
    for (std::size_t r : rs) sum += targets[r];
    return leaf_value(sum, rs.size(), params);
  };
  const auto find_split = [&](const std::vector<std::size_t>& rs,
                              std::size_t depth) -> std::optional<SplitResult> {
    if (depth >= params.max_depth || rs.size() < params.min_samples_split) {
      return std::nullopt;
    }
    const auto features = candidate_features(x.cols, params.feature_fraction, rng);
    return tree_best_split(x, targets, rs, features, params.reg_lambda);
  };
  const auto partition = [&](const BuildNode& node) {
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
    for (std::size_t r : node.rows) {
      if (x.at(r, node.split->feature) <= node.split->threshold) {
        out.first.push_back(r);
      } else {
        out.second.push_back(r);
      }
    }
    return out;
  };

  nodes_.push_back(TreeNode{});
  BuildNode root{0, rows, 0, std::nullopt};

  if (params.growth == TreeGrowth::LevelWise) {
    std::deque<BuildNode> frontier;
    root.split = find_split(root.rows, root.depth);
    frontier.push_back(std::move(root));
    while (!frontier.empty()) {
      BuildNode node = std::move(frontier.front());
      frontier.pop_front();
      if (!node.split) {
        nodes_[node.id].value = make_leaf_value(node.rows);
        continue;
      }
      auto [left_rows, right_rows] = partition(node);
      const int left_id = static_cast<int>(nodes_.size());
      const int right_id = left_id + 1;
      nodes_.push_back(TreeNode{});
      nodes_.push_back(TreeNode{});
      nodes_[node.id].feature = static_cast<int>(node.split->feature);
      nodes_[node.id].threshold = node.split->threshold;
      nodes_[node.id].left = left_id;
      nodes_[node.id].right = right_id;
      BuildNode left{left_id, std::move(left_rows), node.depth + 1,
                     std::nullopt};
      BuildNode right{right_id, std::move(right_rows), node.depth + 1,
                      std::nullopt};
      left.split = find_split(left.rows, left.depth);
      right.split = find_split(right.rows, right.depth);
      frontier.push_back(std::move(left));
      frontier.push_back(std::move(right));
    }
    return;
  }

  // Leaf-wise: repeatedly split the open leaf with the largest gain.
  std::vector<BuildNode> open;
  root.split = find_split(root.rows, root.depth);
  open.push_back(std::move(root));
  std::size_t n_leaves = 1;
  while (n_leaves < params.max_leaves) {
    int best_idx = -1;
    double best_gain = 0.0;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (!open[i].split) continue;
      if (best_idx < 0 || open[i].split->gain > best_gain) {
        best_idx = static_cast<int>(i);
        best_gain = open[i].split->gain;
      }
    }
    if (best_idx < 0) break;
    BuildNode node = std::move(open[best_idx]);
    open.erase(open.begin() + best_idx);

    auto [left_rows, right_rows] = partition(node);
    const int left_id = static_cast<int>(nodes_.size());
    const int right_id = left_id + 1;
    nodes_.push_back(TreeNode{});
    nodes_.push_back(TreeNode{});
    nodes_[node.id].feature = static_cast<int>(node.split->feature);
    nodes_[node.id].threshold = node.split->threshold;
    nodes_[node.id].left = left_id;
    nodes_[node.id].right = right_id;
    BuildNode left{left_id, std::move(left_rows), node.depth + 1,
                   std::nullopt};
    BuildNode right{right_id, std::move(right_rows), node.depth + 1,
                    std::nullopt};
    left.split = find_split(left.rows, left.depth);
    right.split = find_split(right.rows, right.depth);
    open.push_back(std::move(left));
    open.push_back(std::move(right));
    ++n_leaves;
  }
  for (BuildNode& node : open) {
    nodes_[node.id].value = make_leaf_value(node.rows);
  }
}

double RegressionTree::eval(std::span<const double> row) const {
  std::size_t idx = 0;
  while (nodes_[idx].feature >= 0) {
    idx = row[static_cast<std::size_t>(nodes_[idx].feature)] <=
                  nodes_[idx].threshold
              ? static_cast<std::size_t>(nodes_[idx].left)
              : static_cast<std::size_t>(nodes_[idx].right);
  }
  return nodes_[idx].value;
}

std::size_t RegressionTree::n_leaves() const {
  std::size_t count = 0;
  for (const TreeNode& n : nodes_) {
    if (n.feature < 0) ++count;
  }
  return count;
}

std::string RegressionTree::nodes_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const TreeNode& n : nodes_) {
    out.push_back({{"feature", n.feature},
                   {"threshold", n.threshold},
                   {"left", n.left},
                   {"right", n.right},
                   {"leaf_value", n.value}});
  }
  return out.dump();
}

RegressionTree RegressionTree::from_nodes_json(const std::string& json_text) {
  RegressionTree tree;
  for (const auto& j : nlohmann::json::parse(json_text)) {
    TreeNode n;
    n.feature = j.at("feature").get<int>();
    n.threshold = j.at("threshold").get<double>();
    n.left = j.at("left").get<int>();
    n.right = j.at("right").get<int>();
    n.value = j.at("leaf_value").get<double>();
    tree.nodes_.push_back(n);
  }
  if (tree.nodes_.empty()) throw RuntimeError("tree: empty serialization");
  return tree;
}

DecisionTreeRegressor::Params DecisionTreeRegressor::Params::from_set(
    const ParamSet& set) {
  Params p;
  p.max_depth = static_cast<std::size_t>(
      param_int(set, "max_depth", static_cast<std::int64_t>(p.max_depth)));
  p.min_samples_split = static_cast<std::size_t>(param_int(
      set, "min_samples_split", static_cast<std::int64_t>(p.min_samples_split)));
  return p;
}

ParamSet DecisionTreeRegressor::Params::to_set() const {
  return {{"max_depth", static_cast<std::int64_t>(max_depth)},
          {"min_samples_split", static_cast<std::int64_t>(min_samples_split)}};
}

void DecisionTreeRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  double sum = 0.0;
  for (double v : y) sum += v;
  base_ = sum / static_cast<double>(y.size());

  std::vector<double> residuals(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) residuals[i] = y[i] - base_;
  std::vector<std::size_t> rows(y.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;

  TreeGrowthParams growth;
  growth.max_depth = params_.max_depth;
  growth.min_samples_split = params_.min_samples_split;
  tree_.fit(x, residuals, rows, growth, nullptr);
  fitted_ = true;
  fitted_cols_ = x.cols;
}

double DecisionTreeRegressor::predict_row(std::span<const double> row) const {
  check_predict_width(row.size());
  return base_ + tree_.eval(row);
}

std::string DecisionTreeRegressor::serialize() const {
  nlohmann::json out = {
      {"format_version", 1},
      {"kind", kind()},
      {"params", nlohmann::json::parse(param_set_to_json(params_.to_set()))},
      {"model",
       {{"base", base_}, {"nodes", nlohmann::json::parse(tree_.nodes_json())}}},
  };
  return out.dump();
}

std::unique_ptr<DecisionTreeRegressor> DecisionTreeRegressor::deserialize_payload(
    const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  auto model = std::make_unique<DecisionTreeRegressor>(
      Params::from_set(param_set_from_json(j.at("params").dump())));
  model->base_ = j.at("model").at("base").get<double>();
  model->tree_ = RegressionTree::from_nodes_json(j.at("model").at("nodes").dump());
  model->fitted_ = true;
  model->fitted_cols_ = 0;  // unknown after deserialization
  return model;
}

}  // namespace fluxbench
