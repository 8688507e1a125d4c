#pragma once

#include "fluxbench/ml/regressor.hpp"

namespace fluxbench {

/// k-nearest-neighbor regression over scaled features. Prediction is the
/// exact mean of the k nearest training targets; ties in distance admit the
/// lowest row index.
class KnnRegressor final : public Regressor {
 public:
  enum class Metric { Euclidean, Manhattan, Minkowski };

  struct Params {
    std::size_t k = 5;
    Metric metric = Metric::Euclidean;
    double minkowski_p = 2.0;

    void validate() const;
    static Params from_set(const ParamSet& set);
    ParamSet to_set() const;
  };

  explicit KnnRegressor(const Params& params) : params_(params) {}

  std::string kind() const override { return "knn"; }
  bool needs_scaling() const override { return true; }
  void fit(const Matrix& x, const std::vector<double>& y) override;
  double predict_row(std::span<const double> row) const override;
  std::string serialize() const override;
  static std::unique_ptr<KnnRegressor> deserialize_payload(
      const std::string& json_text);

  double distance(std::span<const double> a, std::span<const double> b) const;

 private:
  Params params_;
  Matrix train_x_;
  std::vector<double> train_y_;
};

}  // namespace fluxbench
