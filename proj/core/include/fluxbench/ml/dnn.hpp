#pragma once

#include "fluxbench/ml/regressor.hpp"

namespace fluxbench {

/// Small dense network: ReLU hidden layers, linear scalar output, trained on
/// mean-squared error by mini-batch back-propagation (SGD or Adam). Analytic
/// gradients are exposed so they can be checked against finite differences.
class DnnRegressor final : public Regressor {
 public:
  enum class Optimizer { Sgd, Adam };

  struct Params {
    std::vector<std::size_t> hidden = {64, 64};
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;

    void validate() const;
    static Params from_set(const ParamSet& set);
    ParamSet to_set() const;
  };

  explicit DnnRegressor(const Params& params) : params_(params) {}

  std::string kind() const override { return "dnn"; }
  bool needs_scaling() const override { return true; }
  void fit(const Matrix& x, const std::vector<double>& y) override;
  double predict_row(std::span<const double> row) const override;
  std::string serialize() const override;
  static std::unique_ptr<DnnRegressor> deserialize_payload(
      const std::string& json_text);

  /// Initializes weights for the given input width without training.
  void initialize(std::size_t input_width);
  void set_parameters(const std::vector<double>& flat);
  std::vector<double> parameters() const;
  /// Mean-squared-error loss over a batch.
  double loss(const Matrix& x, const std::vector<double>& y) const;
  /// Analytic gradient of the batch MSE with respect to the flat parameters.
  std::vector<double> gradients(const Matrix& x,
                                const std::vector<double>& y) const;

 private:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
  };

  double forward(std::span<const double> row,
                 std::vector<std::vector<double>>* activations) const;
  void accumulate_gradient(std::span<const double> row, double target,
                           double inv_batch,
                           std::vector<Layer>& grad) const;

  Params params_;
  std::vector<Layer> layers_;
};

}  // namespace fluxbench
