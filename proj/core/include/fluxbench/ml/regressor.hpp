#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fluxbench/ml/matrix.hpp"

namespace fluxbench {

using ParamValue = std::variant<std::int64_t, double, std::string>;
using ParamSet = std::map<std::string, ParamValue>;

std::int64_t param_int(const ParamSet& params, const std::string& name,
                       std::int64_t fallback);
double param_real(const ParamSet& params, const std::string& name,
                  double fallback);
std::string param_string(const ParamSet& params, const std::string& name,
                         const std::string& fallback);
std::string param_set_to_json(const ParamSet& params);
ParamSet param_set_from_json(const std::string& json_text);

/// One tunable dimension of a model's hyperparameter space.
struct ParamDomain {
  enum class Kind { Integer, Real, Categorical };
  std::string name;
  Kind kind = Kind::Real;
  double lo = 0.0;
  double hi = 0.0;
  bool log_scale = false;
  std::vector<std::string> categories;
};

struct HyperparamSpace {
  std::vector<ParamDomain> domains;

  void validate() const;
};

/// Uniform regressor contract: fit on preprocessed features, predict one
/// committer probability per row. Handles are immutable after fit and safe to
/// share across threads for concurrent predict.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual std::string kind() const = 0;
  /// True for families that expect standardized inputs.
  virtual bool needs_scaling() const = 0;

  virtual void fit(const Matrix& x, const std::vector<double>& y) = 0;
  virtual double predict_row(std::span<const double> row) const = 0;
  virtual std::vector<double> predict(const Matrix& x) const;

  /// Versioned JSON serialization of hyperparameters plus fitted state.
  virtual std::string serialize() const = 0;

 protected:
  void check_fit_inputs(const Matrix& x, const std::vector<double>& y) const;
  void check_predict_width(std::size_t width) const;
  std::size_t fitted_cols_ = 0;
  bool fitted_ = false;
};

/// Model families available to the benchmark.
const std::vector<std::string>& regressor_kinds();

std::unique_ptr<Regressor> make_regressor(const std::string& kind,
                                          const ParamSet& params = {});
std::unique_ptr<Regressor> deserialize_regressor(const std::string& json_text);

/// Default search space per family.
HyperparamSpace default_hyperparam_space(const std::string& kind);

}  // namespace fluxbench
