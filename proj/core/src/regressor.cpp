#include "fluxbench/ml/regressor.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"
#include "fluxbench/ml/decision_tree.hpp"
#include "fluxbench/ml/dnn.hpp"
#include "fluxbench/ml/gbdt.hpp"
#include "fluxbench/ml/knn.hpp"
#include "fluxbench/ml/linear_svr.hpp"
#include "fluxbench/ml/random_forest.hpp"

namespace fluxbench {

std::int64_t param_int(const ParamSet& params, const std::string& name,
                       std::int64_t fallback) {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  if (const auto* d = std::get_if<double>(&it->second)) {
    return static_cast<std::int64_t>(std::llround(*d));
  }
  if (const auto* s = std::get_if<std::string>(&it->second)) {
    try {
      return std::stoll(*s);
    } catch (const std::exception&) {
      // fall through to the error below
    }
  }
  throw ConfigError("param '" + name + "' is not numeric");
}

double param_real(const ParamSet& params, const std::string& name,
                  double fallback) {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
    return static_cast<double>(*i);
  }
  throw ConfigError("param '" + name + "' is not numeric");
}

std::string param_string(const ParamSet& params, const std::string& name,
                         const std::string& fallback) {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("param '" + name + "' is not a string");
}

std::string param_set_to_json(const ParamSet& params) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, value] : params) {
    std::visit([&](const auto& v) { out[name] = v; }, value);
  }
  return out.dump();
}

ParamSet param_set_from_json(const std::string& json_text) {
  ParamSet out;
  const auto j = nlohmann::json::parse(json_text);
  for (const auto& [name, value] : j.items()) {
    if (value.is_number_integer()) {
      out[name] = value.get<std::int64_t>();
    } else if (value.is_number_float()) {
      out[name] = value.get<double>();
    } else if (value.is_string()) {
      out[name] = value.get<std::string>();
    } else if (value.is_boolean()) {
      out[name] = static_cast<std::int64_t>(value.get<bool>() ? 1 : 0);
    } else {
      throw ConfigError("param '" + name + "' has an unsupported type");
    }
  }
  return out;
}

void HyperparamSpace::validate() const {
  for (const ParamDomain& d : domains) {
    switch (d.kind) {
      case ParamDomain::Kind::Categorical:
        if (d.categories.empty()) {
          throw ConfigError("space: empty categorical domain '" + d.name + "'");
        }
        break;
      case ParamDomain::Kind::Integer:
      case ParamDomain::Kind::Real:
        if (!(d.lo <= d.hi)) {
          throw ConfigError("space: empty numeric domain '" + d.name + "'");
        }
        if (d.log_scale && !(d.lo > 0.0)) {
          throw ConfigError("space: log domain '" + d.name +
                            "' needs a positive lower bound");
        }
        break;
    }
  }
}

std::vector<double> Regressor::predict(const Matrix& x) const {
  std::vector<double> out(x.rows, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x.row(i));
  return out;
}

void Regressor::check_fit_inputs(const Matrix& x,
                                 const std::vector<double>& y) const {
  if (x.rows == 0 || y.empty()) {
    throw RuntimeError(kind() + ": empty training data");
  }
  if (x.rows != y.size()) {
    throw RuntimeError(kind() + ": feature/target row mismatch");
  }
  if (x.cols == 0) throw RuntimeError(kind() + ": no feature columns");
}

void Regressor::check_predict_width(std::size_t width) const {
  if (!fitted_) throw RuntimeError(kind() + ": predict before fit");
  if (fitted_cols_ != 0 && width != fitted_cols_) {
    throw RuntimeError(kind() + ": feature width " + std::to_string(width) +
                       " does not match fit width " +
                       std::to_string(fitted_cols_));
  }
}

const std::vector<std::string>& regressor_kinds() {
  static const std::vector<std::string> kinds = {
      "linear_svr", "knn",       "decision_tree", "random_forest",
      "gbdt_level", "gbdt_leaf", "dnn",
  };
  return kinds;
}

std::unique_ptr<Regressor> make_regressor(const std::string& kind,
                                          const ParamSet& params) {
  if (kind == "linear_svr") {
    return std::make_unique<LinearSvrRegressor>(
        LinearSvrRegressor::Params::from_set(params));
  }
  if (kind == "knn") {
    return std::make_unique<KnnRegressor>(KnnRegressor::Params::from_set(params));
  }
  if (kind == "decision_tree") {
    return std::make_unique<DecisionTreeRegressor>(
        DecisionTreeRegressor::Params::from_set(params));
  }
  if (kind == "random_forest") {
    return std::make_unique<RandomForestRegressor>(
        RandomForestRegressor::Params::from_set(params));
  }
  if (kind == "gbdt_level") {
    return std::make_unique<GbdtRegressor>(
        GbdtRegressor::Params::from_set(params, TreeGrowth::LevelWise));
  }
  if (kind == "gbdt_leaf") {
    return std::make_unique<GbdtRegressor>(
        GbdtRegressor::Params::from_set(params, TreeGrowth::LeafWise));
  }
  if (kind == "dnn") {
    return std::make_unique<DnnRegressor>(DnnRegressor::Params::from_set(params));
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

std::unique_ptr<Regressor> deserialize_regressor(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (j.value("format_version", 0) != 1) {
    throw RuntimeError("model serialization: unsupported format version");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear_svr") {
    return LinearSvrRegressor::deserialize_payload(json_text);
  }
  if (kind == "knn") return KnnRegressor::deserialize_payload(json_text);
  if (kind == "decision_tree") {
    return DecisionTreeRegressor::deserialize_payload(json_text);
  }
  if (kind == "random_forest") {
    return RandomForestRegressor::deserialize_payload(json_text);
  }
  if (kind == "gbdt_level" || kind == "gbdt_leaf") {
    return GbdtRegressor::deserialize_payload(json_text);
  }
  if (kind == "dnn") return DnnRegressor::deserialize_payload(json_text);
  throw RuntimeError("model serialization: unknown kind '" + kind + "'");
}

HyperparamSpace default_hyperparam_space(const std::string& kind) {
  using Kind = ParamDomain::Kind;
  HyperparamSpace space;
  if (kind == "knn") {
    space.domains = {
        {"k", Kind::Integer, 1, 50, false, {}},
        {"metric", Kind::Categorical, 0, 0, false, {"euclidean", "manhattan"}},
    };
  } else if (kind == "decision_tree") {
    space.domains = {
        {"max_depth", Kind::Integer, 2, 12, false, {}},
    };
  } else if (kind == "random_forest") {
    space.domains = {
        {"max_depth", Kind::Integer, 2, 12, false, {}},
        {"n_estimators", Kind::Integer, 10, 300, false, {}},
    };
  } else if (kind == "gbdt_level" || kind == "gbdt_leaf") {
    space.domains = {
        {"eta", Kind::Real, 0.01, 0.5, true, {}},
        {"reg_lambda", Kind::Real, 0.0, 10.0, false, {}},
    };
  } else if (kind == "linear_svr") {
    space.domains = {
        {"C", Kind::Real, 0.01, 100.0, true, {}},
        {"epsilon", Kind::Real, 0.001, 0.1, false, {}},
    };
  } else if (kind == "dnn") {
    space.domains = {
        {"width", Kind::Categorical, 0, 0, false, {"32", "64", "128"}},
        {"learning_rate", Kind::Real, 1e-4, 1e-2, true, {}},
    };
  } else {
    throw ConfigError("unknown model kind '" + kind + "'");
  }
  return space;
}

}  // namespace fluxbench
