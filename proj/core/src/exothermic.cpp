#include "fluxbench/process/exothermic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fluxbench/errors.hpp"

namespace fluxbench {

namespace {

using FieldMap = std::map<std::string, double ExothermicParams::*>;

const FieldMap& field_map() {
  static const FieldMap m = {
      {"A", &ExothermicParams::A},
      {"C_Af", &ExothermicParams::C_Af},
      {"c_p", &ExothermicParams::c_p},
      {"c_pw", &ExothermicParams::c_pw},
      {"E", &ExothermicParams::E},
      {"F_C0", &ExothermicParams::F_C0},
      {"k0", &ExothermicParams::k0},
      {"R", &ExothermicParams::R},
      {"T_C0", &ExothermicParams::T_C0},
      {"T_f", &ExothermicParams::T_f},
      {"T_SP", &ExothermicParams::T_SP},
      {"U", &ExothermicParams::U},
      {"V_reactor", &ExothermicParams::V_reactor},
      {"V_j", &ExothermicParams::V_j},
      {"dH", &ExothermicParams::dH},
      {"rho", &ExothermicParams::rho},
      {"rho_w", &ExothermicParams::rho_w},
      {"K_C", &ExothermicParams::K_C},
      {"tau_I", &ExothermicParams::tau_I},
      {"tau", &ExothermicParams::tau},
      {"C_A0", &ExothermicParams::C_A0},
      {"T_0", &ExothermicParams::T_0},
  };
  return m;
}

}  // namespace

void ExothermicParams::validate() const {
  if (dH >= 0.0) throw ConfigError("exothermic: dH must be negative");
  for (double v : {A, C_Af, c_p, c_pw, E, F_C0, k0, R, T_C0, T_f, T_SP, U,
                   V_reactor, V_j, rho, rho_w, K_C, tau_I, tau}) {
    if (!(v > 0.0)) {
      throw ConfigError("exothermic: all constants except dH must be > 0");
    }
  }
}

void ExothermicParams::set_field(const std::string& name, double value) {
  auto it = field_map().find(name);
  if (it == field_map().end()) {
    throw ConfigError("exothermic: unknown parameter '" + name + "'");
  }
  this->*(it->second) = value;
}

double ExothermicParams::get_field(const std::string& name) const {
  auto it = field_map().find(name);
  if (it == field_map().end()) {
    throw ConfigError("exothermic: unknown parameter '" + name + "'");
  }
  return this->*(it->second);
}

double exothermic_coolant_flow(double T, double e_I,
                               const ExothermicParams& p) {
  const double demand = p.F_C0 + p.K_C * (T - p.T_SP - e_I / p.tau_I);
  return std::clamp(demand, ExothermicParams::kFcMin,
                    ExothermicParams::kFcMax);
}

std::array<double, 4> exothermic_derivatives(const ProcessState& state,
                                             const ExothermicParams& p,
                                             double eta) {
  const double C_A = state.y[0];
  const double T = state.y[1];
  const double T_C = state.y[2];
  const double e_I = state.y[3];

  const double k = p.k0 * std::exp(-p.E / (p.R * T));
  const double F_C = exothermic_coolant_flow(T, e_I, p);
  const double UA = p.U * p.A;

  const double dC_A = (p.C_Af - C_A + eta) / p.tau - k * C_A;
  const double dT = (p.T_f - T) / p.tau -
                    p.dH * k * C_A / (p.rho * p.c_p) +
                    UA * (T_C - T) / (p.rho * p.V_reactor * p.c_p);
  const double dT_C = F_C / p.V_j * (p.T_C0 - T_C) -
                      UA / (p.rho_w * p.V_j * p.c_pw) * (T_C - T);
  const double de_I = p.T_SP - T;

  if (!std::isfinite(dC_A) || !std::isfinite(dT) || !std::isfinite(dT_C)) {
    throw SimulationDiverged("exothermic: non-finite derivative at t=" +
                             std::to_string(state.t));
  }
  return {dC_A, dT, dT_C, de_I};
}

ProcessState ExothermicCstr::initial_state() const {
  ProcessState s;
  s.y = {params_.C_A0, params_.T_0, params_.T_C0, 0.0};
  s.t = 0.0;
  return s;
}

void ExothermicCstr::step(ProcessState& state, const NoiseSpec& noise,
                          double dt, RngStream& rng) const {
  if (!(dt > 0.0)) throw ConfigError("exothermic: dt must be > 0");
  const double eta = noise.variance > 0.0
                         ? rng.normal(noise.mean, std::sqrt(noise.variance))
                         : noise.mean;

  ProcessState tmp = state;
  const auto eval = [&](const std::array<double, 4>& y) {
    tmp.y.assign(y.begin(), y.end());
    return exothermic_derivatives(tmp, params_, eta);
  };

  std::array<double, 4> y0;
  std::copy_n(state.y.begin(), 4, y0.begin());
  const auto k1 = eval(y0);
  std::array<double, 4> y1, y2, y3;
  for (int i = 0; i < 4; ++i) y1[i] = y0[i] + 0.5 * dt * k1[i];
  const auto k2 = eval(y1);
  for (int i = 0; i < 4; ++i) y2[i] = y0[i] + 0.5 * dt * k2[i];
  const auto k3 = eval(y2);
  for (int i = 0; i < 4; ++i) y3[i] = y0[i] + dt * k3[i];
  const auto k4 = eval(y3);

  for (int i = 0; i < 4; ++i) {
    state.y[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  state.y[0] = std::max(state.y[0], 0.0);  // noise can push C_A negative
  state.t += dt;
  if (!state.finite()) {
    throw SimulationDiverged("exothermic: state diverged at t=" +
                             std::to_string(state.t));
  }
}

}  // namespace fluxbench
