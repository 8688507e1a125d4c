#include "fluxbench/process/polystyrene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fluxbench/errors.hpp"

namespace fluxbench {

namespace {

using FieldMap = std::map<std::string, double PolystyreneParams::*>;

const FieldMap& field_map() {
  static const FieldMap m = {
      {"q_i", &PolystyreneParams::q_i},
      {"q_m", &PolystyreneParams::q_m},
      {"q_s", &PolystyreneParams::q_s},
      {"q_c0", &PolystyreneParams::q_c0},
      {"phi_d", &PolystyreneParams::phi_d},
      {"phi_p", &PolystyreneParams::phi_p},
      {"phi_t", &PolystyreneParams::phi_t},
      {"gamma_d", &PolystyreneParams::gamma_d},
      {"gamma_p", &PolystyreneParams::gamma_p},
      {"gamma_t", &PolystyreneParams::gamma_t},
      {"x_1f", &PolystyreneParams::x_1f},
      {"x_2f", &PolystyreneParams::x_2f},
      {"x_3f", &PolystyreneParams::x_3f},
      {"x_4f", &PolystyreneParams::x_4f},
      {"delta", &PolystyreneParams::delta},
      {"delta_1", &PolystyreneParams::delta_1},
      {"delta_2", &PolystyreneParams::delta_2},
      {"beta", &PolystyreneParams::beta},
      {"f", &PolystyreneParams::f},
      {"x_3sp", &PolystyreneParams::x_3sp},
      {"K_c", &PolystyreneParams::K_c},
      {"tau_D", &PolystyreneParams::tau_D},
      {"tau_I", &PolystyreneParams::tau_I},
      {"x_10", &PolystyreneParams::x_10},
      {"x_20", &PolystyreneParams::x_20},
      {"x_30", &PolystyreneParams::x_30},
      {"x_40", &PolystyreneParams::x_40},
  };
  return m;
}

}  // namespace

void PolystyreneParams::validate() const {
  if (!(phi_d > 0.0 && phi_p > 0.0 && phi_t > 0.0)) {
    throw ConfigError("polystyrene: Damkoehler numbers must be > 0");
  }
  if (!(f > 0.0 && f <= 1.0)) {
    throw ConfigError("polystyrene: initiator efficiency f must be in (0, 1]");
  }
  for (double q : {q_i, q_m, q_s}) {
    if (q < 0.0) throw ConfigError("polystyrene: flows must be >= 0");
  }
}

void PolystyreneParams::set_field(const std::string& name, double value) {
  auto it = field_map().find(name);
  if (it == field_map().end()) {
    throw ConfigError("polystyrene: unknown parameter '" + name + "'");
  }
  this->*(it->second) = value;
}

double PolystyreneParams::get_field(const std::string& name) const {
  auto it = field_map().find(name);
  if (it == field_map().end()) {
    throw ConfigError("polystyrene: unknown parameter '" + name + "'");
  }
  return this->*(it->second);
}

double kappa_d(double x3, const PolystyreneParams& p) {
  return std::exp(p.gamma_d * x3 / (1.0 + x3 / p.gamma_p));
}

double kappa_t(double x3, const PolystyreneParams& p) {
  return std::exp(p.gamma_t * x3 / (1.0 + x3 / p.gamma_p));
}

double kappa_p(double x3, const PolystyreneParams& p) {
  return std::exp(x3 / (1.0 + x3 / p.gamma_p));
}

double polystyrene_coolant_flow(double x3, double e_int, double deriv_term,
                                const PolystyreneParams& p) {
  const double e = p.x_3sp - x3;
  const double demand =
      p.q_c0 - p.K_c * (e + e_int / p.tau_I + p.tau_D * deriv_term);
  return std::clamp(demand, PolystyreneParams::kQcMin,
                    PolystyreneParams::kQcMax);
}

std::array<double, 5> polystyrene_derivatives(const ProcessState& state,
                                              const PolystyreneParams& p,
                                              double eta, double deriv_term) {
  const double x1 = state.y[0];
  const double x2 = state.y[1];
  const double x3 = state.y[2];
  const double x4 = state.y[3];
  const double e_int = state.y[4];

  if (x1 < 0.0) {
    throw std::domain_error("polystyrene: x_1 must be >= 0");
  }

  const double kd = kappa_d(x3, p);
  const double kt = kappa_t(x3, p);
  const double kp = kappa_p(x3, p);
  const double Q = p.q_i + p.q_m + p.q_s;
  const double x5 = std::sqrt(2.0 * p.f * p.phi_d * kd * x1 / (p.phi_t * kt));
  const double qc = polystyrene_coolant_flow(x3, e_int, deriv_term, p);

  const double propagation = p.phi_p * kp * x2 * x5;
  const double dx1 = p.q_i * p.x_1f - Q * x1 - p.phi_d * kd * x1;
  const double dx2 = p.q_m * (p.x_2f + eta) - Q * x2 - propagation;
  const double dx3 =
      Q * (p.x_3f - x3) + p.beta * propagation - p.delta * (x3 - x4);
  const double dx4 =
      p.delta_1 * (qc * (p.x_4f - x4) + p.delta * p.delta_2 * (x3 - x4));
  const double de_int = p.x_3sp - x3;

  for (double d : {dx1, dx2, dx3, dx4}) {
    if (!std::isfinite(d)) {
      throw SimulationDiverged("polystyrene: non-finite derivative at t=" +
                               std::to_string(state.t));
    }
  }
  return {dx1, dx2, dx3, dx4, de_int};
}

ProcessState PolystyreneCstr::initial_state() const {
  ProcessState s;
  s.y = {params_.x_10, params_.x_20, params_.x_30, params_.x_40, 0.0};
  s.t = 0.0;
  s.prev_error = params_.x_3sp - params_.x_30;
  return s;
}

void PolystyreneCstr::step(ProcessState& state, const NoiseSpec& noise,
                           double dt, RngStream& rng) const {
  if (!(dt > 0.0)) throw ConfigError("polystyrene: dt must be > 0");
  const double eta = noise.variance > 0.0
                         ? rng.normal(noise.mean, std::sqrt(noise.variance))
                         : noise.mean;

  // Backward-difference derivative of the error, frozen across the step.
  const double e_now = params_.x_3sp - state.y[2];
  const double deriv_term = (e_now - state.prev_error) / dt;

  ProcessState tmp = state;
  const auto eval = [&](const std::array<double, 5>& y) {
    tmp.y.assign(y.begin(), y.end());
    return polystyrene_derivatives(tmp, params_, eta, deriv_term);
  };

  std::array<double, 5> y0;
  std::copy_n(state.y.begin(), 5, y0.begin());
  const auto clamp_x1 = [](std::array<double, 5>& y) {
    y[0] = std::max(y[0], 0.0);
    y[1] = std::max(y[1], 0.0);
  };
  const auto k1 = eval(y0);
  std::array<double, 5> y1, y2, y3;
  for (int i = 0; i < 5; ++i) y1[i] = y0[i] + 0.5 * dt * k1[i];
  clamp_x1(y1);
  const auto k2 = eval(y1);
  for (int i = 0; i < 5; ++i) y2[i] = y0[i] + 0.5 * dt * k2[i];
  clamp_x1(y2);
  const auto k3 = eval(y2);
  for (int i = 0; i < 5; ++i) y3[i] = y0[i] + dt * k3[i];
  clamp_x1(y3);
  const auto k4 = eval(y3);

  for (int i = 0; i < 5; ++i) {
    state.y[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  state.y[0] = std::max(state.y[0], 0.0);
  state.y[1] = std::max(state.y[1], 0.0);
  state.prev_error = e_now;
  state.t += dt;
  if (!state.finite()) {
    throw SimulationDiverged("polystyrene: state diverged at t=" +
                             std::to_string(state.t));
  }
}

}  // namespace fluxbench
