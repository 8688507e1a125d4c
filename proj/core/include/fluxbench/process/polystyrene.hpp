#pragma once

#include <array>

#include "fluxbench/process/model.hpp"

namespace fluxbench {

/// Constants for the dimensionless PID-controlled polystyrene CSTR.
/// The dimensionless activation energies close the nominal operating point
/// (the initial values below) as the open-loop steady state at q_c = 1.5.
struct PolystyreneParams {
  double q_i = 0.1;        // initiator flow
  double q_m = 0.4;        // monomer flow
  double q_s = 0.48571;    // solvent flow
  double q_c0 = 1.5;       // coolant flow bias
  double phi_d = 0.01688;  // Damkoehler number, initiator decomposition
  double phi_p = 2.1956e7;   // Damkoehler number, propagation
  double phi_t = 9.6583e12;  // Damkoehler number, termination
  double gamma_d = 4.0762724559081652;
  double gamma_p = 17.256315697586116;
  double gamma_t = 0.3;
  double x_1f = 0.06769;  // initiator feed
  double x_2f = 1.0;      // monomer feed
  double x_3f = 0.0;      // reactor feed temperature
  double x_4f = -1.5;     // coolant feed temperature
  double delta = 0.74074;
  double delta_1 = 0.90569;
  double delta_2 = 0.37256;
  double beta = 13.17936;
  double f = 0.6;  // initiator efficiency
  double x_3sp = 0.85;
  double K_c = 50.0;
  double tau_D = 0.9;
  double tau_I = 5.0;

  // Coolant flow limits (dimensionless).
  static constexpr double kQcMin = 0.0;
  static constexpr double kQcMax = 5.0;

  // Initial values for the dynamic simulations.
  double x_10 = 0.0041;
  double x_20 = 0.2156;
  double x_30 = 0.951;
  double x_40 = -1.1191;

  void validate() const;
  void set_field(const std::string& name, double value);
  double get_field(const std::string& name) const;
};

double kappa_d(double x3, const PolystyreneParams& p);
double kappa_t(double x3, const PolystyreneParams& p);
double kappa_p(double x3, const PolystyreneParams& p);

/// PID coolant flow, clamped to [0, 5]. `deriv_term` is the frozen
/// backward-difference estimate of d(x_3sp - x_3)/dtau for the current step.
double polystyrene_coolant_flow(double x3, double e_int, double deriv_term,
                                const PolystyreneParams& p);

/// Right-hand side for state (x_1, x_2, x_3, x_4, e_int) with the
/// disturbance eta (added to the monomer feed) and the PID derivative term
/// held fixed. Requires x_1 >= 0; throws std::domain_error otherwise.
std::array<double, 5> polystyrene_derivatives(const ProcessState& state,
                                              const PolystyreneParams& params,
                                              double eta,
                                              double deriv_term = 0.0);

class PolystyreneCstr final : public ProcessModel {
 public:
  PolystyreneCstr() = default;
  explicit PolystyreneCstr(const PolystyreneParams& params)
      : params_(params) {}

  std::string name() const override { return "polystyrene"; }
  std::vector<std::string> state_names() const override {
    return {"x_1", "x_2", "x_3", "x_4", "e_int"};
  }
  ProcessState initial_state() const override;
  void step(ProcessState& state, const NoiseSpec& noise, double dt,
            RngStream& rng) const override;
  /// Order parameter: dimensionless reactor temperature x_3.
  double order_parameter(const ProcessState& state) const override {
    return state.y[2];
  }
  void set_param(const std::string& name, double value) override {
    params_.set_field(name, value);
  }
  double get_param(const std::string& name) const override {
    return params_.get_field(name);
  }
  std::unique_ptr<ProcessModel> clone() const override {
    return std::make_unique<PolystyreneCstr>(*this);
  }

  const PolystyreneParams& params() const { return params_; }
  PolystyreneParams& params() { return params_; }

 private:
  PolystyreneParams params_;
};

}  // namespace fluxbench
