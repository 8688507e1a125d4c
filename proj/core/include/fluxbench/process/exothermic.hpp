#pragma once

#include <array>

#include "fluxbench/process/model.hpp"

namespace fluxbench {

/// Constants for the PI-controlled exothermic CSTR (first-order A -> P,
/// cooling jacket, coolant flow manipulated to hold the reactor temperature).
/// Defaults are the nominal operating values; all fields are settable by name.
struct ExothermicParams {
  double A = 30.0;        // heat-transfer area, m^2
  double C_Af = 2.0;      // feed concentration, kmol/m^3
  double c_p = 4.0;       // feed heat capacity, kJ/(kg K)
  double c_pw = 4.0;      // coolant heat capacity, kJ/(kg K)
  double E = 1.5e4;       // activation energy, kJ/kmol
  double F_C0 = 50.0;     // nominal coolant flow, m^3/min
  double k0 = 17.038;     // pre-exponential factor, 1/min
  double R = 8.314;       // gas constant, kJ/(kmol K)
  double T_C0 = 300.0;    // coolant inlet temperature, K
  double T_f = 300.0;     // feed temperature, K
  double T_SP = 800.0;    // controller set point, K
  double U = 100.0;       // heat-transfer coefficient, kJ/(min K m^2)
  double V_reactor = 10.0;  // m^3
  double V_j = 10.0;        // jacket volume, m^3
  double dH = -2.2e6;     // heat of reaction, kJ/kmol (exothermic)
  double rho = 1000.0;    // feed density, kg/m^3
  double rho_w = 1000.0;  // coolant density, kg/m^3
  double K_C = 0.02;      // controller gain, m^3/(min K)
  double tau_I = 25.0;    // integral time constant, min
  double tau = 0.53;      // residence time, min

  // Coolant flow actuator limits, m^3/min.
  static constexpr double kFcMin = 30.0;
  static constexpr double kFcMax = 70.0;

  // Initial condition for the dynamic simulations.
  double C_A0 = 1.2;
  double T_0 = 700.0;

  void validate() const;
  void set_field(const std::string& name, double value);
  double get_field(const std::string& name) const;
};

/// Coolant flow demanded by the PI law, clamped to the actuator range.
double exothermic_coolant_flow(double T, double e_I,
                               const ExothermicParams& p);

/// Right-hand side for state (C_A, T, T_C, e_I) with disturbance eta held
/// fixed. Throws SimulationDiverged if an intermediate is non-finite.
std::array<double, 4> exothermic_derivatives(const ProcessState& state,
                                             const ExothermicParams& params,
                                             double eta);

class ExothermicCstr final : public ProcessModel {
 public:
  ExothermicCstr() = default;
  explicit ExothermicCstr(const ExothermicParams& params) : params_(params) {}

  std::string name() const override { return "exothermic"; }
  std::vector<std::string> state_names() const override {
    return {"C_A", "T", "T_C", "e_I"};
  }
  ProcessState initial_state() const override;
  void step(ProcessState& state, const NoiseSpec& noise, double dt,
            RngStream& rng) const override;
  /// Order parameter: reactor temperature T.
  double order_parameter(const ProcessState& state) const override {
    return state.y[1];
  }
  void set_param(const std::string& name, double value) override {
    params_.set_field(name, value);
  }
  double get_param(const std::string& name) const override {
    return params_.get_field(name);
  }
  std::unique_ptr<ProcessModel> clone() const override {
    return std::make_unique<ExothermicCstr>(*this);
  }

  const ExothermicParams& params() const { return params_; }
  ExothermicParams& params() { return params_; }

 private:
  ExothermicParams params_;
};

}  // namespace fluxbench
