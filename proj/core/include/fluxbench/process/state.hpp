#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fluxbench {

/// Dynamical state of a simulated process: the integrated state vector plus
/// controller memory that lives outside the ODE (previous error for the
/// backward-difference derivative term).
struct ProcessState {
  std::vector<double> y;
  double t = 0.0;
  double prev_error = 0.0;

  bool finite() const;
};

/// Zero-mean Gaussian disturbance redrawn once per integration step and held
/// constant across the step.
struct NoiseSpec {
  double mean = 0.0;
  double variance = 0.0;

  void validate() const;
};

enum class Basin { A, Transition, B };

/// Direction of the abnormal transition in order-parameter space.
enum class TransitionDirection { Increasing, Decreasing };

/// Order-parameter bounds for the desirable basin A and the terminal basin B.
/// For a decreasing transition, A = {lambda >= basin_a_bound} and
/// B = {lambda <= basin_b_bound}; mirrored for increasing.
struct BasinSpec {
  double basin_a_bound = 0.0;
  double basin_b_bound = 0.0;
  TransitionDirection direction = TransitionDirection::Decreasing;

  void validate() const;
  Basin classify(double lambda) const;
  /// True if `lambda` is at or past `threshold` in the transition direction.
  bool past(double lambda, double threshold) const;
};

struct SimConfig {
  double dt = 0.01;
  double t_sim = 1.0;
  std::uint64_t seed = 0;
  bool stop_on_basin_b = false;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ProcessState> states;
  std::vector<double> lambdas;

  std::size_t size() const { return states.size(); }
};

}  // namespace fluxbench
