#pragma once

#include "fluxbench/process/model.hpp"

namespace fluxbench {

/// 1-D biased random walk on the non-negative integers with a reflecting
/// floor at 0: +1 with probability up_probability, otherwise -1 (clamped at
/// 0). One step advances time by 1. A minimal process for exercising the
/// sampling machinery against closed-form first-passage results.
struct RandomWalkParams {
  double up_probability = 0.45;
  double start = 0.0;

  void validate() const;
};

class RandomWalk final : public ProcessModel {
 public:
  RandomWalk() = default;
  explicit RandomWalk(const RandomWalkParams& params) : params_(params) {}

  std::string name() const override { return "random_walk"; }
  std::vector<std::string> state_names() const override { return {"pos"}; }
  ProcessState initial_state() const override;
  void step(ProcessState& state, const NoiseSpec& noise, double dt,
            RngStream& rng) const override;
  double order_parameter(const ProcessState& state) const override {
    return state.y[0];
  }
  void set_param(const std::string& name, double value) override;
  double get_param(const std::string& name) const override;
  std::unique_ptr<ProcessModel> clone() const override {
    return std::make_unique<RandomWalk>(*this);
  }

  const RandomWalkParams& params() const { return params_; }

 private:
  RandomWalkParams params_;
};

}  // namespace fluxbench
