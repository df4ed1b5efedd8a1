#pragma once

// Gamma-Poisson hierarchy for the ten-pump failure data:
//   s_i ~ Poisson(lambda_i t_i), lambda_i ~ Gamma(alpha, rate beta),
//   beta ~ Gamma(gamma, rate delta).
// State (lambda_1..lambda_10, beta); one systematic scan inverts
//   lambda_i | beta ~ Gamma(alpha + s_i, rate t_i + beta)     with u_i
//   beta | lambda  ~ Gamma(gamma + k alpha, rate delta + sum lambda) with u_{k+1}.

#include <string>
#include <vector>

#include "mcqmc/samplers.hpp"

namespace mcqmc {

struct PumpData {
  std::vector<double> failures;
  std::vector<double> times;
  double alpha = 1.802;
  double gamma = 0.1;
  double delta = 1.0;
};

/// CSV "pump,failures,time". A comment line of the form
/// "alpha=..,gamma=..,delta=.." overrides the hyperparameters.
PumpData load_pump_csv(const std::string& path);

class PumpModel {
 public:
  explicit PumpModel(PumpData data);

  const PumpData& data() const noexcept { return data_; }
  std::size_t k() const noexcept { return data_.failures.size(); }
  std::size_t state_dim() const noexcept { return k() + 1; }
  std::size_t innovation_dim() const noexcept { return k() + 1; }

  /// lambda_i = s_i / t_i (or 1 when s_i = 0), beta = 1.
  State initial_state() const;
  void step(ConstVec x, ConstVec u, MutVec out) const;
  UpdateFunction gibbs_update() const;
  std::vector<std::string> parameter_names() const;

 private:
  PumpData data_;
};

}  // namespace mcqmc
