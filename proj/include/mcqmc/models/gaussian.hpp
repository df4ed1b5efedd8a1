#pragma once

// Toy Gaussian targets.

#include "mcqmc/samplers.hpp"

namespace mcqmc {

/// Systematic-scan Gibbs for the standard bivariate normal with correlation
/// rho: x1 | x2 ~ N(rho x2, 1 - rho^2), then x2 | x1 likewise. d = 2.
GibbsSpec bivariate_normal_gibbs(double rho);

/// Independence sampler for N(0,1) whose proposal is N(0,1) itself (always
/// accepts). d = 2.
MisSpec normal_mis_exact();

/// Independence sampler for N(0,1) with a scale * t_dof proposal. d = 2.
MisSpec normal_mis_student(double dof, double scale);

/// Random-walk Metropolis for N(0,1) with N(0, step^2) increments. d = 2.
RwmSpec normal_rwm(double step);

}  // namespace mcqmc
