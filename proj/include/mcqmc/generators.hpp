#pragma once

// Nonuniform generation by inversion.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mcqmc {

double normal_pdf(double x) noexcept;
double normal_log_pdf(double x) noexcept;
/// Phi(x), via erfc so the lower tail keeps full relative precision.
double normal_cdf(double x) noexcept;

/// Phi^{-1}(u) for u in (0,1) (Wichura's AS241). Throws DomainError otherwise.
double normal_quantile(double u);

struct ExtendedQuantile {
  double value = 0.0;
  bool clamped = false;
};

/// Accepts the closed interval: u = 0 or 1 (or a quantile beyond +-large)
/// comes back as -+large with `clamped` set.
ExtendedQuantile normal_quantile_extended(double u, double large = 1e12);

/// Monotone map (0,1) -> R with a name, e.g. for config-selected marginals.
struct QuantileFn {
  std::string label;
  std::function<double(double)> eval;
};

QuantileFn normal_quantile_fn(double mean = 0.0, double sd = 1.0);

/// Gamma(shape, rate) quantile. Throws Numerical if the inversion fails.
double gamma_quantile(double shape, double rate, double u);
/// Student t with `dof` degrees of freedom, scaled by `scale`.
double student_t_quantile(double dof, double scale, double u);
double student_t_log_pdf(double dof, double scale, double x);

/// Conditional quantile F_j^{-1}(u_j; x_1..x_{j-1}).
using ConditionalQuantile = std::function<double(double u, std::span<const double> previous)>;

struct RosenblattSpec {
  std::vector<ConditionalQuantile> conditionals;  // one per coordinate, in order
  std::size_t dim() const noexcept { return conditionals.size(); }
};

/// x_1 = F_1^{-1}(u_1), x_j = F_j^{-1}(u_j; x_{1:j-1}).
std::vector<double> inverse_rosenblatt(const RosenblattSpec& spec, std::span<const double> u);
void inverse_rosenblatt(const RosenblattSpec& spec, std::span<const double> u, std::span<double> out);

/// Standard bivariate normal with correlation rho:
/// x_2 = rho x_1 + sqrt(1 - rho^2) Phi^{-1}(u_2).
RosenblattSpec bivariate_normal_rosenblatt(double rho);

enum class TruncSide { Positive, Negative };

/// N(mean, 1) conditioned on > 0 (Positive) or <= 0 (Negative), by inversion.
/// Throws DomainError outside (0,1) and Numerical for u within 1e-15 of an
/// endpoint or when the tail probability underflows.
double truncated_normal_inverse(double mean, TruncSide side, double u);

}  // namespace mcqmc
