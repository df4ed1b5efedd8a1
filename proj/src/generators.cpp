#include "mcqmc/generators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mcqmc/error.hpp"

namespace mcqmc {

namespace {

using fast_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

template <std::size_t N>
double horner(const double (&c)[N], double r) noexcept {
  double v = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) v = v * r + c[i];
  return v;
}

// AS241 (PPND16) coefficients, lowest order first.
constexpr double kA[] = {3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
                         1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                         3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[] = {1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2, 5.3941960214247511077e+3,
                         2.1213794301586595867e+4, 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                         5.2264952788528545610e+3};
constexpr double kC[] = {1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                         3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                         2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
                         1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                         1.05075007164441684324e-9};
constexpr double kE[] = {6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                         2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                         2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
                         7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                         2.04426310338993978564e-15};

double ppnd16(double p) noexcept {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kA, r) / horner(kB, r);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = horner(kC, r) / horner(kD, r);
  } else {
    r -= 5.0;
    v = horner(kE, r) / horner(kF, r);
  }
  return q < 0 ? -v : v;
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_log_pdf(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::DomainError, "normal_quantile needs u in (0,1), got " + std::to_string(u));
  return ppnd16(u);
}

ExtendedQuantile normal_quantile_extended(double u, double large) {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::DomainError, "normal_quantile_extended needs u in [0,1]");
  if (u == 0.0) return {-large, true};
  if (u == 1.0) return {large, true};
  const double v = ppnd16(u);
  if (std::abs(v) > large) return {std::copysign(large, v), true};
  return {v, false};
}

QuantileFn normal_quantile_fn(double mean, double sd) {
  return {"normal(" + std::to_string(mean) + "," + std::to_string(sd) + ")",
          [mean, sd](double u) { return mean + sd * normal_quantile(u); }};
}

double gamma_quantile(double shape, double rate, double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::DomainError, "gamma_quantile needs u in (0,1)");
  if (!(shape > 0.0 && rate > 0.0)) throw Error(ErrorKind::DomainError, "gamma shape and rate must be positive");
  double x;
  try {
    x = boost::math::gamma_p_inv(shape, u, fast_policy()) / rate;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Numerical, std::string("gamma quantile inversion failed: ") + e.what());
  }
  if (!std::isfinite(x)) throw Error(ErrorKind::Numerical, "gamma quantile is not finite");
  return x;
}

double student_t_quantile(double dof, double scale, double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::DomainError, "student_t_quantile needs u in (0,1)");
  try {
    return scale * boost::math::quantile(boost::math::students_t_distribution<double, fast_policy>(dof), u);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Numerical, std::string("t quantile failed: ") + e.what());
  }
}

double student_t_log_pdf(double dof, double scale, double x) {
  const double z = x / scale;
  return std::lgamma(0.5 * (dof + 1)) - std::lgamma(0.5 * dof) - 0.5 * std::log(dof * std::numbers::pi) -
         std::log(scale) - 0.5 * (dof + 1) * std::log1p(z * z / dof);
}

void inverse_rosenblatt(const RosenblattSpec& spec, std::span<const double> u, std::span<double> out) {
  const std::size_t s = spec.dim();
  if (u.size() != s || out.size() != s) throw Error(ErrorKind::DimensionMismatch, "inverse_rosenblatt needs dim(u) = s");
  for (std::size_t j = 0; j < s; ++j) out[j] = spec.conditionals[j](u[j], out.first(j));
}

std::vector<double> inverse_rosenblatt(const RosenblattSpec& spec, std::span<const double> u) {
  std::vector<double> x(spec.dim());
  inverse_rosenblatt(spec, u, x);
  return x;
}

RosenblattSpec bivariate_normal_rosenblatt(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw Error(ErrorKind::DomainError, "correlation must lie in (-1,1)");
  const double c = std::sqrt(1.0 - rho * rho);
  RosenblattSpec spec;
  spec.conditionals.push_back([](double u, std::span<const double>) { return normal_quantile(u); });
  spec.conditionals.push_back(
      [rho, c](double u, std::span<const double> prev) { return rho * prev[0] + c * normal_quantile(u); });
  return spec;
}

double truncated_normal_inverse(double mean, TruncSide side, double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::DomainError, "truncated_normal_inverse needs u in (0,1)");
  if (u < 1e-15 || u > 1.0 - 1e-15) {
    throw Error(ErrorKind::Numerical, "uniform within 1e-15 of an endpoint in truncated normal inversion");
  }
  double z;
  if (side == TruncSide::Positive) {
    // mean + Phi^{-1}(Phi(-mean) + u Phi(mean)), written through the upper
    // tail: Phi(-mean) + u Phi(mean) = 1 - (1-u) Phi(mean).
    const double q = (1.0 - u) * normal_cdf(mean);
    if (!(q > 0.0)) throw Error(ErrorKind::Numerical, "truncated normal tail probability underflowed");
    z = mean - ppnd16(q);
    if (z <= 0.0) z = std::numeric_limits<double>::denorm_min();
  } else {
    const double q = u * normal_cdf(-mean);
    if (!(q > 0.0)) throw Error(ErrorKind::Numerical, "truncated normal tail probability underflowed");
    z = mean + ppnd16(q);
    if (z > 0.0) z = 0.0;
  }
  if (!std::isfinite(z)) throw Error(ErrorKind::Numerical, "truncated normal inversion is not finite");
  return z;
}

}  // namespace mcqmc
