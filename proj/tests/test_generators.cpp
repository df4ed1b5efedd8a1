#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mcqmc/error.hpp"
#include "mcqmc/generators.hpp"
#include "mcqmc/streams.hpp"

using namespace mcqmc;

namespace {

long double phi_ld(long double x) { return 0.5L * std::erfcl(-x / std::sqrt(2.0L)); }

// Bisection against the long double CDF.
double quantile_oracle(double u) {
  long double lo = -40.0L, hi = 40.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (phi_ld(mid) < u ? lo : hi) = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

double t3_cdf(double t) {
  const double s3 = std::sqrt(3.0);
  return 0.5 + (t / (s3 * (1.0 + t * t / 3.0)) + std::atan(t / s3)) / std::numbers::pi;
}

double gamma3_cdf(double x) { return 1.0 - std::exp(-x) * (1.0 + x + 0.5 * x * x); }

}  // namespace

TEST_CASE("normal quantile examples") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(quantile_oracle(0.975)).epsilon(1e-14));
  CHECK(std::abs(normal_quantile(0.975) - 1.959964) < 1e-5);
  for (double u : {0.1, 0.3}) CHECK(normal_quantile(u) == doctest::Approx(-normal_quantile(1 - u)).epsilon(1e-14));
  CHECK_THROWS_AS(normal_quantile(0.0), Error);
  CHECK_THROWS_AS(normal_quantile(1.0), Error);
  CHECK_THROWS_AS(normal_quantile(std::nan("")), Error);
}

TEST_CASE("normal quantile round trip and oracle agreement") {
  double worst_round = 0.0, worst_rel = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    // log-spaced into both tails plus a uniform grid
    const double t = k / 20000.0;
    for (double u : {1e-8 + t * (1 - 2e-8), std::pow(10.0, -8.0 * t) * 0.5}) {
      const double x = normal_quantile(u);
      worst_round = std::max(worst_round, std::abs(static_cast<double>(phi_ld(x)) - u));
      if (k % 20 == 0) {
        const double o = quantile_oracle(u);
        worst_rel = std::max(worst_rel, std::abs(x - o) / std::max(1.0, std::abs(o)));
      }
    }
  }
  CHECK(worst_round < 1e-12);
  CHECK(worst_rel < 1e-13);
  CHECK(normal_quantile(1e-300) == doctest::Approx(quantile_oracle(1e-300)).epsilon(1e-12));
}

TEST_CASE("extended quantile clamps with a flag") {
  auto lo = normal_quantile_extended(0.0);
  CHECK(lo.clamped);
  CHECK(lo.value == -1e12);
  CHECK(normal_quantile_extended(1.0, 50.0).value == 50.0);
  auto mid = normal_quantile_extended(0.3);
  CHECK_FALSE(mid.clamped);
  CHECK(mid.value == normal_quantile(0.3));
  CHECK(normal_quantile_extended(1e-10, 3.0).clamped);
}

TEST_CASE("normal density and cdf") {
  CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)));
  CHECK(std::exp(normal_log_pdf(1.3)) == doctest::Approx(normal_pdf(1.3)).epsilon(1e-15));
  CHECK(normal_cdf(-37.0) > 0.0);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
}

TEST_CASE("inverse rosenblatt examples") {
  const auto ind = bivariate_normal_rosenblatt(0.0);
  CHECK(inverse_rosenblatt(ind, std::vector<double>{0.5, 0.5}) == std::vector<double>{0.0, 0.0});
  const auto corr = bivariate_normal_rosenblatt(0.5);
  const auto x = inverse_rosenblatt(corr, std::vector<double>{0.975, 0.5});
  const double x1 = quantile_oracle(0.975);
  CHECK(x[0] == doctest::Approx(x1).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(0.5 * x1).epsilon(1e-12));
  CHECK(std::abs(x[0] - 1.95996) < 1e-4);
  CHECK(std::abs(x[1] - 0.97998) < 1e-4);

  RosenblattSpec one;
  one.conditionals.push_back([](double u, std::span<const double>) { return normal_quantile(u); });
  CHECK(inverse_rosenblatt(one, std::vector<double>{0.3})[0] == normal_quantile(0.3));
  CHECK_THROWS_AS(inverse_rosenblatt(corr, std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(inverse_rosenblatt(corr, std::vector<double>{0.5, 1.0}), Error);
}

TEST_CASE("quasi-Monte Carlo bivariate normal pushforward") {
  const double rho = 0.5;
  auto spec = sized_cud_spec(StreamKind::CudLcg, 1u << 16, 2, 1);
  InnovationStream st(spec);
  const auto ros = bivariate_normal_rosenblatt(rho);
  double m1 = 0, m2 = 0, s11 = 0, s22 = 0, s12 = 0;
  const int n = 1 << 16;
  std::vector<double> u(2), x(2);
  for (int i = 0; i < n; ++i) {
    st.next_block(std::span<double>(u));
    inverse_rosenblatt(ros, u, x);
    m1 += x[0];
    m2 += x[1];
    s11 += x[0] * x[0];
    s22 += x[1] * x[1];
    s12 += x[0] * x[1];
  }
  m1 /= n, m2 /= n;
  CHECK(std::abs(m1) < 0.02);
  CHECK(std::abs(m2) < 0.02);
  CHECK(std::abs(s11 / n - m1 * m1 - 1.0) < 0.02);
  CHECK(std::abs(s22 / n - m2 * m2 - 1.0) < 0.02);
  CHECK(std::abs(s12 / n - m1 * m2 - rho) < 0.02);
}

TEST_CASE("truncated normal inversion") {
  CHECK(truncated_normal_inverse(0.0, TruncSide::Positive, 0.5) == doctest::Approx(quantile_oracle(0.75)).epsilon(1e-13));
  CHECK(truncated_normal_inverse(0.0, TruncSide::Negative, 0.5) == doctest::Approx(quantile_oracle(0.25)).epsilon(1e-13));
  CHECK(std::abs(truncated_normal_inverse(0.0, TruncSide::Positive, 0.5) - 0.674490) < 1e-6);

  SUBCASE("literal formula agrees away from the tails") {
    for (double m : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
      for (double u : {0.05, 0.4, 0.9}) {
        const double pos = m + quantile_oracle(static_cast<double>(phi_ld(-m) + u * phi_ld(m)));
        const double neg = m + quantile_oracle(static_cast<double>(u * phi_ld(-m)));
        CHECK(truncated_normal_inverse(m, TruncSide::Positive, u) == doctest::Approx(pos).epsilon(1e-10));
        CHECK(truncated_normal_inverse(m, TruncSide::Negative, u) == doctest::Approx(neg).epsilon(1e-10));
      }
    }
  }

  SUBCASE("sign constraint on random inputs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mean(-8.0, 8.0), unif(1e-12, 1 - 1e-12);
    for (int i = 0; i < 10000; ++i) {
      const double m = mean(rng), u = unif(rng);
      CHECK(truncated_normal_inverse(m, TruncSide::Positive, u) > 0.0);
      CHECK(truncated_normal_inverse(m, TruncSide::Negative, u) <= 0.0);
    }
  }

  SUBCASE("strictly increasing in u") {
    for (double m : {-3.0, 0.0, 2.5}) {
      double prev_p = -INFINITY, prev_n = -INFINITY;
      for (int k = 1; k < 1000; ++k) {
        const double u = k / 1000.0;
        const double p = truncated_normal_inverse(m, TruncSide::Positive, u);
        const double q = truncated_normal_inverse(m, TruncSide::Negative, u);
        CHECK(p > prev_p);
        CHECK(q > prev_n);
        prev_p = p, prev_n = q;
      }
    }
  }

  CHECK_THROWS_AS(truncated_normal_inverse(0.0, TruncSide::Positive, 0.0), Error);
  try {
    truncated_normal_inverse(0.0, TruncSide::Positive, 1.0 - 1e-16);
    FAIL("expected Numerical");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
  }
}

TEST_CASE("gamma and t quantiles") {
  for (double u : {0.01, 0.3, 0.5, 0.97}) {
    CHECK(gamma3_cdf(gamma_quantile(3.0, 1.0, u)) == doctest::Approx(u).epsilon(1e-12));
    CHECK(gamma_quantile(3.0, 2.0, u) == doctest::Approx(0.5 * gamma_quantile(3.0, 1.0, u)).epsilon(1e-14));
    CHECK(t3_cdf(student_t_quantile(3.0, 1.0, u)) == doctest::Approx(u).epsilon(1e-12));
  }
  const double x = 0.8;
  const double t3 = 6.0 * std::sqrt(3.0) / (std::numbers::pi * (3 + x * x) * (3 + x * x));
  CHECK(std::exp(student_t_log_pdf(3.0, 1.0, x)) == doctest::Approx(t3).epsilon(1e-13));
  CHECK_THROWS_AS(gamma_quantile(-1.0, 1.0, 0.5), Error);
}
