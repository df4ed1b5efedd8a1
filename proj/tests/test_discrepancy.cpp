#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/error.hpp"

using namespace mcqmc;

namespace {

// Brute force over every critical corner: each coordinate is a point value or
// 1, counting points with <= (closed box) and < (open box) separately.
double oracle_star(const PointSet& ps) {
  const std::size_t n = ps.size(), d = ps.dim();
  std::vector<std::vector<double>> axis(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) axis[j].push_back(ps.coord(i, j));
    axis[j].push_back(1.0);
  }
  std::vector<std::size_t> idx(d, 0);
  double best = 0.0;
  while (true) {
    double vol = 1.0;
    for (std::size_t j = 0; j < d; ++j) vol *= axis[j][idx[j]];
    std::size_t closed = 0, open = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool c = true, o = true;
      for (std::size_t j = 0; j < d; ++j) {
        c = c && ps.coord(i, j) <= axis[j][idx[j]];
        o = o && ps.coord(i, j) < axis[j][idx[j]];
      }
      closed += c;
      open += o;
    }
    best = std::max({best, static_cast<double>(closed) / n - vol, vol - static_cast<double>(open) / n});
    std::size_t j = 0;
    while (j < d && ++idx[j] == axis[j].size()) idx[j++] = 0;
    if (j == d) break;
  }
  return best;
}

PointSet random_points(std::size_t n, std::size_t d, std::uint64_t seed, bool coarse = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> c(n * d);
  for (auto& v : c) v = coarse ? std::floor(unif(rng) * 8) / 8 : unif(rng);
  return PointSet(d, c);
}

}  // namespace

TEST_CASE("local discrepancy") {
  CHECK(local_discrepancy(PointSet(2, {0.5, 0.5}), std::vector<double>{1.0, 1.0}) == 0.0);
  CHECK(local_discrepancy(PointSet(1, {0.0}), std::vector<double>{0.3}) == doctest::Approx(0.7));
  CHECK(local_discrepancy(PointSet(1, {0.25, 0.75}), std::vector<double>{0.5}) == 0.0);
  CHECK_THROWS_AS(local_discrepancy(PointSet(1, {0.5}), std::vector<double>{0.5, 0.5}), Error);
}

TEST_CASE("point set validation") {
  CHECK_THROWS_AS(PointSet(2, {0.1, 0.2, 0.3}), Error);
  CHECK_THROWS_AS(PointSet(1, {}), Error);
  CHECK_THROWS_AS(PointSet(1, {1.5}), Error);
  CHECK(PointSet::from_rows({{0.1, 0.2}, {0.3, 0.4}}).size() == 2);
}

TEST_CASE("one-dimensional closed form") {
  CHECK(star_discrepancy(PointSet(1, {0.5})).star == 0.5);
  std::vector<double> eq;
  for (int i = 1; i <= 4; ++i) eq.push_back((2.0 * i - 1) / 8.0);
  const auto r = star_discrepancy(PointSet(1, eq));
  CHECK(r.method == DiscrepancyMethod::Exact1D);
  CHECK(r.star == doctest::Approx(0.125).epsilon(1e-14));

  // dense scan of |local discrepancy| just below and at each grid value
  const double dense = [] {
    double best = 0.0;
    for (int k = 0; k <= 100000; ++k) {
      const double a = k / 100000.0;
      best = std::max(best, std::abs(local_discrepancy(PointSet(1, {0.5}), std::vector<double>{a})));
    }
    return best;
  }();
  CHECK(dense == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("origin point in two dimensions") {
  CHECK(star_discrepancy(PointSet(2, {0.0, 0.0})).star == 1.0);
}

TEST_CASE("exact grid agrees with the critical-corner brute force") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ps = random_points(5 + 3 * seed, 2, seed);
    CHECK(star_discrepancy_grid(ps) == doctest::Approx(oracle_star(ps)).epsilon(1e-12));
  }
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto ps = random_points(9, 3, 100 + seed);
    CHECK(star_discrepancy_grid(ps) == doctest::Approx(oracle_star(ps)).epsilon(1e-12));
    const auto ties = random_points(12, 3, 200 + seed, true);
    CHECK(star_discrepancy_grid(ties) == doctest::Approx(oracle_star(ties)).epsilon(1e-12));
  }
  const auto ps4 = random_points(6, 4, 7);
  CHECK(star_discrepancy_grid(ps4) == doctest::Approx(oracle_star(ps4)).epsilon(1e-12));
}

TEST_CASE("exact 1d matches the grid enumerator in one dimension") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ps = random_points(50, 1, seed);
    StarOptions grid;
    grid.force_grid = true;
    CHECK(std::abs(star_discrepancy(ps).star - star_discrepancy(ps, grid).star) < 1e-14);
  }
}

TEST_CASE("estimate is a lower bound and saturates on small sets") {
  for (std::size_t d : {1u, 2u, 3u, 4u}) {
    CAPTURE(d);
    const auto ps = random_points(6, d, 40 + d);
    const double exact = oracle_star(ps);
    const double est = star_discrepancy_estimate(ps, 100000, 1);
    CHECK(est <= exact + 1e-15);
    CHECK(est == doctest::Approx(exact).epsilon(1e-14));
    const auto ties = random_points(10, d, 50 + d, true);
    CHECK(star_discrepancy_estimate(ties, 100000, 1) == doctest::Approx(oracle_star(ties)).epsilon(1e-14));
  }
  const auto big = random_points(300, 3, 9);
  CHECK(star_discrepancy_estimate(big, 2000, 3) <= star_discrepancy_grid(big) + 1e-15);
}

TEST_CASE("budget selects the method") {
  const auto ps = random_points(200, 3, 1);
  StarOptions tight;
  tight.exact_budget = 1e5;
  const auto r = star_discrepancy(ps, tight);
  CHECK(r.method == DiscrepancyMethod::SupEstimate);
  CHECK_FALSE(r.exact);
  tight.allow_estimate = false;
  try {
    star_discrepancy(ps, tight);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
  CHECK(star_discrepancy(ps).method == DiscrepancyMethod::ExactGrid);
}

TEST_CASE("local discrepancy never exceeds the star discrepancy") {
  const auto ps = random_points(40, 2, 77);
  const double star = star_discrepancy(ps).star;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> a{unif(rng), unif(rng)};
    CHECK(std::abs(local_discrepancy(ps, a)) <= star + 1e-15);
  }
}

TEST_CASE("star discrepancy is permutation invariant") {
  auto ps = random_points(30, 3, 12);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ps.size(); ++i) rows.emplace_back(ps.point(i).begin(), ps.point(i).end());
  std::mt19937_64 rng(3);
  std::shuffle(rows.begin(), rows.end(), rng);
  CHECK(star_discrepancy(PointSet::from_rows(rows)).star == star_discrepancy(ps).star);
}

TEST_CASE("tuples") {
  const std::vector<double> s{0.1, 0.2, 0.3};
  const auto o = overlapping_tuples(s, 2);
  CHECK(o.coords() == std::vector<double>{0.1, 0.2, 0.2, 0.3});
  CHECK(overlapping_tuples(s, 1).coords() == s);
  CHECK(overlapping_tuples(s, 3).size() == 1);
  CHECK_THROWS_AS(overlapping_tuples(s, 4), Error);
  CHECK(nonoverlapping_tuples(std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}, 2).coords() ==
        std::vector<double>{0.1, 0.2, 0.3, 0.4});
}

TEST_CASE("full-period lcg in one dimension is the complete residue set") {
  StreamSpec s;
  s.kind = StreamKind::CudLcg;
  s.lcg = LcgParams{1021, lcg_table().front().multiplier};
  REQUIRE(lcg_table().front().modulus == 1021);
  const std::vector<std::size_t> n{1020}, d{1};
  const auto rows = cud_diagnostic(s, n, d);
  REQUIRE(rows.size() == 2);
  // points k/m, k = 1..m-1: the sup is reached just below 1/m
  CHECK(rows[0].report.star == doctest::Approx(1.0 / 1021).epsilon(1e-12));
  CHECK(rows[0].report.star == rows[1].report.star);
}

TEST_CASE("cud diagnostic falls from a quarter period to the full period") {
  const auto base = lcg_table().front();
  StreamSpec s;
  s.kind = StreamKind::CudLcg;
  s.lcg = base;
  for (std::size_t d : {1u, 2u, 3u}) {
    CAPTURE(d);
    const std::vector<std::size_t> ns{base.period() / 4, base.period()}, ds{d};
    const auto rows = cud_diagnostic(s, ns, ds);
    REQUIRE(rows.size() == 4);
    CHECK(rows[2].report.star < rows[0].report.star);
    CHECK(rows[3].report.star < rows[1].report.star);
  }
}

TEST_CASE("exhausted stream propagates") {
  StreamSpec s;
  s.kind = StreamKind::CudLcg;
  s.lcg = LcgParams{11, 2};
  const std::vector<std::size_t> n{11}, d{1};
  CHECK_THROWS_AS(cud_diagnostic(s, n, d), Error);
}

TEST_CASE("csv rows") {
  std::ostringstream os;
  write_discrepancy_csv_header(os);
  DiscrepancyReport r{4, 1, 0.125, DiscrepancyMethod::Exact1D, true};
  write_discrepancy_csv_rows(os, "CUD_LCG", {{WindowKind::Overlapping, r}});
  CHECK(os.str() == "stream,n,d,window_kind,star,method\nCUD_LCG,4,1,overlapping,0.125,EXACT_1D\n");
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), Error);
}
