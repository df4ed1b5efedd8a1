#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "mcqmc/error.hpp"
#include "mcqmc/streams.hpp"

using namespace mcqmc;

namespace {

StreamSpec tiny_lcg() {
  StreamSpec s;
  s.kind = StreamKind::CudLcg;
  s.lcg = LcgParams{11, 2};
  s.seed = 0;  // state 1
  return s;
}

std::uint64_t mulmod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r = r * b % m;
  return r;
}

}  // namespace

TEST_CASE("lcg m=11 a=2 hand iteration") {
  InnovationStream s(tiny_lcg());
  CHECK(s.next_scalar() == 2.0 / 11);
  CHECK(s.next_scalar() == 4.0 / 11);
  CHECK(s.next_scalar() == 8.0 / 11);
  CHECK(s.next_scalar() == 5.0 / 11);
}

TEST_CASE("blocks partition the scalar stream") {
  InnovationStream s(tiny_lcg());
  auto b1 = s.next_block(2);
  auto b2 = s.next_block(2);
  CHECK(b1 == std::vector<double>{2.0 / 11, 4.0 / 11});
  CHECK(b2 == std::vector<double>{8.0 / 11, 5.0 / 11});

  InnovationStream a(tiny_lcg()), b(tiny_lcg());
  auto block = a.next_block(5);
  for (double v : block) CHECK(v == b.next_scalar());
  CHECK_THROWS_AS(a.next_block(0), Error);
}

TEST_CASE("shift is addition mod 1 and zero shift is the identity") {
  CHECK(to_open_unit(0.9 + 0.25) == doctest::Approx(0.15).epsilon(1e-15));
  auto zero = tiny_lcg();
  zero.shift = {0.0};
  auto shifted = tiny_lcg();
  shifted.shift = {0.25};
  InnovationStream plain(tiny_lcg()), z(zero), sh(shifted);
  for (int i = 0; i < 10; ++i) {
    const double u = plain.next_scalar();
    CHECK(z.next_scalar() == u);
    const double v = sh.next_scalar();
    CHECK(v == doctest::Approx(std::fmod(u + 0.25, 1.0)).epsilon(1e-15));
  }
}

TEST_CASE("full-period lcg visits every residue once") {
  for (const auto& p : lcg_table()) {
    CAPTURE(p.modulus);
    // primitive-root check by brute force on the multiplicative order
    std::uint64_t x = p.multiplier, order = 1;
    while (x != 1) {
      x = x * p.multiplier % p.modulus;
      ++order;
    }
    CHECK(order == p.modulus - 1);

    StreamSpec s;
    s.kind = StreamKind::CudLcg;
    s.lcg = p;
    s.seed = 12345;
    InnovationStream st(s);
    std::vector<char> seen(p.modulus, 0);
    bool dup = false;
    for (std::uint64_t i = 0; i < p.period(); ++i) {
      const auto r = static_cast<std::uint64_t>(std::llround(st.next_scalar() * static_cast<double>(p.modulus)));
      REQUIRE(r >= 1);
      REQUIRE(r < p.modulus);
      dup |= seen[r] != 0;
      seen[r] = 1;
    }
    CHECK_FALSE(dup);
    CHECK_THROWS_AS(st.next_scalar(), Error);
  }
  CHECK(mulmod_pow(2, 10, 11) == 1);
}

TEST_CASE("lfsr period is 2^k - 1 by cycle detection") {
  for (const auto& p : lfsr_table()) {
    CAPTURE(p.degree);
    LfsrParams one_bit = p;
    one_bit.decimation = 1;
    detail::LfsrSequence seq(one_bit, 0);
    const std::uint64_t start = seq.window();
    std::uint64_t steps = 0;
    do {
      seq.next();
      ++steps;
    } while (seq.window() != start && steps <= p.period());
    CHECK(steps == p.period());
    CHECK(std::gcd<std::uint64_t>(p.decimation == 0 ? p.degree : p.decimation, p.period()) == 1);
  }
}

TEST_CASE("lfsr outputs visit every nonzero word once when width = degree") {
  const auto p = lfsr_table().front();
  REQUIRE(p.width == p.degree);
  StreamSpec s;
  s.kind = StreamKind::CudLfsr;
  s.lfsr = p;
  s.seed = 99;
  const auto xs = collect_scalars(s, p.period());
  std::set<double> uniq(xs.begin(), xs.end());
  CHECK(uniq.size() == p.period());
  CHECK(*uniq.begin() == std::ldexp(1.0, -static_cast<int>(p.width)));
}

TEST_CASE("tuple-complete blocks cover each cyclic tuple of one period once") {
  for (std::size_t d : {2u, 3u, 5u}) {
    CAPTURE(d);
    auto spec = tiny_lcg();
    spec.block_dim = d;
    InnovationStream st(spec);
    REQUIRE(st.capacity().value() == 10 * d);
    std::map<std::vector<double>, int> blocks;
    for (int i = 0; i < 10; ++i) ++blocks[st.next_block(d)];
    CHECK_THROWS_AS(st.next_scalar(), Error);

    const auto base = collect_scalars(tiny_lcg(), 10);
    std::map<std::vector<double>, int> cyclic;
    for (std::size_t i = 0; i < 10; ++i) {
      std::vector<double> t;
      for (std::size_t j = 0; j < d; ++j) t.push_back(base[(i + j) % 10]);
      ++cyclic[t];
    }
    CHECK(blocks == cyclic);
  }
}

TEST_CASE("exhaustion is signalled after the full period") {
  InnovationStream st(tiny_lcg());
  for (int i = 0; i < 10; ++i) st.next_scalar();
  try {
    st.next_scalar();
    FAIL("expected Exhausted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Exhausted);
  }
}

TEST_CASE("iid stream is reproducible and inside (0,1)") {
  StreamSpec s;
  s.seed = 7;
  auto a = collect_scalars(s, 10000);
  auto b = collect_scalars(s, 10000);
  CHECK(a == b);
  CHECK(std::all_of(a.begin(), a.end(), [](double u) { return u > 0.0 && u < 1.0; }));
  s.seed = 8;
  CHECK(collect_scalars(s, 10) != std::vector<double>(a.begin(), a.begin() + 10));
}

TEST_CASE("randomize") {
  const auto base = sized_cud_spec(StreamKind::CudLcg, 1000, 1, 3);
  const auto r1 = collect_scalars(randomize(base, 1), 100);
  const auto r1b = collect_scalars(randomize(base, 1), 100);
  const auto r2 = collect_scalars(randomize(base, 2), 100);
  CHECK(r1 == r1b);
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] != r2[i]);

  StreamSpec iid;
  CHECK_THROWS_AS(randomize(iid, 1), Error);

  SUBCASE("mean over a full period stays near one half") {
    const std::uint64_t n = base.lcg->period();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto xs = collect_scalars(randomize(base, seed), n);
      double sum = 0.0;
      for (double v : xs) sum += v;
      const double sigma = std::sqrt(1.0 / 12.0 / static_cast<double>(n));
      CHECK(std::abs(sum / static_cast<double>(n) - 0.5) < 3 * sigma);
    }
  }

  SUBCASE("stream overload continues from the same cursor") {
    InnovationStream s(base);
    for (int i = 0; i < 17; ++i) s.next_scalar();
    auto r = randomize(s, 5, 1);
    CHECK(r.consumed() == 17);
    const double shift = randomize(base, 5, 1).shift[0];
    const double raw = s.next_scalar();
    CHECK(r.next_scalar() == doctest::Approx(std::fmod(raw + shift, 1.0)).epsilon(1e-15));
  }
}

TEST_CASE("generator sizing picks the smallest adequate period") {
  const auto s = sized_cud_spec(StreamKind::CudLcg, 1024, 11, 0);
  REQUIRE(s.lcg);
  for (const auto& p : lcg_table()) {
    if (p.period() >= 1024) {
      CHECK(*s.lcg == p);
      break;
    }
  }
  CHECK_THROWS_AS(sized_cud_spec(StreamKind::CudLfsr, std::uint64_t{1} << 40, 1, 0), Error);
  CHECK(stream_kind_from_string("CUD_LFSR") == StreamKind::CudLfsr);
  CHECK_THROWS_AS(stream_kind_from_string("SOBOL"), Error);
}

TEST_CASE("derived seeds differ by path") {
  CHECK(derive_seed(1, {0}) != derive_seed(1, {1}));
  CHECK(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
  CHECK(derive_seed(1, {2}) == derive_seed(1, {2}));
}
