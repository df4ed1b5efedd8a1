// Picks the built-in CUD generator parameters.
//
// LCG: over the primitive roots of each modulus, minimise the weighted P2
// criterion of the Korobov lattice with generator (1, a, ..., a^{D-1}); its
// points are exactly the cyclic D-tuples of one period (plus the origin).
// LFSR: over decimations coprime to the period, minimise the total shortfall
// from maximal d-dimensional equidistribution, d = 1..D.
//
// Usage: search_generators [max_dim] [root_sample_limit]

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>
#include <vector>

#include "mcqmc/discrepancy.hpp"
#include "mcqmc/streams.hpp"

using namespace mcqmc;

namespace {

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> f;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      f.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) f.push_back(n);
  return f;
}

bool is_primitive_root(std::uint64_t a, std::uint64_t m, const std::vector<std::uint64_t>& factors) {
  for (auto q : factors) {
    if (powmod(a, (m - 1) / q, m) == 1) return false;
  }
  return true;
}

double p2_korobov(std::uint64_t m, std::uint64_t a, int dims, double gamma) {
  std::vector<std::uint64_t> z(dims);
  z[0] = 1;
  for (int j = 1; j < dims; ++j) z[j] = z[j - 1] * a % m;
  const double c = 2.0 * M_PI * M_PI * gamma;
  const double inv_m = 1.0 / static_cast<double>(m);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < m; ++k) {
    double prod = 1.0;
    for (int j = 0; j < dims; ++j) {
      const double x = static_cast<double>(k * z[j] % m) * inv_m;
      prod *= 1.0 + c * (x * x - x + 1.0 / 6.0);
    }
    sum += prod;
  }
  return sum * inv_m - 1.0;
}

double exact_2d_star(const std::vector<double>& period) {
  std::vector<double> cyc(period);
  cyc.push_back(period.front());
  return star_discrepancy_grid(overlapping_tuples(cyc, 2));
}

void search_lcg(std::uint64_t m, int dims, std::size_t limit) {
  const auto factors = prime_factors(m - 1);
  std::vector<std::uint64_t> roots;
  for (std::uint64_t a = 2; a < m; ++a) {
    if (is_primitive_root(a, m, factors)) roots.push_back(a);
  }
  const std::size_t total = roots.size();
  if (roots.size() > limit) {
    std::mt19937_64 rng(m);
    std::shuffle(roots.begin(), roots.end(), rng);
    roots.resize(limit);
  }
  double best = INFINITY;
  std::uint64_t best_a = 0;
  for (auto a : roots) {
    const double v = p2_korobov(m, a, dims, 0.5);
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  double d2 = NAN;
  if (m <= 20000) {
    StreamSpec s;
    s.kind = StreamKind::CudLcg;
    s.lcg = LcgParams{m, best_a};
    d2 = exact_2d_star(collect_scalars(s, m - 1));
  }
  std::printf("LCG m=%llu a=%llu  roots=%zu searched=%zu  P2=%.6g  D2*=%.6g\n",
              static_cast<unsigned long long>(m), static_cast<unsigned long long>(best_a), total,
              roots.size(), best, d2);
}

// Shortfall of the cyclic d-tuples from maximal equidistribution at
// resolution min(width, floor(k/d)), summed over d.
int equidistribution_gap(const std::vector<std::uint64_t>& words, unsigned k, unsigned width, int dims) {
  const std::size_t n = words.size();
  int gap = 0;
  std::vector<std::uint32_t> counts;
  for (int d = 1; d <= dims; ++d) {
    const unsigned lmax = std::min<unsigned>(width, k / d);
    unsigned l = lmax;
    for (; l > 0; --l) {
      const unsigned cells_bits = l * d;
      counts.assign(std::size_t{1} << cells_bits, 0);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t cell = 0;
        for (int j = 0; j < d; ++j) cell = (cell << l) | (words[(i + j) % n] >> (width - l));
        ++counts[cell];
      }
      const std::uint32_t expect = static_cast<std::uint32_t>(std::size_t{1} << (k - cells_bits));
      const bool ok = std::all_of(counts.begin(), counts.end(),
                                  [&](std::uint32_t c) { return c == expect || c + 1 == expect; });
      if (ok) break;
    }
    gap += static_cast<int>(lmax - l);
  }
  return gap;
}

void search_lfsr(const LfsrParams& base, int dims) {
  const std::uint64_t period = base.period();
  int best_gap = 1 << 30;
  double best_d2 = INFINITY;
  unsigned best_s = 0;
  for (unsigned s = base.degree; s <= 3 * base.degree; ++s) {
    if (std::gcd<std::uint64_t>(s, period) != 1) continue;
    LfsrParams p = base;
    p.decimation = s;
    detail::LfsrSequence seq(p, 0);
    std::vector<std::uint64_t> words(period);
    std::vector<double> vals(period);
    for (auto& w : words) {
      const double v = seq.next();
      w = static_cast<std::uint64_t>(std::ldexp(v, static_cast<int>(p.width)));
    }
    const int gap = equidistribution_gap(words, p.degree, p.width, dims);
    if (gap > best_gap) continue;
    double d2 = 0.0;
    if (p.degree <= 14) {
      for (std::size_t i = 0; i < period; ++i) vals[i] = std::ldexp(static_cast<double>(words[i]), -static_cast<int>(p.width));
      for (auto& v : vals) v = v == 0.0 ? 0x1.0p-1074 : v;
      d2 = exact_2d_star(vals);
    }
    if (gap < best_gap || d2 < best_d2) {
      best_gap = gap;
      best_d2 = d2;
      best_s = s;
    }
  }
  std::printf("LFSR k=%u taps=0x%llx w=%u s=%u  gap=%d  D2*=%.6g\n", base.degree,
              static_cast<unsigned long long>(base.taps), base.width, best_s, best_gap, best_d2);
}

}  // namespace

int main(int argc, char** argv) {
  const int dims = argc > 1 ? std::atoi(argv[1]) : 12;
  const std::size_t limit = argc > 2 ? static_cast<std::size_t>(std::atoll(argv[2])) : 2000;
  for (const auto& p : lcg_table()) search_lcg(p.modulus, dims, limit);
  for (const auto& p : lfsr_table()) search_lfsr(p, dims);
  return 0;
}
