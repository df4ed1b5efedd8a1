#include "mcqmc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mcqmc/error.hpp"

namespace mcqmc {

std::vector<State> rosenblatt_chentsov(const RosenblattSpec& ros, const UpdateFunction& update, ConstVec u0,
                                       const std::vector<std::vector<double>>& us) {
  if (ros.dim() != update.s) throw Error(ErrorKind::DimensionMismatch, "Rosenblatt and update state dimensions differ");
  if (u0.size() < update.s) throw Error(ErrorKind::DimensionMismatch, "u0 shorter than the state dimension");
  std::vector<State> xs;
  xs.reserve(us.size() + 1);
  xs.push_back(inverse_rosenblatt(ros, u0.first(update.s)));
  for (const auto& u : us) xs.push_back(update(xs.back(), u));
  return xs;
}

double CouplingRegion::volume() const noexcept {
  double v = 1.0;
  for (std::size_t j = 0; j < lo.size(); ++j) v *= hi[j] - lo[j];
  return v;
}

bool CouplingRegion::contains(ConstVec u) const noexcept {
  if (u.size() != lo.size()) return false;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] < lo[j] || u[j] > hi[j]) return false;
  }
  return true;
}

namespace {

void check_ratio(double kappa, double eta) {
  if (!std::isfinite(kappa)) throw Error(ErrorKind::InvalidBound, "kappa must be finite");
  if (!(eta > 0.0)) throw Error(ErrorKind::InvalidBound, "eta must be positive");
  if (eta > kappa) throw Error(ErrorKind::InvalidBound, "eta exceeds kappa");
}

template <class F>
double golden(F f, double a, double b, bool maximize) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double t) { return maximize ? -f(t) : f(t); };
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return maximize ? -std::min(gc, gd) : std::min(gc, gd);
}

}  // namespace

CouplingRegion mis_coupling_region(double kappa, double eta, std::vector<double> a, std::vector<double> b) {
  check_ratio(kappa, eta);
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "box corners differ in length");
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!(a[j] >= 0.0 && a[j] < b[j] && b[j] <= 1.0)) throw Error(ErrorKind::InvalidBound, "box must have positive volume in [0,1]");
  }
  CouplingRegion r;
  r.lo = std::move(a);
  r.hi = std::move(b);
  r.lo.push_back(0.0);
  r.hi.push_back(eta / kappa);
  r.lag = 1;
  return r;
}

CouplingRegion slice_coupling_check(const SliceSpec& spec, double eta, double kappa) {
  check_ratio(kappa, eta);
  const std::size_t s = spec.s();
  if (s == 0 || spec.hi.size() != s) throw Error(ErrorKind::DimensionMismatch, "slice box");
  // Spot-check the declared bounds on a coarse grid of about 4096 points.
  const auto per_axis = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(std::pow(4096.0, 1.0 / static_cast<double>(s)))));
  const auto ext = box_extrema([&](ConstVec x) { return spec.density(x); }, spec.lo, spec.hi, per_axis, 0.0);
  if (ext.inf < eta * (1 - 1e-9) || ext.sup > kappa * (1 + 1e-9)) {
    throw Error(ErrorKind::InvalidBound, "density leaves [eta, kappa] on the box");
  }
  CouplingRegion r;
  r.lo.assign(s + 1, 0.0);
  r.hi.assign(s + 1, 1.0);
  r.hi[0] = eta / kappa;
  r.lag = 2;
  return r;
}

Extrema box_extrema(const std::function<double(ConstVec)>& f, ConstVec lo, ConstVec hi, std::size_t grid,
                    double slack) {
  const std::size_t s = lo.size();
  if (s == 0 || hi.size() != s) throw Error(ErrorKind::DimensionMismatch, "box_extrema box");
  if (grid < 2) throw Error(ErrorKind::DomainError, "box_extrema needs at least 2 grid points");
  std::vector<std::size_t> idx(s, 0);
  std::vector<double> x(s);
  Extrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  std::size_t arg_min = 0, arg_max = 0;
  auto coord = [&](std::size_t j, std::size_t i) {
    return lo[j] + (hi[j] - lo[j]) * static_cast<double>(i) / static_cast<double>(grid - 1);
  };
  while (true) {
    for (std::size_t j = 0; j < s; ++j) x[j] = coord(j, idx[j]);
    const double v = f(x);
    if (std::isnan(v)) throw Error(ErrorKind::Numerical, "NaN while extremizing");
    if (v < e.inf) {
      e.inf = v;
      arg_min = idx[0];
    }
    if (v > e.sup) {
      e.sup = v;
      arg_max = idx[0];
    }
    std::size_t j = 0;
    while (j < s && ++idx[j] == grid) idx[j++] = 0;
    if (j == s) break;
  }
  if (s == 1) {
    auto f1 = [&](double t) {
      const double v[1] = {t};
      return f(ConstVec(v, 1));
    };
    auto cell = [&](std::size_t i) {
      return std::pair{coord(0, i == 0 ? 0 : i - 1), coord(0, std::min(grid - 1, i + 1))};
    };
    const auto [a0, b0] = cell(arg_min);
    e.inf = std::min(e.inf, golden(f1, a0, b0, false));
    const auto [a1, b1] = cell(arg_max);
    e.sup = std::max(e.sup, golden(f1, a1, b1, true));
  }
  e.inf -= slack * std::abs(e.inf);
  e.sup += slack * std::abs(e.sup);
  return e;
}

Extrema mis_weight_bounds(const MisSpec& spec, double x_lo, double x_hi, double a, double b, std::size_t grid) {
  if (spec.s != 1 || spec.d != 2) throw Error(ErrorKind::DimensionMismatch, "mis_weight_bounds is one-dimensional");
  auto weight = [&](ConstVec y) { return std::exp(spec.log_target(y) - spec.log_proposal(y)); };
  const double xl[1] = {x_lo}, xh[1] = {x_hi};
  const double kappa = box_extrema(weight, ConstVec(xl, 1), ConstVec(xh, 1), grid).sup;
  const double ul[1] = {a}, uh[1] = {b};
  const double eta = box_extrema(
                         [&](ConstVec u) {
                           double y[1];
                           spec.propose(u, MutVec(y, 1));
                           return weight(ConstVec(y, 1));
                         },
                         ConstVec(ul, 1), ConstVec(uh, 1), grid)
                         .inf;
  return {eta, kappa};
}

CouplingReport coupling_probe(const UpdateFunction& update, ConstVec x0, ConstVec x0p, InnovationStream& stream,
                              std::size_t n, const std::vector<CouplingRegion>& regions) {
  if (x0.size() != update.s || x0p.size() != update.s) throw Error(ErrorKind::DimensionMismatch, "probe start states");
  for (const auto& r : regions) {
    if (r.dim() != update.d) throw Error(ErrorKind::DimensionMismatch, "region dimension differs from d");
  }
  CouplingReport rep;
  rep.n = n;
  rep.first_hit.assign(regions.size(), std::nullopt);
  rep.hits.assign(regions.size(), 0);
  State a(x0.begin(), x0.end()), b(x0p.begin(), x0p.end()), na(update.s), nb(update.s), u(update.d);
  if (a == b) rep.merge_step = 0;
  // step index by which each pending region hit must have merged
  std::vector<std::size_t> deadlines;
  for (std::size_t i = 1; i <= n; ++i) {
    stream.next_block(std::span<double>(u));
    for (std::size_t k = 0; k < regions.size(); ++k) {
      if (regions[k].contains(u)) {
        ++rep.hits[k];
        if (!rep.first_hit[k]) rep.first_hit[k] = i;
        deadlines.push_back(i + regions[k].lag - 1);
      }
    }
    update(a, u, na);
    update(b, u, nb);
    a.swap(na);
    b.swap(nb);
    const bool equal = a == b;
    if (equal && !rep.merge_step) rep.merge_step = i;
    if (!equal && rep.merge_step) rep.post_merge_equal = false;
    for (auto dl : deadlines) {
      if (dl == i && !equal) rep.region_sound = false;
    }
    std::erase_if(deadlines, [i](std::size_t dl) { return dl <= i; });
  }
  return rep;
}

double euclidean(ConstVec a, ConstVec b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

namespace {

std::pair<double, double> mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1) / n)};
}

}  // namespace

ContractionReport contraction_probe(const UpdateFunction& update, const Metric& metric, std::string metric_id,
                                    ConstVec x, ConstVec x_hat, InnovationStream& stream, std::size_t m_max,
                                    std::size_t reps, const ContractionOptions& opts) {
  if (m_max == 0 || reps == 0) throw Error(ErrorKind::DomainError, "contraction_probe needs m >= 1 and reps >= 1");
  if (x.size() != update.s || x_hat.size() != update.s) throw Error(ErrorKind::DimensionMismatch, "probe states");
  ContractionReport rep;
  rep.metric_id = std::move(metric_id);
  State u(update.d), a(update.s), b(update.s);

  const std::size_t pairs = opts.pair_sampler ? std::max<std::size_t>(1, opts.pairs_per_u) : 1;
  std::uint64_t pair_index = 0;
  std::vector<double> logs, powers;
  for (std::size_t r = 0; r < reps; ++r) {
    stream.next_block(std::span<double>(u));
    double ell = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      State p, q;
      if (opts.pair_sampler) {
        std::tie(p, q) = opts.pair_sampler(pair_index++);
      } else {
        p.assign(x.begin(), x.end());
        q.assign(x_hat.begin(), x_hat.end());
      }
      const double d0 = metric(p, q);
      if (!(d0 > 0.0)) continue;
      update(p, u, a);
      update(q, u, b);
      ell = std::max(ell, metric(a, b) / d0);
    }
    rep.ell.push_back(ell);
    logs.push_back(std::log(ell));
    powers.push_back(std::pow(ell, opts.moment));
  }
  rep.immediate_coupling = std::all_of(rep.ell.begin(), rep.ell.end(), [](double l) { return l == 0.0; });
  if (std::any_of(rep.ell.begin(), rep.ell.end(), [](double l) { return l == 0.0; })) {
    rep.mean_log_ell = -std::numeric_limits<double>::infinity();
    rep.se_log_ell = 0.0;
  } else {
    std::tie(rep.mean_log_ell, rep.se_log_ell) = mean_se(logs);
  }
  std::tie(rep.moment_estimate, rep.moment_se) = mean_se(powers);
  rep.gamma = opts.gamma ? *opts.gamma : std::exp(rep.mean_log_ell / 2.0);
  rep.degenerate = rep.gamma >= 1.0;

  std::vector<std::size_t> hits(m_max, 0);
  for (std::size_t r = 0; r < reps; ++r) {
    State p(x.begin(), x.end()), q(x_hat.begin(), x_hat.end());
    double threshold = 1.0;
    for (std::size_t m = 0; m < m_max; ++m) {
      stream.next_block(std::span<double>(u));
      update(p, u, a);
      update(q, u, b);
      p.swap(a);
      q.swap(b);
      threshold *= rep.gamma;
      if (metric(p, q) > threshold) ++hits[m];
    }
  }
  for (std::size_t m = 0; m < m_max; ++m) {
    const double rate = static_cast<double>(hits[m]) / static_cast<double>(reps);
    rep.bm_rate.push_back(rate);
    rep.bm_se.push_back(std::sqrt(rate * (1 - rate) / static_cast<double>(reps)));
  }
  return rep;
}

std::vector<ProbeRow> probe_rows(const std::string& probe_id, const ContractionReport& rep) {
  std::vector<ProbeRow> rows;
  rows.push_back({probe_id, "mean_log_ell", 1, rep.mean_log_ell, rep.se_log_ell});
  rows.push_back({probe_id, "ell_moment", 1, rep.moment_estimate, rep.moment_se});
  rows.push_back({probe_id, "gamma", 1, rep.gamma, 0.0});
  for (std::size_t m = 0; m < rep.bm_rate.size(); ++m) {
    rows.push_back({probe_id, "bm_volume", m + 1, rep.bm_rate[m], rep.bm_se[m]});
  }
  return rows;
}

void write_probe_csv_header(std::ostream& os) { os << "probe_id,quantity,m,estimate,standard_error\n"; }

void write_probe_csv_rows(std::ostream& os, const std::vector<ProbeRow>& rows) {
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.probe_id << ',' << r.quantity << ',' << r.m << ',' << r.estimate << ',' << r.standard_error << '\n';
  }
  os.precision(old);
}

}  // namespace mcqmc
