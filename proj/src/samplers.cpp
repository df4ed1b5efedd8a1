#include "mcqmc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mcqmc/error.hpp"

namespace mcqmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dims(std::size_t want_s, std::size_t want_d, ConstVec x, ConstVec u) {
  if (x.size() != want_s) {
    throw Error(ErrorKind::DimensionMismatch, "state has dimension " + std::to_string(x.size()) + ", expected " +
                                                  std::to_string(want_s));
  }
  if (u.size() != want_d) {
    throw Error(ErrorKind::DimensionMismatch, "innovation block has dimension " + std::to_string(u.size()) +
                                                  ", expected " + std::to_string(want_d));
  }
}

void accept_or_stay(ConstVec x, ConstVec y, double a, double u_last, MutVec out) {
  if (u_last <= a) std::copy(y.begin(), y.end(), out.begin());
  else std::copy(x.begin(), x.end(), out.begin());
}

}  // namespace

std::string_view to_string(UpdateKind k) noexcept {
  switch (k) {
    case UpdateKind::MetropolisHastings: return "MH";
    case UpdateKind::IndependenceMetropolis: return "MIS";
    case UpdateKind::RandomWalkMetropolis: return "RWM";
    case UpdateKind::Gibbs: return "GIBBS";
    case UpdateKind::Slice: return "SLICE";
    case UpdateKind::Custom: return "CUSTOM";
  }
  return "?";
}

void UpdateFunction::operator()(ConstVec x, ConstVec u, MutVec out) const {
  check_dims(s, d, x, u);
  if (out.size() != s) throw Error(ErrorKind::DimensionMismatch, "output buffer has the wrong dimension");
  step(x, u, out);
}

State UpdateFunction::operator()(ConstVec x, ConstVec u) const {
  State out(s);
  (*this)(x, u, out);
  return out;
}

double mh_acceptance(double log_pi_x, double log_pi_y, double log_p_y_given_x, double log_p_x_given_y) {
  if (std::isnan(log_pi_x) || std::isnan(log_pi_y) || std::isnan(log_p_y_given_x) || std::isnan(log_p_x_given_y)) {
    throw Error(ErrorKind::Numerical, "NaN in Metropolis-Hastings densities");
  }
  if (log_pi_x == kNegInf) throw Error(ErrorKind::InvalidState, "target density is zero at the current state");
  if (log_p_y_given_x == kNegInf) {
    throw Error(ErrorKind::InvalidState, "proposal density is zero at the generated proposal");
  }
  if (log_pi_y == kNegInf || log_p_x_given_y == kNegInf) return 0.0;
  const double log_a = log_pi_y + log_p_x_given_y - log_pi_x - log_p_y_given_x;
  if (std::isnan(log_a)) throw Error(ErrorKind::Numerical, "undefined Metropolis-Hastings ratio");
  return log_a >= 0.0 ? 1.0 : std::exp(log_a);
}

void mh_step(const MhSpec& spec, ConstVec x, ConstVec u, MutVec out) {
  check_dims(spec.s, spec.d, x, u);
  State y(spec.s);
  spec.propose(x, u.first(spec.d - 1), y);
  const double a = mh_acceptance(spec.log_target(x), spec.log_target(y), spec.log_proposal(y, x),
                                 spec.log_proposal(x, y));
  accept_or_stay(x, y, a, u[spec.d - 1], out);
}

void mis_step(const MisSpec& spec, ConstVec x, ConstVec u, MutVec out) {
  check_dims(spec.s, spec.d, x, u);
  State y(spec.s);
  spec.propose(u.first(spec.d - 1), y);
  const double a =
      mh_acceptance(spec.log_target(x), spec.log_target(y), spec.log_proposal(y), spec.log_proposal(x));
  accept_or_stay(x, y, a, u[spec.d - 1], out);
}

void rwm_step(const RwmSpec& spec, ConstVec x, ConstVec u, MutVec out) {
  check_dims(spec.s, spec.d, x, u);
  State y(spec.s), step(spec.s);
  spec.increment(u.first(spec.d - 1), step);
  for (std::size_t j = 0; j < spec.s; ++j) y[j] = x[j] + step[j];
  double fwd = 0.0, back = 0.0;
  if (spec.log_increment) {
    fwd = (*spec.log_increment)(step);
    for (auto& v : step) v = -v;
    back = (*spec.log_increment)(step);
  }
  const double a = mh_acceptance(spec.log_target(x), spec.log_target(y), fwd, back);
  accept_or_stay(x, y, a, u[spec.d - 1], out);
}

MhSpec as_mh(const MisSpec& spec) {
  MhSpec mh;
  mh.s = spec.s;
  mh.d = spec.d;
  mh.log_target = spec.log_target;
  mh.propose = [p = spec.propose](ConstVec, ConstVec u, MutVec y) { p(u, y); };
  mh.log_proposal = [q = spec.log_proposal](ConstVec y, ConstVec) { return q(y); };
  return mh;
}

MhSpec as_mh(const RwmSpec& spec) {
  MhSpec mh;
  mh.s = spec.s;
  mh.d = spec.d;
  mh.log_target = spec.log_target;
  mh.propose = [inc = spec.increment](ConstVec x, ConstVec u, MutVec y) {
    inc(u, y);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += x[j];
  };
  mh.log_proposal = [q = spec.log_increment](ConstVec y, ConstVec x) {
    if (!q) return 0.0;
    State diff(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) diff[j] = y[j] - x[j];
    return (*q)(diff);
  };
  return mh;
}

UpdateFunction make_update(MhSpec spec) {
  if (spec.d < 2) throw Error(ErrorKind::Config, "Metropolis-Hastings needs d >= 2");
  const std::size_t s = spec.s, d = spec.d;
  return {s, d, UpdateKind::MetropolisHastings,
          [spec = std::move(spec)](ConstVec x, ConstVec u, MutVec out) { mh_step(spec, x, u, out); }};
}

UpdateFunction make_update(MisSpec spec) {
  if (spec.d < 2) throw Error(ErrorKind::Config, "independence sampler needs d >= 2");
  const std::size_t s = spec.s, d = spec.d;
  return {s, d, UpdateKind::IndependenceMetropolis,
          [spec = std::move(spec)](ConstVec x, ConstVec u, MutVec out) { mis_step(spec, x, u, out); }};
}

UpdateFunction make_update(RwmSpec spec) {
  if (spec.d < 2) throw Error(ErrorKind::Config, "random-walk Metropolis needs d >= 2");
  const std::size_t s = spec.s, d = spec.d;
  return {s, d, UpdateKind::RandomWalkMetropolis,
          [spec = std::move(spec)](ConstVec x, ConstVec u, MutVec out) { rwm_step(spec, x, u, out); }};
}

std::size_t GibbsSpec::d() const noexcept {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.innov_dim;
  return d;
}

void gibbs_step(const GibbsSpec& spec, ConstVec x, ConstVec u, MutVec out) {
  check_dims(spec.s, spec.d(), x, u);
  std::copy(x.begin(), x.end(), out.begin());
  State block;
  std::size_t uoff = 0;
  for (const auto& b : spec.blocks) {
    block.resize(b.dim);
    b.draw(ConstVec(out.data(), out.size()), u.subspan(uoff, b.innov_dim), block);
    std::copy(block.begin(), block.end(), out.begin() + static_cast<std::ptrdiff_t>(b.offset));
    uoff += b.innov_dim;
  }
}

UpdateFunction make_update(GibbsSpec spec) {
  for (const auto& b : spec.blocks) {
    if (b.offset + b.dim > spec.s) throw Error(ErrorKind::Config, "Gibbs block exceeds the state");
  }
  const std::size_t s = spec.s, d = spec.d();
  return {s, d, UpdateKind::Gibbs,
          [spec = std::move(spec)](ConstVec x, ConstVec u, MutVec out) { gibbs_step(spec, x, u, out); }};
}

std::vector<std::pair<double, double>> default_slice_set(const SliceSpec& spec, std::size_t coord, ConstVec x,
                                                         double level) {
  const double lo = spec.lo[coord], hi = spec.hi[coord];
  State probe(x.begin(), x.end());
  auto inside = [&](double t) {
    probe[coord] = t;
    return spec.density(probe) >= level;
  };
  const std::size_t g = std::max<std::size_t>(spec.grid, 2);
  std::vector<double> ts(g);
  for (std::size_t k = 0; k < g; ++k) ts[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(g - 1);
  ts.back() = hi;
  // The current coordinate is a known member, which catches slices narrower
  // than the grid spacing.
  const double cur = x[coord];
  if (cur > lo && cur < hi) ts.insert(std::upper_bound(ts.begin(), ts.end(), cur), cur);
  std::vector<char> in(ts.size());
  bool all = true;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    in[k] = inside(ts[k]);
    all = all && in[k];
  }
  if (all) return {{lo, hi}};

  auto crossing = [&](double a, double b) {
    // a inside, b outside
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      (inside(m) ? a : b) = m;
    }
    return a;
  };
  std::vector<std::pair<double, double>> out;
  std::size_t k = 0;
  while (k < ts.size()) {
    if (!in[k]) {
      ++k;
      continue;
    }
    const double left = k == 0 ? lo : crossing(ts[k], ts[k - 1]);
    std::size_t j = k;
    while (j + 1 < ts.size() && in[j + 1]) ++j;
    const double right = j + 1 == ts.size() ? hi : crossing(ts[j], ts[j + 1]);
    out.emplace_back(left, right);
    k = j + 1;
  }
  return out;
}

void slice_step(const SliceSpec& spec, ConstVec state, ConstVec u, MutVec out) {
  const std::size_t s = spec.s();
  check_dims(s + 1, s + 1, state, u);
  ConstVec x = state.subspan(1);
  const double px = spec.density(x);
  if (std::isnan(px)) throw Error(ErrorKind::Numerical, "NaN density in slice sampler");
  if (!(state[0] >= 0.0 && state[0] <= px)) {
    throw Error(ErrorKind::InvalidState, "slice state needs 0 <= y <= pi(x)");
  }
  const double level = u[0] * px;
  State cur(x.begin(), x.end());
  for (std::size_t j = 0; j < s; ++j) {
    const auto pieces = spec.finder ? (*spec.finder)(j, cur, level) : default_slice_set(spec, j, cur, level);
    double total = 0.0;
    for (const auto& [a, b] : pieces) total += b - a;
    if (!(total > 0.0)) throw Error(ErrorKind::Numerical, "slice has zero length");
    double t = u[j + 1] * total;
    double v = pieces.back().second;
    for (const auto& [a, b] : pieces) {
      if (t <= b - a) {
        v = a + t;
        break;
      }
      t -= b - a;
    }
    // Whole-interval slices map exactly as lo + u (hi - lo), state-free.
    if (pieces.size() == 1) v = pieces[0].first + u[j + 1] * (pieces[0].second - pieces[0].first);
    cur[j] = v;
  }
  out[0] = level;
  std::copy(cur.begin(), cur.end(), out.begin() + 1);
}

UpdateFunction make_update(SliceSpec spec) {
  if (spec.lo.size() != spec.hi.size() || spec.lo.empty()) {
    throw Error(ErrorKind::Config, "slice sampler needs matching, non-empty bounds");
  }
  for (std::size_t j = 0; j < spec.lo.size(); ++j) {
    if (!(spec.lo[j] < spec.hi[j])) throw Error(ErrorKind::Config, "slice sampler box must have positive volume");
  }
  const std::size_t s = spec.s() + 1;
  return {s, s, UpdateKind::Slice,
          [spec = std::move(spec)](ConstVec x, ConstVec u, MutVec out) { slice_step(spec, x, u, out); }};
}

UpdateFunction identity_update(std::size_t s, std::size_t d) {
  return {s, d, UpdateKind::Custom, [](ConstVec x, ConstVec, MutVec out) { std::copy(x.begin(), x.end(), out.begin()); }};
}

std::vector<TestFunction> component_means(std::size_t s, const std::vector<std::string>& names) {
  std::vector<TestFunction> out;
  for (std::size_t j = 0; j < s; ++j) {
    out.push_back({j < names.size() ? names[j] : "x" + std::to_string(j + 1), [j](ConstVec x) { return x[j]; }});
  }
  return out;
}

std::optional<double> ChainRun::estimate(std::size_t fn) const {
  if (n == 0) return std::nullopt;
  return sums.at(fn) / static_cast<double>(n);
}

std::vector<double> ChainRun::estimates() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < sums.size(); ++k) out.push_back(estimate(k).value_or(std::nan("")));
  return out;
}

ChainRun run_chain(const UpdateFunction& update, ConstVec x0, InnovationStream& stream, std::size_t n,
                   const std::vector<TestFunction>& fns, const ChainOptions& opts) {
  if (x0.size() != update.s) throw Error(ErrorKind::DimensionMismatch, "x0 has the wrong dimension");
  ChainRun run;
  run.s = update.s;
  run.d = update.d;
  run.stream = stream.spec();
  for (const auto& f : fns) run.fn_ids.push_back(f.id);
  run.sums.assign(fns.size(), 0.0);
  const std::uint64_t start = stream.consumed();

  if (opts.trajectory_csv) {
    auto& os = *opts.trajectory_csv;
    os << "step";
    for (std::size_t j = 0; j < update.s; ++j) os << ",x" << j + 1;
    os << '\n';
  }
  State cur(x0.begin(), x0.end()), next(update.s), u(update.d);
  const auto old_prec = opts.trajectory_csv ? opts.trajectory_csv->precision(17) : 0;
  for (std::size_t i = 1; i <= n; ++i) {
    try {
      stream.next_block(std::span<double>(u));
      update(cur, u, next);
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + std::to_string(i) + ": " + e.detail());
    }
    cur.swap(next);
    for (std::size_t k = 0; k < fns.size(); ++k) run.sums[k] += fns[k].f(cur);
    if (opts.thin != 0 && i % opts.thin == 0) {
      run.kept_steps.push_back(i);
      run.trajectory.push_back(cur);
      if (opts.trajectory_csv) {
        auto& os = *opts.trajectory_csv;
        os << i;
        for (double v : cur) os << ',' << v;
        os << '\n';
      }
    }
  }
  if (opts.trajectory_csv) opts.trajectory_csv->precision(old_prec);
  run.n = n;
  run.final_state = std::move(cur);
  run.consumed = stream.consumed() - start;
  return run;
}

State discard_prefix(const UpdateFunction& update, ConstVec x0, InnovationStream& stream, std::size_t k) {
  State cur(x0.begin(), x0.end()), next(update.s), u(update.d);
  for (std::size_t i = 0; i < k; ++i) {
    stream.next_block(std::span<double>(u));
    update(cur, u, next);
    cur.swap(next);
  }
  return cur;
}

}  // namespace mcqmc
