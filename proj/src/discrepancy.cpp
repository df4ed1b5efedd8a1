#include "mcqmc/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "mcqmc/error.hpp"

namespace mcqmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Exact enumeration of critical corners.
//
// For the closed side we maximise #{x <= a}/n - vol(a); for the open side
// vol(a) - #{x < a}/n. Within a subset already filtered on the higher
// coordinates, the closed optimum sits at a point coordinate and the open one
// at a point coordinate or at 1, so each level only scans its own subset.

double scan_1d(const std::vector<double>& sorted, double scale, std::size_t n, bool closed) {
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t m = sorted.size();
  double best = kNegInf;
  if (closed) {
    for (std::size_t i = 0; i < m; ++i) {
      if (i + 1 == m || sorted[i + 1] != sorted[i]) {
        best = std::max(best, static_cast<double>(i + 1) * inv_n - scale * sorted[i]);
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      if (i == 0 || sorted[i - 1] != sorted[i]) {
        best = std::max(best, scale * sorted[i] - static_cast<double>(i) * inv_n);
      }
    }
    best = std::max(best, scale - static_cast<double>(m) * inv_n);
  }
  return best;
}

double grid_level(const PointSet& ps, std::vector<std::size_t> subset, std::size_t k, double scale,
                  bool closed) {
  const std::size_t n = ps.size();
  if (k == 1) {
    std::vector<double> xs;
    xs.reserve(subset.size());
    for (auto i : subset) xs.push_back(ps.coord(i, 0));
    std::sort(xs.begin(), xs.end());
    return scan_1d(xs, scale, n, closed);
  }
  const std::size_t axis = k - 1;
  std::sort(subset.begin(), subset.end(), [&](std::size_t a, std::size_t b) {
    return ps.coord(a, axis) < ps.coord(b, axis);
  });
  double best = kNegInf;
  const std::size_t m = subset.size();

  if (k == 2) {
    // Grow the prefix and keep its first coordinates sorted incrementally.
    std::vector<double> sorted;
    sorted.reserve(m);
    std::size_t i = 0;
    while (i < m) {
      const double t = ps.coord(subset[i], axis);
      std::size_t j = i;
      while (j < m && ps.coord(subset[j], axis) == t) ++j;
      if (!closed) best = std::max(best, scan_1d(sorted, scale * t, n, false));
      for (std::size_t q = i; q < j; ++q) {
        const double v = ps.coord(subset[q], 0);
        sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), v), v);
      }
      if (closed) best = std::max(best, scan_1d(sorted, scale * t, n, true));
      i = j;
    }
    if (!closed) best = std::max(best, scan_1d(sorted, scale, n, false));
    return best;
  }

  std::size_t i = 0;
  while (i < m) {
    const double t = ps.coord(subset[i], axis);
    std::size_t j = i;
    while (j < m && ps.coord(subset[j], axis) == t) ++j;
    if (!closed) {
      best = std::max(best, grid_level(ps, std::vector<std::size_t>(subset.begin(), subset.begin() + i),
                                       k - 1, scale * t, false));
    } else {
      best = std::max(best, grid_level(ps, std::vector<std::size_t>(subset.begin(), subset.begin() + j),
                                       k - 1, scale * t, true));
    }
    i = j;
  }
  if (!closed) best = std::max(best, grid_level(ps, subset, k - 1, scale, false));
  return best;
}

// ---------------------------------------------------------------------------
// Offline dominance counting for the estimator.
//
// Coordinates become integer ranks: a point with the i-th smallest distinct
// value gets 2i+1; a query gets 2c where c counts distinct point values below
// it (open) or at most it (closed). Then "point inside box" is a strict rank
// comparison on every axis and points never tie with queries.

struct Item {
  std::uint32_t r[3];
  std::int32_t query;  // -1 for a point, else query index
};

class Fenwick {
 public:
  explicit Fenwick(std::size_t size) : tree_(size + 1, 0) {}
  void add(std::size_t pos, std::int32_t v) {
    for (++pos; pos < tree_.size(); pos += pos & (~pos + 1)) tree_[pos] += v;
  }
  // Sum over positions < pos.
  std::int64_t prefix(std::size_t pos) const {
    std::int64_t s = 0;
    for (; pos > 0; pos -= pos & (~pos + 1)) s += tree_[pos];
    return s;
  }

 private:
  std::vector<std::int32_t> tree_;
};

struct Query {
  std::vector<double> corner;
  bool closed;
};

void cdq(std::vector<Item>& items, std::size_t lo, std::size_t hi, Fenwick& bit,
         std::vector<std::int64_t>& counts, std::vector<Item>& scratch) {
  if (hi - lo < 2) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  cdq(items, lo, mid, bit, counts, scratch);
  cdq(items, mid, hi, bit, counts, scratch);
  // Both halves are now sorted by r[1]; left points dominate right queries on
  // axis 0 by construction.
  std::size_t p = lo;
  std::vector<std::uint32_t> added;
  for (std::size_t q = mid; q < hi; ++q) {
    if (items[q].query < 0) continue;
    while (p < mid && items[p].r[1] < items[q].r[1]) {
      if (items[p].query < 0) {
        bit.add(items[p].r[2], 1);
        added.push_back(items[p].r[2]);
      }
      ++p;
    }
    counts[static_cast<std::size_t>(items[q].query)] += bit.prefix(items[q].r[2]);
  }
  for (auto r : added) bit.add(r, -1);
  std::merge(items.begin() + lo, items.begin() + mid, items.begin() + mid, items.begin() + hi,
             scratch.begin() + lo, [](const Item& a, const Item& b) { return a.r[1] < b.r[1]; });
  std::copy(scratch.begin() + lo, scratch.begin() + hi, items.begin() + lo);
}

std::vector<std::int64_t> dominance_counts(const PointSet& ps, const std::vector<Query>& queries) {
  const std::size_t n = ps.size();
  const std::size_t d = ps.dim();
  std::vector<std::int64_t> counts(queries.size(), 0);
  if (d > 3) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const auto& c = queries[q].corner;
      std::int64_t cnt = 0;
      for (std::size_t i = 0; i < n; ++i) {
        bool in = true;
        for (std::size_t j = 0; j < d && in; ++j) {
          const double x = ps.coord(i, j);
          in = queries[q].closed ? (x <= c[j]) : (x < c[j]);
        }
        cnt += in;
      }
      counts[q] = cnt;
    }
    return counts;
  }

  std::vector<std::vector<double>> uniq(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& u = uniq[j];
    u.reserve(n);
    for (std::size_t i = 0; i < n; ++i) u.push_back(ps.coord(i, j));
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
  }
  std::vector<Item> items;
  items.reserve(n + queries.size());
  for (std::size_t i = 0; i < n; ++i) {
    Item it{{0, 0, 0}, -1};
    for (std::size_t j = 0; j < d; ++j) {
      const auto& u = uniq[j];
      it.r[j] = static_cast<std::uint32_t>(2 * (std::lower_bound(u.begin(), u.end(), ps.coord(i, j)) - u.begin()) + 1);
    }
    items.push_back(it);
  }
  for (std::size_t q = 0; q < queries.size(); ++q) {
    Item it{{0, 0, 0}, static_cast<std::int32_t>(q)};
    for (std::size_t j = 0; j < d; ++j) {
      const auto& u = uniq[j];
      const double c = queries[q].corner[j];
      const auto pos = queries[q].closed ? std::upper_bound(u.begin(), u.end(), c)
                                         : std::lower_bound(u.begin(), u.end(), c);
      it.r[j] = static_cast<std::uint32_t>(2 * (pos - u.begin()));
    }
    items.push_back(it);
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.r[0] < b.r[0]; });

  if (d == 1) {
    std::int64_t seen = 0;
    for (const auto& it : items) {
      if (it.query < 0) ++seen;
      else counts[static_cast<std::size_t>(it.query)] = seen;
    }
    return counts;
  }
  if (d == 2) {
    Fenwick bit(2 * uniq[1].size() + 2);
    for (const auto& it : items) {
      if (it.query < 0) bit.add(it.r[1], 1);
      else counts[static_cast<std::size_t>(it.query)] = bit.prefix(it.r[1]);
    }
    return counts;
  }
  Fenwick bit(2 * uniq[2].size() + 2);
  std::vector<Item> scratch(items.size());
  cdq(items, 0, items.size(), bit, counts, scratch);
  return counts;
}

double box_volume(std::span<const double> corner) {
  double v = 1.0;
  for (double c : corner) v *= c;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw Error(ErrorKind::DimensionMismatch, "point dimension must be >= 1");
  if (coords_.empty() || coords_.size() % dim_ != 0) {
    throw Error(ErrorKind::DimensionMismatch, "point set needs n >= 1 complete points");
  }
  for (double c : coords_) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::DomainError, "point coordinates must lie in [0,1]");
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorKind::DimensionMismatch, "point set needs n >= 1");
  const std::size_t d = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw Error(ErrorKind::DimensionMismatch, "ragged point rows");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointSet(d, std::move(coords));
}

std::string_view to_string(DiscrepancyMethod m) noexcept {
  switch (m) {
    case DiscrepancyMethod::Exact1D: return "EXACT_1D";
    case DiscrepancyMethod::ExactGrid: return "EXACT_GRID";
    case DiscrepancyMethod::SupEstimate: return "SUP_ESTIMATE";
  }
  return "?";
}

std::string_view to_string(WindowKind w) noexcept {
  return w == WindowKind::Overlapping ? "overlapping" : "nonoverlapping";
}

double local_discrepancy(const PointSet& ps, std::span<const double> anchor) {
  if (anchor.size() != ps.dim()) throw Error(ErrorKind::DimensionMismatch, "anchor dimension differs from point set");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bool in = true;
    for (std::size_t j = 0; j < ps.dim() && in; ++j) in = ps.coord(i, j) < anchor[j];
    inside += in;
  }
  return static_cast<double>(inside) / static_cast<double>(ps.size()) - box_volume(anchor);
}

double star_discrepancy_1d(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorKind::TooShort, "empty sample");
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double best = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    best = std::max({best, k / n - s[i], s[i] - (k - 1.0) / n});
  }
  return best;
}

double star_discrepancy_grid(const PointSet& ps) {
  std::vector<std::size_t> all(ps.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double closed = grid_level(ps, all, ps.dim(), 1.0, true);
  const double open = grid_level(ps, all, ps.dim(), 1.0, false);
  return std::max({0.0, closed, open});
}

double star_discrepancy_estimate(const PointSet& ps, std::size_t anchors, std::uint64_t seed) {
  const std::size_t n = ps.size();
  const std::size_t d = ps.dim();
  std::vector<std::vector<double>> axis_values(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& v = axis_values[j];
    v.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) v.push_back(ps.coord(i, j));
    v.push_back(1.0);
  }
  std::vector<Query> queries;
  queries.reserve(2 * (n + anchors));
  for (std::size_t i = 0; i < n; ++i) {
    auto p = ps.point(i);
    queries.push_back({std::vector<double>(p.begin(), p.end()), true});
    queries.push_back({std::vector<double>(p.begin(), p.end()), false});
  }
  std::mt19937_64 rng(seed);
  for (std::size_t a = 0; a < anchors; ++a) {
    std::vector<double> c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = axis_values[j][rng() % axis_values[j].size()];
    queries.push_back({c, true});
    queries.push_back({std::move(c), false});
  }
  const auto counts = dominance_counts(ps, queries);
  const double inv_n = 1.0 / static_cast<double>(n);
  double best = 0.0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const double vol = box_volume(queries[q].corner);
    const double frac = static_cast<double>(counts[q]) * inv_n;
    best = std::max(best, queries[q].closed ? frac - vol : vol - frac);
  }
  return best;
}

DiscrepancyMethod planned_method(std::size_t n, std::size_t d, const StarOptions& opts) {
  if (d == 1 && !opts.force_grid) return DiscrepancyMethod::Exact1D;
  const double corners = std::pow(static_cast<double>(n), static_cast<double>(d));
  if (d == 1 || corners <= opts.exact_budget) return DiscrepancyMethod::ExactGrid;
  if (!opts.allow_estimate) {
    throw Error(ErrorKind::BudgetExceeded, "exact star discrepancy needs " + std::to_string(corners) +
                                               " corners, budget is " + std::to_string(opts.exact_budget));
  }
  return DiscrepancyMethod::SupEstimate;
}

DiscrepancyReport star_discrepancy(const PointSet& ps, const StarOptions& opts) {
  DiscrepancyReport r;
  r.n = ps.size();
  r.d = ps.dim();
  r.method = planned_method(r.n, r.d, opts);
  if (r.method == DiscrepancyMethod::Exact1D) {
    std::vector<double> xs(ps.coords().begin(), ps.coords().end());
    r.star = star_discrepancy_1d(xs);
    return r;
  }
  if (r.method == DiscrepancyMethod::ExactGrid) {
    r.star = star_discrepancy_grid(ps);
    return r;
  }
  r.star = star_discrepancy_estimate(ps, opts.sampled_anchors, opts.anchor_seed);
  r.exact = false;
  return r;
}

PointSet overlapping_tuples(std::span<const double> scalars, std::size_t d) {
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "tuple dimension must be >= 1");
  if (scalars.size() < d) throw Error(ErrorKind::TooShort, "need at least d scalars for one window");
  const std::size_t n = scalars.size() - d + 1;
  std::vector<double> coords;
  coords.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) coords.insert(coords.end(), scalars.begin() + i, scalars.begin() + i + d);
  return PointSet(d, std::move(coords));
}

PointSet nonoverlapping_tuples(std::span<const double> scalars, std::size_t d) {
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "tuple dimension must be >= 1");
  if (scalars.size() < d) throw Error(ErrorKind::TooShort, "need at least d scalars for one block");
  const std::size_t n = scalars.size() / d;
  return PointSet(d, std::vector<double>(scalars.begin(), scalars.begin() + n * d));
}

namespace {

std::vector<CudDiagnosticRow> diagnose(std::span<const double> scalars, std::size_t n, std::size_t d,
                                       const StarOptions& opts) {
  std::vector<CudDiagnosticRow> rows;
  auto over = overlapping_tuples(scalars.first(n + d - 1), d);
  rows.push_back({WindowKind::Overlapping, star_discrepancy(over, opts)});
  auto non = nonoverlapping_tuples(scalars.first(n * d), d);
  rows.push_back({WindowKind::Nonoverlapping, star_discrepancy(non, opts)});
  return rows;
}

}  // namespace

std::vector<CudDiagnosticRow> cud_diagnostic(const StreamSpec& spec, std::span<const std::size_t> n_list,
                                             std::span<const std::size_t> d_list, const StarOptions& opts) {
  std::vector<CudDiagnosticRow> out;
  for (std::size_t n : n_list) {
    for (std::size_t d : d_list) {
      if (n == 0 || d == 0) throw Error(ErrorKind::DimensionMismatch, "n and d must be >= 1");
      StreamSpec s = spec;
      s.block_dim = d;
      const auto scalars = collect_scalars(s, n * d);
      auto rows = diagnose(scalars, n, d, opts);
      out.insert(out.end(), rows.begin(), rows.end());
    }
  }
  return out;
}

std::vector<double> iid_star_samples(std::size_t n, std::size_t d, WindowKind window, std::size_t replicates,
                                     std::uint64_t seed, const StarOptions& opts) {
  std::vector<double> out;
  out.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    StreamSpec s;
    s.kind = StreamKind::Iid;
    s.seed = derive_seed(seed, {n, d, r});
    const std::size_t len = window == WindowKind::Overlapping ? n + d - 1 : n * d;
    const auto scalars = collect_scalars(s, len);
    const PointSet ps = window == WindowKind::Overlapping ? overlapping_tuples(scalars, d)
                                                         : nonoverlapping_tuples(scalars, d);
    out.push_back(star_discrepancy(ps, opts).star);
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::TooShort, "median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  return m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

void write_discrepancy_csv_header(std::ostream& os) { os << "stream,n,d,window_kind,star,method\n"; }

void write_discrepancy_csv_rows(std::ostream& os, std::string_view stream_label,
                                const std::vector<CudDiagnosticRow>& rows) {
  const auto old_prec = os.precision(17);
  for (const auto& r : rows) {
    os << stream_label << ',' << r.report.n << ',' << r.report.d << ',' << to_string(r.window) << ','
       << r.report.star << ',' << to_string(r.report.method) << '\n';
  }
  os.precision(old_prec);
}

}  // namespace mcqmc
