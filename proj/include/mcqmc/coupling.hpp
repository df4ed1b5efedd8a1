#pragma once

// Coupling regions, exact-merge probes and contraction estimates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcqmc/generators.hpp"
#include "mcqmc/samplers.hpp"

namespace mcqmc {

/// x_0 = inverse Rosenblatt of u0[0..s), x_i = phi(x_{i-1}, us[i-1]).
std::vector<State> rosenblatt_chentsov(const RosenblattSpec& ros, const UpdateFunction& update, ConstVec u0,
                                       const std::vector<std::vector<double>>& us);

/// Box of innovation blocks that forces chains together: any two states fed
/// a block inside it agree (bitwise) `lag` steps later.
struct CouplingRegion {
  std::vector<double> lo, hi;
  std::size_t lag = 1;

  std::size_t dim() const noexcept { return lo.size(); }
  double volume() const noexcept;
  bool contains(ConstVec u) const noexcept;
};

/// [a,b] x [0, eta/kappa] with lag 1, for an independence sampler whose
/// weight pi/p is at most kappa everywhere and at least eta on psi([a,b]).
/// Throws InvalidBound unless 0 < eta <= kappa < inf and a < b.
CouplingRegion mis_coupling_region(double kappa, double eta, std::vector<double> a, std::vector<double> b);

/// [0, eta/kappa] x (0,1)^s with lag 2, for the inversive slice sampler on a
/// density with eta <= pi <= kappa over its box. Throws InvalidBound.
CouplingRegion slice_coupling_check(const SliceSpec& spec, double eta, double kappa);

struct Extrema {
  double inf = 0.0;
  double sup = 0.0;
};

/// inf and sup of f over the box [lo, hi] by a tensor grid (`grid` points
/// per axis); in one dimension the best grid cells are refined by golden
/// section. The result is widened by a relative `slack` so that a bound used
/// for a region stays on the safe side of rounding.
Extrema box_extrema(const std::function<double(ConstVec)>& f, ConstVec lo, ConstVec hi, std::size_t grid = 2001,
                    double slack = 1e-9);

/// kappa = sup of pi/p over [x_lo, x_hi], eta = inf of pi(psi(u))/p(psi(u))
/// over u in [a, b], for a one-dimensional independence sampler.
Extrema mis_weight_bounds(const MisSpec& spec, double x_lo, double x_hi, double a, double b,
                          std::size_t grid = 2001);

struct CouplingReport {
  std::size_t n = 0;
  /// First step i with x_i == x'_i bitwise (0 when the starts coincide).
  std::optional<std::size_t> merge_step;
  /// Per region: first step whose block fell inside, and hit counts.
  std::vector<std::optional<std::size_t>> first_hit;
  std::vector<std::size_t> hits;
  /// States stayed bitwise equal from merge_step to n.
  bool post_merge_equal = true;
  /// Every region hit was followed by a merge within the region's lag.
  bool region_sound = true;

  double hit_fraction(std::size_t region) const { return n ? static_cast<double>(hits.at(region)) / n : 0.0; }
};

/// Runs two chains from x0 and x0p on the same innovations for n steps.
CouplingReport coupling_probe(const UpdateFunction& update, ConstVec x0, ConstVec x0p, InnovationStream& stream,
                              std::size_t n, const std::vector<CouplingRegion>& regions = {});

using Metric = std::function<double(ConstVec, ConstVec)>;
double euclidean(ConstVec a, ConstVec b);

struct ContractionOptions {
  /// Source of state pairs for the sup in l(u). Without one the probe uses
  /// the single pair (x, x_hat).
  std::function<std::pair<State, State>(std::uint64_t k)> pair_sampler;
  std::size_t pairs_per_u = 64;
  /// Moment order for E[l(u)^p].
  double moment = 1.0;
  /// Overrides exp(E[log l]/2) when set.
  std::optional<double> gamma;
};

struct ContractionReport {
  std::string metric_id;
  std::vector<double> ell;  // per sampled u, a lower bound on the true sup
  double mean_log_ell = 0.0;
  double se_log_ell = 0.0;
  double moment_estimate = 0.0;  // mean of l^p
  double moment_se = 0.0;
  double gamma = 1.0;
  /// Every sampled l(u) was zero: the update ignores the state.
  bool immediate_coupling = false;
  /// gamma >= 1 means the B_m threshold cannot shrink: no contraction seen.
  bool degenerate = false;
  bool contracting() const noexcept { return mean_log_ell < 0.0; }
  /// hit rate of B_m(x, x_hat) and its binomial standard error, m = 1..M
  std::vector<double> bm_rate, bm_se;
};

/// Estimates E[log l(u)] from `reps` blocks and the volume of
/// B_m(x, x_hat) = {v : d(phi_m(x, v), phi_m(x_hat, v)) > gamma^m} for
/// m = 1..m_max from another `reps` runs of m_max blocks each.
ContractionReport contraction_probe(const UpdateFunction& update, const Metric& metric, std::string metric_id,
                                    ConstVec x, ConstVec x_hat, InnovationStream& stream, std::size_t m_max,
                                    std::size_t reps, const ContractionOptions& opts = {});

struct ProbeRow {
  std::string probe_id;
  std::string quantity;
  std::size_t m = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// mean_log_ell, ell_moment and gamma rows (m = 1), then bm_volume per m.
std::vector<ProbeRow> probe_rows(const std::string& probe_id, const ContractionReport& rep);

/// Header: probe_id,quantity,m,estimate,standard_error
void write_probe_csv_header(std::ostream& os);
void write_probe_csv_rows(std::ostream& os, const std::vector<ProbeRow>& rows);

}  // namespace mcqmc
