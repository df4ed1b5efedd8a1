#pragma once

// Update functions x' = phi(x, u) and the chain runner.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcqmc/streams.hpp"

namespace mcqmc {

using State = std::vector<double>;
using ConstVec = std::span<const double>;
using MutVec = std::span<double>;

enum class UpdateKind { MetropolisHastings, IndependenceMetropolis, RandomWalkMetropolis, Gibbs, Slice, Custom };
std::string_view to_string(UpdateKind k) noexcept;

/// Writes phi(x, u) into out. out never aliases x.
using StepFn = std::function<void(ConstVec x, ConstVec u, MutVec out)>;

struct UpdateFunction {
  std::size_t s = 0;  // state dimension
  std::size_t d = 0;  // uniforms consumed per step
  UpdateKind kind = UpdateKind::Custom;
  StepFn step;

  void operator()(ConstVec x, ConstVec u, MutVec out) const;
  State operator()(ConstVec x, ConstVec u) const;
};

using LogDensity = std::function<double(ConstVec x)>;

/// Generic Metropolis-Hastings. u[0..d-2] drive the proposal, u[d-1] the
/// accept test.
struct MhSpec {
  std::size_t s = 0;
  std::size_t d = 0;
  LogDensity log_target;
  /// y = psi_x(u_{1:d-1})
  std::function<void(ConstVec x, ConstVec u, MutVec y)> propose;
  /// log p(y | x)
  std::function<double(ConstVec y, ConstVec x)> log_proposal;
};

/// Proposal ignores the current state: y = psi(u_{1:d-1}) with density p(y).
struct MisSpec {
  std::size_t s = 0;
  std::size_t d = 0;
  LogDensity log_target;
  std::function<void(ConstVec u, MutVec y)> propose;
  LogDensity log_proposal;
};

/// y = x + psi(u_{1:d-1}). With no increment density the increment law is
/// taken as symmetric and the proposal densities cancel.
struct RwmSpec {
  std::size_t s = 0;
  std::size_t d = 0;
  LogDensity log_target;
  std::function<void(ConstVec u, MutVec step)> increment;
  std::optional<LogDensity> log_increment;
};

/// Acceptance probability min(1, pi(y) p(x|y) / (pi(x) p(y|x))), computed in
/// log space. Throws InvalidState if pi(x) = 0 or p(y|x) = 0, Numerical on NaN.
double mh_acceptance(double log_pi_x, double log_pi_y, double log_p_y_given_x, double log_p_x_given_y);

void mh_step(const MhSpec& spec, ConstVec x, ConstVec u, MutVec out);
void mis_step(const MisSpec& spec, ConstVec x, ConstVec u, MutVec out);
void rwm_step(const RwmSpec& spec, ConstVec x, ConstVec u, MutVec out);

MhSpec as_mh(const MisSpec& spec);
MhSpec as_mh(const RwmSpec& spec);

UpdateFunction make_update(MhSpec spec);
UpdateFunction make_update(MisSpec spec);
UpdateFunction make_update(RwmSpec spec);

/// One block of a systematic scan: draws x[offset .. offset+dim) from its full
/// conditional given the current mixed state, consuming `innov_dim` uniforms.
struct GibbsBlock {
  std::size_t offset = 0;
  std::size_t dim = 1;
  std::size_t innov_dim = 1;
  std::function<void(ConstVec x, ConstVec u, MutVec block_out)> draw;
};

struct GibbsSpec {
  std::size_t s = 0;
  std::vector<GibbsBlock> blocks;  // scan order
  std::size_t d() const noexcept;
};

void gibbs_step(const GibbsSpec& spec, ConstVec x, ConstVec u, MutVec out);
UpdateFunction make_update(GibbsSpec spec);

/// Returns the slice {t in [lo, hi] : pi(..., t, ...) >= level} for one
/// coordinate as disjoint sorted intervals.
using SliceFinder =
    std::function<std::vector<std::pair<double, double>>(std::size_t coord, ConstVec x, double level)>;

/// Inversive slice sampler on a bounded density over the box [lo, hi].
/// State layout: (y, x_1..x_s); innovations (u_1, ..., u_{s+1}).
struct SliceSpec {
  std::vector<double> lo, hi;
  /// Unnormalised density, bounded on the box.
  std::function<double(ConstVec x)> density;
  /// Optional exact slice sets; the default scans a grid of `grid` points per
  /// coordinate and refines crossings by bisection. When every grid point lies
  /// in the slice the whole interval is returned.
  std::optional<SliceFinder> finder;
  std::size_t grid = 256;

  std::size_t s() const noexcept { return lo.size(); }
};

/// Interval set of coordinate `coord` at `level` using the default grid scan.
std::vector<std::pair<double, double>> default_slice_set(const SliceSpec& spec, std::size_t coord, ConstVec x,
                                                         double level);
void slice_step(const SliceSpec& spec, ConstVec state, ConstVec u, MutVec out);
UpdateFunction make_update(SliceSpec spec);

/// phi(x, u) = x, consuming d uniforms.
UpdateFunction identity_update(std::size_t s, std::size_t d);

struct TestFunction {
  std::string id;
  std::function<double(ConstVec x)> f;
};

/// f_j(x) = x_j for j < s, named by `names` when given, else x1..xs.
std::vector<TestFunction> component_means(std::size_t s, const std::vector<std::string>& names = {});

struct ChainOptions {
  /// Keep every thin-th state (x_thin, x_2thin, ...); 0 keeps none.
  std::size_t thin = 0;
  /// Spill retained states as CSV rows "step,x1,...,xs" (header written first).
  std::ostream* trajectory_csv = nullptr;
};

struct ChainRun {
  std::size_t n = 0;
  std::size_t s = 0;
  std::size_t d = 0;
  StreamSpec stream;
  std::vector<std::string> fn_ids;
  std::vector<double> sums;  // sum_{i=1}^n f(x_i)
  std::vector<std::size_t> kept_steps;
  std::vector<State> trajectory;
  State final_state;
  std::uint64_t consumed = 0;

  /// theta_n(f) = sums / n; nullopt when n = 0.
  std::optional<double> estimate(std::size_t fn) const;
  std::vector<double> estimates() const;
};

/// x_i = phi(x_{i-1}, u_i) for i = 1..n, u_i the next d-block of the stream.
/// Errors raised by the update are rethrown with the step index prepended.
ChainRun run_chain(const UpdateFunction& update, ConstVec x0, InnovationStream& stream, std::size_t n,
                   const std::vector<TestFunction>& fns, const ChainOptions& opts = {});

/// Advances `k` steps and returns the final state (burn-in prefix).
State discard_prefix(const UpdateFunction& update, ConstVec x0, InnovationStream& stream, std::size_t k);

}  // namespace mcqmc
