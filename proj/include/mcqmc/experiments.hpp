#pragma once

// Config-driven batch runs: variance reduction factors, CUD discrepancy
// reports and coupling/contraction reports, all written as CSV.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcqmc/coupling.hpp"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/samplers.hpp"

namespace mcqmc {

/// Which target and sampler to build. Paths are resolved against the
/// directory of the config file.
///   pump              Gibbs, data = pump CSV
///   probit            data-augmentation Gibbs, data = probit CSV
///   bivariate_normal  Gibbs, rho
///   normal_mis_exact  independence sampler with p = pi
///   normal_mis_t      independence sampler, scale * t_dof proposal
///   normal_rwm        random walk, step
///   slice_linear      slice sampler on pi(x) = x over [lo, hi], lo > 0
struct ModelSpec {
  std::string id;
  std::filesystem::path data;
  double rho = 0.5;
  double dof = 3.0;
  double scale = 1.0;
  double step = 1.0;
  double lo = 0.5;
  double hi = 1.0;
};

struct ModelInstance {
  std::string id;
  UpdateFunction update;
  State x0;
  std::vector<std::string> names;
  Metric metric = euclidean;
  std::string metric_id = "euclidean";
  /// Coupling region when one is known for this sampler.
  std::optional<CouplingRegion> region;
};

/// region_box gives [a, b] for the MIS region (defaults to [0.1, 0.9]);
/// x_range is where sup pi/p is searched.
ModelInstance build_model(const ModelSpec& spec, std::vector<double> region_a = {0.1},
                          std::vector<double> region_b = {0.9}, std::pair<double, double> x_range = {-20.0, 20.0});

/// A driving stream for one arm of an experiment.
struct StreamChoice {
  StreamKind kind = StreamKind::Iid;
  /// Random shift per replicate (weakly CUD). Ignored for IID.
  bool randomize = true;
  /// Shift length; 0 means one shift coordinate per innovation (blockwise).
  std::size_t shift_dim = 0;
  /// Explicit generator; otherwise one from the built-in tables.
  std::optional<LcgParams> lcg;
  std::optional<unsigned> lfsr_degree;
  /// Starting state of the CUD generator.
  std::uint64_t start_seed = 1;
  /// Run every tuple of one period: a nominal n picks the largest built-in
  /// generator with period <= n and both arms then run that many steps.
  /// When false the smallest generator with period >= n is used.
  bool full_period = true;
};

inline StreamChoice stream_of(StreamKind kind) {
  StreamChoice c;
  c.kind = kind;
  return c;
}

/// Steps actually run for nominal length n (the period under full_period).
std::uint64_t effective_length(const StreamChoice& c, std::uint64_t n);

/// Stream for replicate `seed` of a run of n steps of dimension d. Under
/// full_period n should come from effective_length.
StreamSpec make_stream_spec(const StreamChoice& c, std::uint64_t n, std::size_t d, std::uint64_t seed);

struct VrfConfig {
  ModelSpec model;
  std::vector<std::uint64_t> n_list{1024};
  std::size_t replicates = 25;
  std::size_t burn_in = 0;
  StreamChoice baseline = stream_of(StreamKind::Iid);
  StreamChoice treatment = stream_of(StreamKind::CudLfsr);
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct VrfRow {
  std::string function;
  std::uint64_t n = 0;  // steps run, after effective_length
  std::size_t replicates = 0;
  double mean_iid = 0.0;
  double mean_treatment = 0.0;
  double variance_iid = 0.0;
  double variance_treatment = 0.0;
  double vrf = 0.0;
};

/// Seeds: baseline replicate r at nominal length n uses derive_seed(seed, {1, n, r}),
/// treatment derive_seed(seed, {2, n, r}). Burn-in steps are driven by a
/// separate IID stream so a CUD arm keeps its whole period for the estimate.
std::vector<VrfRow> run_vrf_experiment(const VrfConfig& cfg);
/// Header: function,n,R,mean_iid,mean_treatment,variance_iid,variance_treatment,vrf
void write_vrf_csv(std::ostream& os, const std::vector<VrfRow>& rows, const std::string& model_id);

struct DiscrepancyStream {
  std::string label;
  StreamSpec spec;
};

struct DiscrepancyConfig {
  std::vector<DiscrepancyStream> streams;
  std::vector<std::size_t> n_list;
  std::vector<std::size_t> d_list{1, 2, 3};
  /// IID streams per (n, d, window) summarised as an "iid_median" row.
  std::size_t iid_replicates = 0;
  std::uint64_t seed = 1;
  StarOptions star;
};

/// Writes the discrepancy CSV (header stream,n,d,window_kind,star,method).
void run_discrepancy_report(const DiscrepancyConfig& cfg, std::ostream& os);

struct CouplingProbeConfig {
  std::string id;
  enum class Type { Coupling, Contraction } type = Type::Coupling;
  ModelSpec model;
  StreamChoice stream = stream_of(StreamKind::Iid);
  std::optional<State> x0, x0p;
  std::size_t steps = 100;
  std::size_t replicates = 20;
  std::size_t survival_max = 10;
  std::vector<double> region_a{0.1}, region_b{0.9};
  std::pair<double, double> x_range{-20.0, 20.0};
  // contraction
  std::size_t m = 6;
  std::size_t pairs = 64;
  std::size_t warmup = 256;
};

struct CouplingConfig {
  std::vector<CouplingProbeConfig> probes;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Writes the probe CSV (header probe_id,quantity,m,estimate,standard_error).
void run_coupling_report(const CouplingConfig& cfg, std::ostream& os);

/// Parsers; every problem with the document raises ErrorKind::Config.
VrfConfig parse_vrf_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
DiscrepancyConfig parse_discrepancy_config(const nlohmann::json& j);
CouplingConfig parse_coupling_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace mcqmc
