#include "mcqmc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include "mcqmc/error.hpp"
#include "mcqmc/models/gaussian.hpp"
#include "mcqmc/models/probit.hpp"
#include "mcqmc/models/pump.hpp"

namespace mcqmc {

namespace {

using nlohmann::json;

unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work, 1)));
}

// Runs fn(i) for i in [0, count) on a small pool. Any error is rethrown
// after all workers stop, picking the lowest failing index.
template <class Fn, class Label>
void parallel_for(std::size_t count, unsigned threads, Fn fn, Label label) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::optional<std::size_t> failed_at;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failed_at || i < *failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  const unsigned t = resolve_threads(threads, count);
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (!failure) return;
  try {
    std::rethrow_exception(failure);
  } catch (const Error& e) {
    throw Error(e.kind(), label(*failed_at) + ": " + e.detail());
  }
}

double sample_variance(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_error(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) config_error(where + ": unknown key '" + k + "'");
  }
}

template <class T>
T get(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(where + ": bad value for '" + key + "'");
  }
}

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    config_error(where + ": '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

ModelSpec parse_model(const json& j, const std::filesystem::path& base) {
  check_keys(j, "model", {"id", "data", "rho", "dof", "scale", "step", "lo", "hi"});
  ModelSpec m;
  m.id = get<std::string>(j, "id", "", "model");
  if (m.id.empty()) config_error("model.id is required");
  if (j.contains("data")) m.data = base / get<std::string>(j, "data", "", "model");
  m.rho = get(j, "rho", m.rho, "model");
  m.dof = get(j, "dof", m.dof, "model");
  m.scale = get(j, "scale", m.scale, "model");
  m.step = get(j, "step", m.step, "model");
  m.lo = get(j, "lo", m.lo, "model");
  m.hi = get(j, "hi", m.hi, "model");
  return m;
}

StreamChoice parse_stream(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "randomize", "shift_dim", "lcg", "lfsr_degree", "start_seed", "full_period"});
  StreamChoice c;
  c.kind = stream_kind_from_string(get<std::string>(j, "kind", "IID", where));
  c.randomize = get(j, "randomize", c.randomize, where);
  c.shift_dim = static_cast<std::size_t>(get_u64(j, "shift_dim", 0, where));
  if (j.contains("lcg")) {
    const auto& l = j.at("lcg");
    check_keys(l, where + ".lcg", {"modulus", "multiplier"});
    c.lcg = LcgParams{get_u64(l, "modulus", 0, where), get_u64(l, "multiplier", 0, where)};
  }
  if (j.contains("lfsr_degree")) c.lfsr_degree = static_cast<unsigned>(get_u64(j, "lfsr_degree", 0, where));
  c.start_seed = get_u64(j, "start_seed", c.start_seed, where);
  c.full_period = get(j, "full_period", c.full_period, where);
  return c;
}

std::vector<std::uint64_t> parse_u64_list(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return {};
  const auto& a = j.at(key);
  if (!a.is_array()) config_error(where + ": '" + key + "' must be an array");
  std::vector<std::uint64_t> out;
  for (const auto& v : a) {
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) config_error(where + ": '" + key + "' needs positive integers");
    out.push_back(v.get<std::uint64_t>());
  }
  return out;
}

std::optional<State> parse_state(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  try {
    return j.at(key).get<State>();
  } catch (const json::exception&) {
    config_error(where + ": '" + key + "' must be an array of numbers");
  }
}

SliceSpec linear_slice_spec(double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) config_error("slice_linear needs 0 < lo < hi");
  SliceSpec sp;
  sp.lo = {lo};
  sp.hi = {hi};
  sp.density = [](ConstVec x) { return x[0]; };
  // the slice {x >= level} is known in closed form
  sp.finder = [lo, hi](std::size_t, ConstVec, double level) {
    return std::vector<std::pair<double, double>>{{std::clamp(level, lo, hi), hi}};
  };
  return sp;
}

}  // namespace

ModelInstance build_model(const ModelSpec& spec, std::vector<double> region_a, std::vector<double> region_b,
                          std::pair<double, double> x_range) {
  ModelInstance mi;
  mi.id = spec.id;
  if (spec.id == "pump") {
    if (spec.data.empty()) config_error("pump model needs 'data'");
    PumpModel m(load_pump_csv(spec.data.string()));
    mi.update = m.gibbs_update();
    mi.x0 = m.initial_state();
    mi.names = m.parameter_names();
  } else if (spec.id == "probit") {
    if (spec.data.empty()) config_error("probit model needs 'data'");
    auto m = std::make_shared<const ProbitModel>(ProbitModel::from_csv(spec.data.string()));
    mi.update = m->gibbs_update();
    mi.x0 = m->initial_state();
    mi.names = m->parameter_names();
    mi.metric = [m](ConstVec a, ConstVec b) { return m->metric(a, b); };
    mi.metric_id = "probit_max_d1_d2";
  } else if (spec.id == "bivariate_normal") {
    mi.update = make_update(bivariate_normal_gibbs(spec.rho));
    mi.x0 = {0.0, 0.0};
  } else if (spec.id == "normal_mis_exact") {
    mi.update = make_update(normal_mis_exact());
    mi.x0 = {0.0};
    mi.region = mis_coupling_region(1.0, 1.0, {0.0}, {1.0});
  } else if (spec.id == "normal_mis_t") {
    const auto mis = normal_mis_student(spec.dof, spec.scale);
    mi.update = make_update(mis);
    mi.x0 = {0.0};
    if (region_a.size() != 1 || region_b.size() != 1) config_error("normal_mis_t region box is one-dimensional");
    const auto b = mis_weight_bounds(mis, x_range.first, x_range.second, region_a[0], region_b[0]);
    mi.region = mis_coupling_region(b.sup, b.inf, region_a, region_b);
  } else if (spec.id == "normal_rwm") {
    if (!(spec.step > 0.0)) config_error("normal_rwm needs step > 0");
    mi.update = make_update(normal_rwm(spec.step));
    mi.x0 = {0.0};
  } else if (spec.id == "slice_linear") {
    const auto sp = linear_slice_spec(spec.lo, spec.hi);
    mi.update = make_update(sp);
    mi.x0 = {0.5 * spec.lo, spec.lo};
    mi.names = {"y", "x1"};
    mi.region = slice_coupling_check(sp, spec.lo, spec.hi);
  } else {
    config_error("unknown model id '" + spec.id + "'");
  }
  if (mi.names.empty()) {
    for (std::size_t j = 0; j < mi.update.s; ++j) mi.names.push_back("x" + std::to_string(j + 1));
  }
  return mi;
}

namespace {

// Largest built-in generator with period <= n.
template <class P>
const P& largest_within(const std::vector<P>& table, std::uint64_t n) {
  const P* best = nullptr;
  for (const auto& p : table) {
    if (p.period() <= n) best = &p;
  }
  if (!best) config_error("no built-in generator has period <= " + std::to_string(n));
  return *best;
}

}  // namespace

std::uint64_t effective_length(const StreamChoice& c, std::uint64_t n) {
  if (c.kind == StreamKind::Iid || !c.full_period) return n;
  if (c.lcg) return c.lcg->period();
  if (c.lfsr_degree) return (std::uint64_t{1} << *c.lfsr_degree) - 1;
  return c.kind == StreamKind::CudLcg ? largest_within(lcg_table(), n).period()
                                      : largest_within(lfsr_table(), n).period();
}

StreamSpec make_stream_spec(const StreamChoice& c, std::uint64_t n, std::size_t d, std::uint64_t seed) {
  if (c.kind == StreamKind::Iid) {
    StreamSpec s;
    s.seed = seed;
    s.block_dim = d;
    return s;
  }
  StreamSpec s;
  s.kind = c.kind;
  s.seed = c.start_seed;
  s.block_dim = d;
  if (c.lcg) {
    if (c.kind != StreamKind::CudLcg) config_error("lcg parameters given for a non-LCG stream");
    s.lcg = c.lcg;
  } else if (c.lfsr_degree) {
    if (c.kind != StreamKind::CudLfsr) config_error("lfsr_degree given for a non-LFSR stream");
    const auto& t = lfsr_table();
    const auto it = std::find_if(t.begin(), t.end(), [&](const LfsrParams& p) { return p.degree == *c.lfsr_degree; });
    if (it == t.end()) config_error("no built-in LFSR of degree " + std::to_string(*c.lfsr_degree));
    s.lfsr = *it;
  } else if (c.full_period) {
    if (c.kind == StreamKind::CudLcg) {
      s.lcg = largest_within(lcg_table(), n);
    } else {
      s.lfsr = largest_within(lfsr_table(), n);
    }
  } else {
    s = sized_cud_spec(c.kind, n, d, c.start_seed);
  }
  if (c.randomize) s = randomize(s, seed, c.shift_dim ? c.shift_dim : d);
  return s;
}

std::vector<VrfRow> run_vrf_experiment(const VrfConfig& cfg) {
  if (cfg.replicates < 2) config_error("vrf needs at least 2 replicates");
  if (cfg.n_list.empty()) config_error("vrf needs a non-empty n list");
  const auto model = build_model(cfg.model);
  const auto fns = component_means(model.update.s, model.names);
  const std::size_t R = cfg.replicates;
  std::vector<VrfRow> rows;
  for (const auto nominal : cfg.n_list) {
    const std::uint64_t n = std::min(effective_length(cfg.baseline, nominal), effective_length(cfg.treatment, nominal));
    // est[arm][replicate][function]
    std::vector<std::vector<std::vector<double>>> est(2, std::vector<std::vector<double>>(R));
    parallel_for(
        2 * R,
        cfg.threads,
        [&](std::size_t job) {
          const std::size_t arm = job / R, r = job % R;
          const auto& choice = arm == 0 ? cfg.baseline : cfg.treatment;
          const std::uint64_t seed = derive_seed(cfg.seed, {arm + 1, nominal, r});
          StreamSpec burn;
          burn.seed = derive_seed(seed, {0});
          InnovationStream burn_stream(burn);
          const State start = discard_prefix(model.update, model.x0, burn_stream, cfg.burn_in);
          InnovationStream st(make_stream_spec(choice, nominal, model.update.d, seed));
          est[arm][r] = run_chain(model.update, start, st, n, fns).estimates();
        },
        [R](std::size_t job) {
          return std::string(job < R ? "baseline" : "treatment") + " replicate " + std::to_string(job % R);
        });
    for (std::size_t f = 0; f < fns.size(); ++f) {
      std::vector<double> a(R), b(R);
      for (std::size_t r = 0; r < R; ++r) {
        a[r] = est[0][r][f];
        b[r] = est[1][r][f];
      }
      VrfRow row;
      row.function = fns[f].id;
      row.n = n;
      row.replicates = R;
      row.mean_iid = mean_of(a);
      row.mean_treatment = mean_of(b);
      row.variance_iid = sample_variance(a, row.mean_iid);
      row.variance_treatment = sample_variance(b, row.mean_treatment);
      row.vrf = row.variance_iid / row.variance_treatment;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_vrf_csv(std::ostream& os, const std::vector<VrfRow>& rows, const std::string& model_id) {
  const auto old = os.precision(17);
  os << "function,n,R,mean_iid,mean_treatment,variance_iid,variance_treatment,vrf\n";
  for (const auto& r : rows) {
    os << r.function << ',' << r.n << ',' << r.replicates << ',' << r.mean_iid << ',' << r.mean_treatment << ','
       << r.variance_iid << ',' << r.variance_treatment << ',' << r.vrf << '\n';
  }
  if (model_id == "pump") {
    os << "# reference: Tribble (2007) randomized CUD vs IID on this model, VRF min 286 / max 1543 at n=2^10,"
          " 304 / 5003 at n=2^12, 1186 / 16089 at n=2^14 (different generators; not expected to match)\n";
  }
  os.precision(old);
}

void run_discrepancy_report(const DiscrepancyConfig& cfg, std::ostream& os) {
  if (cfg.n_list.empty() || cfg.d_list.empty()) config_error("discrepancy needs n and d lists");
  write_discrepancy_csv_header(os);
  for (const auto& s : cfg.streams) write_discrepancy_csv_rows(os, s.label, cud_diagnostic(s.spec, cfg.n_list, cfg.d_list, cfg.star));
  if (cfg.iid_replicates == 0) return;
  std::vector<CudDiagnosticRow> med;
  for (const auto n : cfg.n_list) {
    for (const auto d : cfg.d_list) {
      for (const auto w : {WindowKind::Overlapping, WindowKind::Nonoverlapping}) {
        const auto xs = iid_star_samples(n, d, w, cfg.iid_replicates, derive_seed(cfg.seed, {n, d}), cfg.star);
        CudDiagnosticRow row;
        row.window = w;
        row.report.n = n;
        row.report.d = d;
        row.report.star = median(xs);
        row.report.method = planned_method(n, d, cfg.star);
        row.report.exact = row.report.method != DiscrepancyMethod::SupEstimate;
        med.push_back(row);
      }
    }
  }
  write_discrepancy_csv_rows(os, "iid_median", med);
}

namespace {

struct CouplingTotals {
  std::size_t merged = 0;
  std::vector<double> merge_steps;
  std::size_t hits = 0;
  std::size_t region_failures = 0;
  std::size_t post_merge_failures = 0;
  std::vector<std::size_t> unmerged_by;  // count of replicates not merged by step k
};

std::vector<ProbeRow> coupling_rows(const CouplingProbeConfig& pc, const CouplingTotals& t,
                                    const std::optional<CouplingRegion>& region) {
  std::vector<ProbeRow> rows;
  const double R = static_cast<double>(pc.replicates);
  auto binom_se = [](double p, double n) { return std::sqrt(p * (1 - p) / n); };
  if (region) {
    const double total = R * static_cast<double>(pc.steps);
    const double rate = static_cast<double>(t.hits) / total;
    rows.push_back({pc.id, "region_volume", region->lag, region->volume(), 0.0});
    rows.push_back({pc.id, "region_hit_rate", region->lag, rate, binom_se(rate, total)});
    rows.push_back({pc.id, "region_failures", region->lag, static_cast<double>(t.region_failures), 0.0});
  }
  rows.push_back({pc.id, "post_merge_failures", 0, static_cast<double>(t.post_merge_failures), 0.0});
  const double frac = static_cast<double>(t.merged) / R;
  rows.push_back({pc.id, "merged_fraction", 0, frac, binom_se(frac, R)});
  if (!t.merge_steps.empty()) {
    const double m = mean_of(t.merge_steps);
    const double se = t.merge_steps.size() > 1
                          ? std::sqrt(sample_variance(t.merge_steps, m) / static_cast<double>(t.merge_steps.size()))
                          : 0.0;
    rows.push_back({pc.id, "mean_merge_step", 0, m, se});
  }
  for (std::size_t k = 0; k < t.unmerged_by.size(); ++k) {
    const double p = static_cast<double>(t.unmerged_by[k]) / R;
    rows.push_back({pc.id, "merge_survival", k, p, binom_se(p, R)});
    if (region) {
      // IID bound: no merge by step k needs k - lag + 1 region misses
      const double misses = k + 1 >= region->lag ? static_cast<double>(k + 1 - region->lag) : 0.0;
      rows.push_back({pc.id, "merge_survival_bound", k, std::pow(1.0 - region->volume(), misses), 0.0});
    }
  }
  return rows;
}

// Visited states of an IID-driven chain, used as starting points and pairs.
std::vector<State> warm_states(const ModelInstance& mi, std::size_t count, std::uint64_t seed) {
  StreamSpec s;
  s.seed = seed;
  InnovationStream st(s);
  std::vector<State> out;
  State x = mi.x0, u(mi.update.d);
  for (std::size_t i = 0; i < count; ++i) {
    st.next_block(std::span<double>(u));
    x = mi.update(x, u);
    out.push_back(x);
  }
  return out;
}

}  // namespace

void run_coupling_report(const CouplingConfig& cfg, std::ostream& os) {
  write_probe_csv_header(os);
  for (std::size_t p = 0; p < cfg.probes.size(); ++p) {
    const auto& pc = cfg.probes[p];
    const auto mi = build_model(pc.model, pc.region_a, pc.region_b, pc.x_range);
    if (pc.type == CouplingProbeConfig::Type::Contraction) {
      const auto states = warm_states(mi, std::max<std::size_t>(pc.warmup, 2), derive_seed(cfg.seed, {5, p}));
      ContractionOptions opts;
      opts.pairs_per_u = pc.pairs;
      const std::uint64_t pair_seed = derive_seed(cfg.seed, {6, p});
      opts.pair_sampler = [&](std::uint64_t k) {
        std::mt19937_64 rng(derive_seed(pair_seed, {k}));
        std::uniform_int_distribution<std::size_t> pick(0, states.size() - 1);
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        if (j == i) j = (i + 1) % states.size();
        return std::pair{states[i], states[j]};
      };
      InnovationStream st(make_stream_spec(pc.stream, pc.replicates * (pc.m + 1), mi.update.d, derive_seed(cfg.seed, {7, p})));
      const auto rep = contraction_probe(mi.update, mi.metric, mi.metric_id, states.front(),
                                         states[states.size() / 2], st, pc.m, pc.replicates, opts);
      write_probe_csv_rows(os, probe_rows(pc.id, rep));
      continue;
    }
    const State x0 = pc.x0 ? *pc.x0 : mi.x0;
    std::vector<CouplingReport> reps(pc.replicates);
    parallel_for(
        pc.replicates,
        cfg.threads,
        [&](std::size_t r) {
          State x0p;
          if (pc.x0p) {
            x0p = *pc.x0p;
          } else {
            x0p = warm_states(mi, 64, derive_seed(cfg.seed, {4, p, r})).back();
          }
          InnovationStream st(make_stream_spec(pc.stream, pc.steps, mi.update.d, derive_seed(cfg.seed, {3, p, r})));
          std::vector<CouplingRegion> regions;
          if (mi.region) regions.push_back(*mi.region);
          reps[r] = coupling_probe(mi.update, x0, x0p, st, pc.steps, regions);
        },
        [&pc](std::size_t r) { return "probe " + pc.id + " replicate " + std::to_string(r); });
    CouplingTotals t;
    t.unmerged_by.assign(std::min(pc.survival_max, pc.steps) + 1, 0);
    for (const auto& rep : reps) {
      if (rep.merge_step) {
        ++t.merged;
        t.merge_steps.push_back(static_cast<double>(*rep.merge_step));
      }
      if (!rep.hits.empty()) t.hits += rep.hits[0];
      t.region_failures += !rep.region_sound;
      t.post_merge_failures += !rep.post_merge_equal;
      for (std::size_t k = 0; k < t.unmerged_by.size(); ++k) {
        t.unmerged_by[k] += !rep.merge_step || *rep.merge_step > k;
      }
    }
    write_probe_csv_rows(os, coupling_rows(pc, t, mi.region));
  }
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
}

VrfConfig parse_vrf_config(const json& j, const std::filesystem::path& base) {
  check_keys(j, "vrf config", {"model", "n", "replicates", "burn_in", "baseline", "treatment", "seed", "threads"});
  VrfConfig c;
  if (!j.contains("model")) config_error("vrf config needs 'model'");
  c.model = parse_model(j.at("model"), base);
  if (j.contains("n")) c.n_list = parse_u64_list(j, "n", "vrf config");
  c.replicates = static_cast<std::size_t>(get_u64(j, "replicates", c.replicates, "vrf config"));
  c.burn_in = static_cast<std::size_t>(get_u64(j, "burn_in", c.burn_in, "vrf config"));
  if (j.contains("baseline")) c.baseline = parse_stream(j.at("baseline"), "baseline");
  if (j.contains("treatment")) c.treatment = parse_stream(j.at("treatment"), "treatment");
  c.seed = get_u64(j, "seed", c.seed, "vrf config");
  c.threads = static_cast<unsigned>(get_u64(j, "threads", 0, "vrf config"));
  if (c.replicates < 2) config_error("vrf config: replicates must be >= 2");
  if (c.n_list.empty()) config_error("vrf config: 'n' must not be empty");
  return c;
}

DiscrepancyConfig parse_discrepancy_config(const json& j) {
  check_keys(j, "discrepancy config", {"streams", "n", "d", "iid_replicates", "seed", "exact_budget", "sampled_anchors"});
  DiscrepancyConfig c;
  c.seed = get_u64(j, "seed", c.seed, "discrepancy config");
  if (j.contains("streams")) {
    if (!j.at("streams").is_array()) config_error("discrepancy config: 'streams' must be an array");
    std::size_t k = 0;
    for (const auto& s : j.at("streams")) {
      check_keys(s, "stream", {"label", "kind", "randomize", "shift_dim", "lcg", "lfsr_degree", "start_seed", "seed",
                               "full_period"});
      json sj = s;
      sj.erase("label");
      sj.erase("seed");
      auto choice = parse_stream(sj, "stream");
      if (!s.contains("randomize")) choice.randomize = false;
      const std::uint64_t seed = get_u64(s, "seed", derive_seed(c.seed, {k}), "stream");
      DiscrepancyStream ds;
      ds.label = get<std::string>(s, "label", std::string(to_string(choice.kind)), "stream");
      // sized for the largest n; cud_diagnostic re-opens it per d
      std::uint64_t nmax = 0;
      for (const auto& v : parse_u64_list(j, "n", "discrepancy config")) nmax = std::max(nmax, v);
      ds.spec = make_stream_spec(choice, nmax, 1, seed);
      c.streams.push_back(std::move(ds));
      ++k;
    }
  }
  for (const auto v : parse_u64_list(j, "n", "discrepancy config")) c.n_list.push_back(static_cast<std::size_t>(v));
  if (j.contains("d")) {
    c.d_list.clear();
    for (const auto v : parse_u64_list(j, "d", "discrepancy config")) c.d_list.push_back(static_cast<std::size_t>(v));
  }
  c.iid_replicates = static_cast<std::size_t>(get_u64(j, "iid_replicates", 0, "discrepancy config"));
  c.star.exact_budget = get(j, "exact_budget", c.star.exact_budget, "discrepancy config");
  c.star.sampled_anchors = static_cast<std::size_t>(get_u64(j, "sampled_anchors", c.star.sampled_anchors, "discrepancy config"));
  if (c.n_list.empty()) config_error("discrepancy config: 'n' must not be empty");
  return c;
}

CouplingConfig parse_coupling_config(const json& j, const std::filesystem::path& base) {
  check_keys(j, "couple config", {"probes", "seed", "threads"});
  CouplingConfig c;
  c.seed = get_u64(j, "seed", c.seed, "couple config");
  c.threads = static_cast<unsigned>(get_u64(j, "threads", 0, "couple config"));
  if (!j.contains("probes") || !j.at("probes").is_array()) config_error("couple config needs a 'probes' array");
  for (const auto& pj : j.at("probes")) {
    check_keys(pj, "probe", {"id", "type", "model", "stream", "x0", "x0p", "steps", "replicates", "survival_max",
                             "region_a", "region_b", "x_range", "m", "pairs", "warmup"});
    CouplingProbeConfig pc;
    pc.id = get<std::string>(pj, "id", "", "probe");
    if (pc.id.empty()) config_error("probe needs an 'id'");
    const auto where = "probe " + pc.id;
    const auto type = get<std::string>(pj, "type", "coupling", where);
    if (type == "coupling") {
      pc.type = CouplingProbeConfig::Type::Coupling;
    } else if (type == "contraction") {
      pc.type = CouplingProbeConfig::Type::Contraction;
    } else {
      config_error(where + ": type must be coupling or contraction");
    }
    if (!pj.contains("model")) config_error(where + " needs 'model'");
    pc.model = parse_model(pj.at("model"), base);
    if (pj.contains("stream")) pc.stream = parse_stream(pj.at("stream"), where + ".stream");
    pc.x0 = parse_state(pj, "x0", where);
    pc.x0p = parse_state(pj, "x0p", where);
    pc.steps = static_cast<std::size_t>(get_u64(pj, "steps", pc.steps, where));
    pc.replicates = static_cast<std::size_t>(get_u64(pj, "replicates", pc.replicates, where));
    pc.survival_max = static_cast<std::size_t>(get_u64(pj, "survival_max", pc.survival_max, where));
    pc.region_a = get(pj, "region_a", pc.region_a, where);
    pc.region_b = get(pj, "region_b", pc.region_b, where);
    pc.x_range = get(pj, "x_range", pc.x_range, where);
    pc.m = static_cast<std::size_t>(get_u64(pj, "m", pc.m, where));
    pc.pairs = static_cast<std::size_t>(get_u64(pj, "pairs", pc.pairs, where));
    pc.warmup = static_cast<std::size_t>(get_u64(pj, "warmup", pc.warmup, where));
    if (pc.replicates == 0 || pc.steps == 0 || pc.m == 0) config_error(where + ": steps, replicates and m must be >= 1");
    c.probes.push_back(std::move(pc));
  }
  return c;
}

}  // namespace mcqmc
