#include <cmath>
#include <sstream>

#include <boost/math/distributions/fisher_f.hpp>

#include "doctest.h"
#include "mcqmc/error.hpp"
#include "mcqmc/experiments.hpp"
#include "mcqmc/csv.hpp"

using namespace mcqmc;
using nlohmann::json;

namespace {

const std::filesystem::path kData = MCQMC_DATA_DIR;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Numerical;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config parsing rejects bad documents") {
  const auto base = kData;
  CHECK(kind_of([&] { parse_vrf_config(json::parse(R"({"n":[8]})"), base); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_vrf_config(json::parse(R"({"model":{"id":"pump"},"typo":1})"), base); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] { parse_vrf_config(json::parse(R"({"model":{"id":"pump"},"replicates":1})"), base); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] { parse_vrf_config(json::parse(R"({"model":{"id":"pump"},"n":[-4]})"), base); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] {
          parse_vrf_config(json::parse(R"({"model":{"id":"pump"},"treatment":{"kind":"SOBOL"}})"), base);
        }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_coupling_config(json::parse(R"({"probes":[{"model":{"id":"x"}}]})"), base); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] { parse_discrepancy_config(json::parse(R"({"d":[1]})")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { build_model(ModelSpec{.id = "nope"}); }) == ErrorKind::Config);
  CHECK(kind_of([&] { load_json("/nonexistent/config.json"); }) == ErrorKind::Config);

  const auto cfg = parse_vrf_config(
      json::parse(R"({"model":{"id":"pump","data":"pumps.csv"},"n":[1024,4096],"seed":9,
                      "treatment":{"kind":"CUD_LCG","randomize":false}})"),
      base);
  CHECK(cfg.model.data == base / "pumps.csv");
  CHECK(cfg.n_list == std::vector<std::uint64_t>{1024, 4096});
  CHECK(cfg.seed == 9);
  CHECK(cfg.replicates == 25);
  CHECK(cfg.treatment.kind == StreamKind::CudLcg);
  CHECK_FALSE(cfg.treatment.randomize);
  CHECK(cfg.baseline.kind == StreamKind::Iid);
}

TEST_CASE("effective length and stream specs") {
  auto lfsr = stream_of(StreamKind::CudLfsr);
  CHECK(effective_length(lfsr, 1024) == 1023);
  CHECK(effective_length(lfsr, 16384) == 16383);
  auto lcg = stream_of(StreamKind::CudLcg);
  CHECK(effective_length(lcg, 1024) == 1020);
  CHECK(effective_length(lcg, 4096) == 4092);
  CHECK(effective_length(stream_of(StreamKind::Iid), 1000) == 1000);
  CHECK(kind_of([&] { effective_length(lcg, 100); }) == ErrorKind::Config);
  lcg.full_period = false;
  CHECK(effective_length(lcg, 1024) == 1024);

  const auto spec = make_stream_spec(stream_of(StreamKind::CudLfsr), 1023, 11, 5);
  REQUIRE(spec.lfsr);
  CHECK(spec.lfsr->degree == 10);
  CHECK(spec.block_dim == 11);
  CHECK(spec.shift.size() == 11);
  auto plain = stream_of(StreamKind::CudLcg);
  plain.randomize = false;
  plain.lcg = LcgParams{1021, 166};
  const auto s2 = make_stream_spec(plain, 1020, 2, 5);
  CHECK(s2.shift.empty());
  CHECK(s2.lcg == LcgParams{1021, 166});
}

TEST_CASE("vrf with identical arms") {
  VrfConfig cfg;
  cfg.model.id = "bivariate_normal";
  cfg.n_list = {256};
  cfg.replicates = 10;
  cfg.treatment = stream_of(StreamKind::Iid);
  const auto rows = run_vrf_experiment(cfg);
  REQUIRE(rows.size() == 2);
  const boost::math::fisher_f F(9, 9);
  for (const auto& r : rows) {
    CHECK(r.n == 256);
    CHECK(r.variance_iid > 0);
    CHECK(r.variance_treatment > 0);
    CHECK(r.vrf == doctest::Approx(r.variance_iid / r.variance_treatment));
    CHECK(r.vrf > boost::math::quantile(F, 0.005));
    CHECK(r.vrf < boost::math::quantile(F, 0.995));
  }
  // same seeds, same answer, independent of the thread count
  cfg.threads = 1;
  const auto a = run_vrf_experiment(cfg);
  cfg.threads = 3;
  const auto b = run_vrf_experiment(cfg);
  std::ostringstream oa, ob;
  write_vrf_csv(oa, a, cfg.model.id);
  write_vrf_csv(ob, b, cfg.model.id);
  CHECK(oa.str() == ob.str());
  CHECK(lines(oa.str())[0] == "function,n,R,mean_iid,mean_treatment,variance_iid,variance_treatment,vrf");
}

TEST_CASE("randomized CUD is unbiased and reduces variance") {
  VrfConfig cfg;
  cfg.model.id = "bivariate_normal";
  cfg.model.rho = 0.5;
  cfg.n_list = {1024};
  cfg.replicates = 25;
  cfg.treatment = stream_of(StreamKind::CudLcg);
  const auto rows = run_vrf_experiment(cfg);
  for (const auto& r : rows) {
    CHECK(r.n == 1020);
    const double se = std::sqrt(r.variance_iid / 25 + r.variance_treatment / 25);
    CHECK(std::abs(r.mean_iid - r.mean_treatment) < 3 * se);
    CHECK(r.vrf > 1.0);
  }
}

TEST_CASE("vrf errors carry the replicate index") {
  VrfConfig cfg;
  cfg.model.id = "bivariate_normal";
  cfg.n_list = {1024};
  cfg.replicates = 2;
  cfg.treatment = stream_of(StreamKind::CudLcg);
  cfg.treatment.full_period = false;
  cfg.treatment.lcg = LcgParams{1021, 166};  // too short for 1024 steps
  try {
    run_vrf_experiment(cfg);
    FAIL("expected exhaustion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Exhausted);
    CHECK(std::string(e.what()).find("treatment replicate 0") != std::string::npos);
  }
}

TEST_CASE("pump vrf footer") {
  std::ostringstream os;
  write_vrf_csv(os, {}, "pump");
  CHECK(os.str().find("# reference") != std::string::npos);
  std::ostringstream none;
  write_vrf_csv(none, {}, "probit");
  CHECK(lines(none.str()).size() == 1);
}

TEST_CASE("discrepancy report") {
  const auto cfg = parse_discrepancy_config(json::parse(R"({
    "streams":[{"label":"lcg","kind":"CUD_LCG","lcg":{"modulus":1021,"multiplier":166}},{"label":"iid","kind":"IID"}],
    "n":[1020],"d":[1,2],"iid_replicates":5,"seed":3})"));
  std::ostringstream os;
  run_discrepancy_report(cfg, os);
  const auto ls = lines(os.str());
  CHECK(ls[0] == "stream,n,d,window_kind,star,method");
  CHECK(ls.size() == 1 + 3 * 4);
  // d = 1 over the whole period: the residues k/1021 have D* = 1/1021
  const auto cells = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
    return out;
  };
  const auto first = cells(ls[1]);
  CHECK(first[0] == "lcg");
  CHECK(first[3] == "overlapping");
  CHECK(std::abs(parse_double(first[4], "star") - 1.0 / 1021) < 1e-15);
  CHECK(cells(ls[2])[3] == "nonoverlapping");
  CHECK(cells(ls.back())[0] == "iid_median");
}

TEST_CASE("coupling report") {
  const auto cfg = parse_coupling_config(json::parse(R"({"seed":4,"probes":[
    {"id":"exact","model":{"id":"normal_mis_exact"},"x0":[-3],"x0p":[4],"steps":5,"replicates":30},
    {"id":"slice","model":{"id":"slice_linear","lo":0.5,"hi":1.0},"steps":50,"replicates":30},
    {"id":"probit","type":"contraction","model":{"id":"probit","data":"probit_synthetic.csv"},"m":4,"replicates":50,"pairs":16}
  ]})"),
                                         kData);
  std::ostringstream os;
  run_coupling_report(cfg, os);
  const auto text = os.str();
  CHECK(lines(text)[0] == "probe_id,quantity,m,estimate,standard_error");
  // p = pi: every replicate merges at step 1
  CHECK(text.find("exact,merged_fraction,0,1,0\n") != std::string::npos);
  CHECK(text.find("exact,mean_merge_step,0,1,0\n") != std::string::npos);
  CHECK(text.find("slice,region_volume,2,0.5,0\n") != std::string::npos);
  CHECK(text.find("slice,region_failures,2,0,0\n") != std::string::npos);
  const auto pos = text.find("probit,mean_log_ell,1,");
  REQUIRE(pos != std::string::npos);
  const auto tail = text.substr(pos + 22);
  CHECK(std::stod(tail.substr(0, tail.find(','))) < 0.0);
}
