// mcqmc: batch runs of the variance-reduction, discrepancy and coupling
// experiments. Exit codes: 0 ok, 2 config error, 3 chain error, 4 stream
// exhausted.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/experiments.hpp"

namespace {

int exit_code(mcqmc::ErrorKind k) {
  switch (k) {
    case mcqmc::ErrorKind::Config:
      return 2;
    case mcqmc::ErrorKind::Exhausted:
      return 4;
    default:
      return 3;
  }
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config")->required();
  sub->add_option("--out", c.out, "CSV output path")->required();
  sub->add_option("--seed", c.seed, "override the master seed");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw mcqmc::Error(mcqmc::ErrorKind::Config, "cannot write " + path);
  return os;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov chain quasi-Monte Carlo experiments"};
  app.require_subcommand(1);
  Common vrf, disc, couple;
  auto* vrf_cmd = app.add_subcommand("vrf", "variance reduction factors, randomized CUD vs IID");
  add_common(vrf_cmd, vrf);
  auto* disc_cmd = app.add_subcommand("discrepancy", "star discrepancy of overlapping and nonoverlapping tuples");
  add_common(disc_cmd, disc);
  auto* couple_cmd = app.add_subcommand("couple", "coupling and contraction probes");
  add_common(couple_cmd, couple);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*vrf_cmd) {
      const auto path = std::filesystem::path(vrf.config);
      auto cfg = mcqmc::parse_vrf_config(mcqmc::load_json(path), path.parent_path());
      if (vrf.seed) cfg.seed = *vrf.seed;
      if (vrf.threads) cfg.threads = vrf.threads;
      const auto rows = mcqmc::run_vrf_experiment(cfg);
      auto os = open_out(vrf.out);
      mcqmc::write_vrf_csv(os, rows, cfg.model.id);
    } else if (*disc_cmd) {
      auto j = mcqmc::load_json(disc.config);
      if (disc.seed) j["seed"] = *disc.seed;
      const auto cfg = mcqmc::parse_discrepancy_config(j);
      auto os = open_out(disc.out);
      mcqmc::run_discrepancy_report(cfg, os);
    } else if (*couple_cmd) {
      const auto path = std::filesystem::path(couple.config);
      auto cfg = mcqmc::parse_coupling_config(mcqmc::load_json(path), path.parent_path());
      if (couple.seed) cfg.seed = *couple.seed;
      if (couple.threads) cfg.threads = couple.threads;
      auto os = open_out(couple.out);
      mcqmc::run_coupling_report(cfg, os);
    }
  } catch (const mcqmc::Error& e) {
    std::cerr << "mcqmc: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "mcqmc: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
