// ssa_cli: analytic latency tables and Monte Carlo experiments for SSA latency.
//
// Exit codes: 0 success, 1 runtime or statistical warning, 2 invalid config.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssa/harness.hpp"

namespace {

// Accepts plain numbers and fractions such as "1/50".
double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      const double num = std::stod(text.substr(0, slash), &used);
      if (used == slash) {
        const std::string rest = text.substr(slash + 1);
        const double den = std::stod(rest, &used);
        if (used == rest.size() && den != 0.0) return num / den;
      }
    }
  } catch (const std::exception&) {
  }
  throw ssa::Error(ssa::ErrorKind::invalid_config, "not a number: " + text);
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
  std::string scale = "desk";
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* cfg = cmd->add_option("--config", c.config, "JSON config or scenario file");
  if (needs_config) cfg->required();
  cmd->add_option("--out", c.out, "output directory (or .csv file)")->required();
  cmd->add_option("--seed", c.seed, "root seed (overrides config)");
  cmd->add_option("--trials", c.trials, "trial count (overrides config)");
  cmd->add_option("--threads", c.threads, "worker threads (overrides config)");
  cmd->add_option("--scale", c.scale, "sweep scale")->check(CLI::IsMember({"desk", "full"}));
}

ssa::ExperimentConfig load(const Common& c) {
  auto cfg = c.config.empty() ? ssa::parse_config(nlohmann::json::object()) : ssa::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (c.threads) cfg.threads = *c.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared situation awareness latency: analytics and simulation"};
  app.require_subcommand(1);

  Common common;
  std::string shape = "1", rate = "1/50";
  std::uint64_t hops = 4;
  std::optional<double> x_max;
  std::size_t points = 801;
  auto* analytic = app.add_subcommand("analytic", "PDF/CDF table of Gamma(hops * shape, rate)");
  add_common(analytic, common, false);
  analytic->add_option("--shape", shape, "per-hop shape");
  analytic->add_option("--rate", rate, "per-hop rate, 1/ms (fractions allowed)");
  analytic->add_option("--hops", hops, "hop count N");
  analytic->add_option("--x-max", x_max, "grid upper bound, ms");
  analytic->add_option("--points", points, "grid points");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo latency batch with KS report");
  add_common(simulate, common, true);

  std::vector<std::string> densities;
  double cdf_max = 500.0;
  auto* sweep = app.add_subcommand("sweep", "latency CDFs and SAE feasibility across densities");
  add_common(sweep, common, true);
  sweep->add_option("--densities", densities, "intensities per m^2 (fractions allowed)");
  sweep->add_option("--cdf-max", cdf_max, "upper bound of the CDF tables, ms");

  auto* coverage = app.add_subcommand("coverage", "coverage rate of a sight-arc scenario");
  add_common(coverage, common, true);

  auto* thinning = app.add_subcommand("thinning", "subregion counts vs Poisson(rho * mean)");
  add_common(thinning, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    int code = 0;
    if (*analytic) {
      ssa::AnalyticOptions o;
      o.shape = parse_number(shape);
      o.rate = parse_number(rate);
      o.hops = hops;
      o.x_max = x_max;
      o.points = points;
      try {
        code = ssa::cmd_analytic(o, common.out);
      } catch (const ssa::Error& e) {
        if (e.kind() == ssa::ErrorKind::invalid_argument) throw ssa::Error(ssa::ErrorKind::invalid_config, e.what());
        throw;
      }
    } else if (*simulate) {
      code = ssa::cmd_simulate(load(common), common.out);
    } else if (*sweep) {
      std::vector<double> grid;
      for (const auto& d : densities) grid.push_back(parse_number(d));
      if (grid.empty()) grid = ssa::reference_density_grid();
      const auto scale = common.scale == "full" ? ssa::SweepScale::full : ssa::SweepScale::desk;
      code = ssa::cmd_sweep(load(common), grid, scale, common.out, cdf_max);
    } else if (*coverage) {
      code = ssa::cmd_coverage(ssa::parse_scenario(ssa::read_json_file(common.config)), common.out);
    } else if (*thinning) {
      code = ssa::cmd_thinning(load(common), common.out);
    }
    if (code != 0) std::cerr << "warning: see summary outputs in " << common.out << '\n';
    return code;
  } catch (const ssa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ssa::ErrorKind::invalid_config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
