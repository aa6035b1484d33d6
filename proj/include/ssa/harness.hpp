#pragma once

// Experiment configuration and the command implementations behind the CLI.
//
// Config files are JSON objects whose keys match the fields below. Unknown
// keys are rejected so a typo cannot silently fall back to a default.
//
//   width, depth            world size, m (default 1000 x 1000)
//   intensity               vehicles per m^2 (default 1e-4, i.e. 100 per km^2)
//   tx_range                m (default 100)
//   slot_ms                 broadcast interval (default 100)
//   timing_mode             "slot" | "distance" | "slot_plus_distance"
//   signal_speed            m/s (default: speed of light)
//   hop_law                 {"shape", "rate"}; rate in 1/ms, distance mode only
//   completion              {"kind": "n_vehicles_informed", "n"} or
//                           {"kind": "coverage_threshold", "threshold",
//                            "target_radius", "sample_points"}
//   relay                   "chain" | "flooding"
//   mobility                {"enabled", "speed_min", "speed_max"}
//   sight                   {"half_angle_min", "half_angle_max",
//                            "radius_min", "radius_max"}
//   max_wait_slots, trials, seed, threads, histogram_bins,
//   max_stall_fraction, reference_law {"shape", "rate"}

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssa/coverage.hpp"
#include "ssa/error.hpp"
#include "ssa/latency_model.hpp"
#include "ssa/propagation_sim.hpp"
#include "ssa/stats.hpp"
#include "ssa/stochastic_geometry.hpp"
#include "ssa/svg.hpp"

namespace ssa {

struct ExperimentConfig {
  WorldConfig world;
  TimingModel timing;
  SsaCompletionRule rule;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t histogram_bins = 50;
  double max_stall_fraction = 0.05;
  std::optional<GammaParams> reference_law;

  void validate() const {
    world.validate();
    timing.validate();
    rule.validate();
    detail::require(trials >= 1, ErrorKind::invalid_config, "trials must be >= 1");
    detail::require(histogram_bins >= 1, ErrorKind::invalid_config, "histogram_bins must be >= 1");
    detail::require(max_stall_fraction >= 0.0 && max_stall_fraction <= 1.0,
                    ErrorKind::invalid_config, "max_stall_fraction must lie in [0, 1]");
  }
};

struct SaeRequirement {
  std::string use_case;
  double latency_ms;
};

/// Application latency requirements used as feasibility cutoffs.
inline const std::vector<SaeRequirement>& sae_requirements() {
  static const std::vector<SaeRequirement> table{
      {"forward_collision_warning", 100.0},
      {"emergency_stop", 100.0},
      {"cooperative_collision_avoidance", 100.0},
      {"see_through", 50.0},
      {"pre_crash_sensing_warning", 20.0},
      {"automated_overtake", 10.0},
      {"high_density_platooning", 10.0},
  };
  return table;
}

inline const std::vector<double>& sae_thresholds_ms() {
  static const std::vector<double> t{10.0, 20.0, 50.0, 100.0};
  return t;
}

/// Densities of the reference sweep, vehicles per m^2.
inline std::vector<double> reference_density_grid() {
  return {1.0 / 10, 1.0 / 30, 1.0 / 50, 1.0 / 70, 1.0 / 90, 1.0 / 110};
}

/// Square root of the expected count in a reference region (1 km^2 by
/// default): the vehicles-per-km line density of an equally dense grid.
inline double density_to_line_equivalent(AreaIntensity intensity, double reference_area_m2 = 1e6) {
  detail::require(reference_area_m2 > 0.0, ErrorKind::invalid_argument,
                  "reference area must be positive");
  return std::sqrt(intensity.expected_count(reference_area_m2));
}

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

using nlohmann::json;

inline double number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorKind::invalid_config, std::string(key) + " must be a number");
  return v.get<double>();
}

inline std::uint64_t count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw Error(ErrorKind::invalid_config, std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw Error(ErrorKind::invalid_config, std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw Error(ErrorKind::invalid_config, "unknown key '" + item.key() + "' in " + where);
  }
}

inline GammaParams gamma_from(const json& j, const char* where) {
  only_keys(j, {"shape", "rate"}, where);
  try {
    return GammaParams(number(j, "shape"), number(j, "rate"));
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_config, std::string(where) + ": " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::count;
  using detail::number;
  detail::only_keys(j,
                    {"width", "depth", "intensity", "tx_range", "slot_ms", "timing_mode",
                     "signal_speed", "hop_law", "completion", "relay", "mobility", "sight",
                     "max_wait_slots", "trials", "seed", "threads", "histogram_bins",
                     "max_stall_fraction", "reference_law"},
                    "config");
  ExperimentConfig c;
  try {
    const double width = j.contains("width") ? number(j, "width") : 1000.0;
    const double depth = j.contains("depth") ? number(j, "depth") : 1000.0;
    c.world.area = WorldArea(width, depth);
    if (j.contains("intensity")) c.world.intensity = AreaIntensity(number(j, "intensity"));
    if (j.contains("tx_range")) c.world.traits.tx_range = number(j, "tx_range");
    if (j.contains("slot_ms")) c.timing.slot_ms = number(j, "slot_ms");
    if (j.contains("signal_speed")) c.timing.signal_speed = number(j, "signal_speed");
    if (j.contains("timing_mode")) {
      const auto mode = j.at("timing_mode").get<std::string>();
      if (mode == "slot") c.timing.mode = TimingMode::slot;
      else if (mode == "distance") c.timing.mode = TimingMode::distance;
      else if (mode == "slot_plus_distance") c.timing.mode = TimingMode::slot_plus_distance;
      else throw Error(ErrorKind::invalid_config, "unknown timing_mode '" + mode + "'");
    }
    if (j.contains("hop_law")) c.timing.hop_law = detail::gamma_from(j.at("hop_law"), "hop_law");
    if (j.contains("reference_law")) {
      c.reference_law = detail::gamma_from(j.at("reference_law"), "reference_law");
    }
    if (j.contains("completion")) {
      const auto& r = j.at("completion");
      detail::only_keys(r, {"kind", "n", "threshold", "target_radius", "sample_points"}, "completion");
      const auto kind = r.at("kind").get<std::string>();
      if (kind == "n_vehicles_informed") {
        c.rule = SsaCompletionRule::informed(count(r, "n"));
      } else if (kind == "coverage_threshold") {
        c.rule = SsaCompletionRule::coverage(number(r, "threshold"));
        if (r.contains("target_radius")) c.rule.target_radius = number(r, "target_radius");
        if (r.contains("sample_points")) c.rule.sample_points = count(r, "sample_points");
      } else {
        throw Error(ErrorKind::invalid_config, "unknown completion kind '" + kind + "'");
      }
    }
    if (j.contains("relay")) {
      const auto relay = j.at("relay").get<std::string>();
      if (relay == "chain") c.world.relay = RelayMode::chain;
      else if (relay == "flooding") c.world.relay = RelayMode::flooding;
      else throw Error(ErrorKind::invalid_config, "unknown relay '" + relay + "'");
    }
    if (j.contains("mobility")) {
      const auto& m = j.at("mobility");
      detail::only_keys(m, {"enabled", "speed_min", "speed_max"}, "mobility");
      if (m.contains("enabled")) c.world.mobility = m.at("enabled").get<bool>();
      if (m.contains("speed_min")) c.world.traits.speed_min = number(m, "speed_min");
      if (m.contains("speed_max")) c.world.traits.speed_max = number(m, "speed_max");
    }
    if (j.contains("sight")) {
      const auto& s = j.at("sight");
      detail::only_keys(s, {"half_angle_min", "half_angle_max", "radius_min", "radius_max"}, "sight");
      auto& sr = c.world.traits.sight;
      if (s.contains("half_angle_min")) sr.half_angle_min = number(s, "half_angle_min");
      if (s.contains("half_angle_max")) sr.half_angle_max = number(s, "half_angle_max");
      if (s.contains("radius_min")) sr.radius_min = number(s, "radius_min");
      if (s.contains("radius_max")) sr.radius_max = number(s, "radius_max");
    }
    if (j.contains("max_wait_slots")) c.world.max_wait_slots = count(j, "max_wait_slots");
    if (j.contains("trials")) c.trials = count(j, "trials");
    if (j.contains("seed")) c.seed = count(j, "seed");
    if (j.contains("threads")) c.threads = static_cast<unsigned>(count(j, "threads"));
    if (j.contains("histogram_bins")) c.histogram_bins = count(j, "histogram_bins");
    if (j.contains("max_stall_fraction")) c.max_stall_fraction = number(j, "max_stall_fraction");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_config, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_config) throw;
    throw Error(ErrorKind::invalid_config, e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_config, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_config, path + ": " + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Output helpers

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

/// `out` naming a .csv file is used as is; anything else is a directory
/// that receives `default_name`.
inline std::filesystem::path output_file(const std::string& out, const std::string& default_name) {
  std::filesystem::path p(out);
  if (p.extension() == ".csv") {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
  }
  return ensure_dir(out) / default_name;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot write " + p.string());
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// analytic

struct AnalyticOptions {
  double shape = 1.0;
  double rate = 1.0 / 50.0;
  std::uint64_t hops = 4;
  std::optional<double> x_max;  // default: mean + 6 sd
  std::size_t points = 801;
};

struct AnalyticTable {
  SsaLatencyLaw law;
  std::vector<double> x, pdf, cdf;
};

inline AnalyticTable analytic_table(const AnalyticOptions& o) {
  detail::require(o.points >= 2, ErrorKind::invalid_argument, "need at least two grid points");
  AnalyticTable t{sum_hops_law(o.hops, GammaParams(o.shape, o.rate)), {}, {}, {}};
  const auto& total = t.law.total;
  const double top = o.x_max.value_or(total.mean() + 6.0 * std::sqrt(total.variance()));
  detail::require(top > 0.0, ErrorKind::invalid_argument, "x_max must be positive");
  for (std::size_t i = 0; i < o.points; ++i) {
    const double x = top * static_cast<double>(i) / static_cast<double>(o.points - 1);
    t.x.push_back(x);
    t.pdf.push_back(gamma_pdf(total, x));
    t.cdf.push_back(gamma_cdf(total, x));
  }
  return t;
}

/// Writes the Gamma(N * shape, rate) table as CSV (x_ms, pdf_per_ms, cdf)
/// plus an SVG plot next to it. Returns the process exit code.
inline int cmd_analytic(const AnalyticOptions& o, const std::string& out) {
  const auto table = analytic_table(o);
  const auto path = detail::output_file(out, "analytic.csv");
  auto f = detail::open_out(path);
  f << "x_ms,pdf_per_ms,cdf\n";
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    f << detail::fmt(table.x[i]) << ',' << detail::fmt(table.pdf[i]) << ',' << detail::fmt(table.cdf[i])
      << '\n';
  }
  auto svg_path = path;
  svg_path.replace_extension(".svg");
  svg::write_chart(svg_path.string(),
                   "Gamma(" + detail::fmt(table.law.total.shape) + ", " + detail::fmt(table.law.total.rate) + ")",
                   "latency (ms)", "density", {{"pdf", table.x, table.pdf, false}});
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulationResult {
  std::vector<PropagationTrace> traces;
  std::optional<BatchResult> batch;  // empty when every trial stalled
  std::optional<GammaParams> reference;
  std::string reference_source;  // "config", "hop_law", "fitted" or "none"
  std::optional<GammaParams> fitted;
  std::optional<GofReport> ks;
  double stall_fraction = 1.0;
};

/// Law the latency histogram is tested against: explicit reference_law,
/// else the hop-law sum for chain relay with an n-informed rule.
inline std::pair<std::optional<GammaParams>, std::string> reference_law_for(const ExperimentConfig& c) {
  if (c.reference_law) return {c.reference_law, "config"};
  if (c.timing.mode == TimingMode::distance && c.timing.hop_law && c.world.relay == RelayMode::chain &&
      c.rule.kind == SsaCompletionRule::Kind::n_vehicles_informed && c.rule.n >= 2) {
    return {sum_hops_law(c.rule.n - 1, *c.timing.hop_law).total, "hop_law"};
  }
  return {std::nullopt, "fitted"};
}

inline SimulationResult run_simulation(const ExperimentConfig& c) {
  c.validate();
  SimulationResult r;
  r.traces = run_trials(c.world, c.timing, c.rule, c.trials, c.seed, c.threads);
  try {
    r.batch = summarize_batch(r.traces);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::empty_distribution) throw;
    r.reference_source = "none";
    return r;
  }
  r.stall_fraction = r.batch->stall_fraction;
  try {
    r.fitted = fit_gamma_moments(r.batch->latencies);
  } catch (const Error&) {
    // degenerate (e.g. constant slot latencies): no fit
  }
  auto [law, source] = reference_law_for(c);
  if (!law) law = r.fitted;
  r.reference = law;
  r.reference_source = law ? source : "none";
  if (law && r.batch->latencies.size() >= kMinKsSamples) r.ks = ks_test(r.batch->latencies, *law);
  return r;
}

/// Runs the batch and writes latency_samples.csv, histogram.csv,
/// traces.csv, summary.csv and histogram.svg into `out_dir`.
/// Exit code 1 when the stall fraction exceeds max_stall_fraction, every
/// trial stalled, or the KS test rejects at 0.01.
inline int cmd_simulate(const ExperimentConfig& c, const std::string& out_dir) {
  const auto r = run_simulation(c);
  const auto dir = detail::ensure_dir(out_dir);

  {
    auto f = detail::open_out(dir / "traces.csv");
    write_trace_csv_header(f);
    for (std::size_t i = 0; i < r.traces.size(); ++i) write_trace_csv_rows(f, i, r.traces[i]);
  }
  {
    auto f = detail::open_out(dir / "latency_samples.csv");
    if (r.batch) write_samples_csv(f, r.batch->latencies);
    else f << "latency_ms\n";
  }
  std::optional<Histogram> hist;
  if (r.batch) hist = histogram(r.batch->latencies, c.histogram_bins);
  {
    auto f = detail::open_out(dir / "histogram.csv");
    f << "bin_lo_ms,bin_hi_ms,count,density_per_ms,reference_pdf_per_ms\n";
    if (hist) {
      for (std::size_t i = 0; i < hist->counts.size(); ++i) {
        const double mid = 0.5 * (hist->edges[i] + hist->edges[i + 1]);
        f << detail::fmt(hist->edges[i]) << ',' << detail::fmt(hist->edges[i + 1]) << ',' << hist->counts[i]
          << ',' << detail::fmt(hist->densities[i]) << ','
          << (r.reference ? detail::fmt(gamma_pdf(*r.reference, mid)) : std::string("nan")) << '\n';
      }
    }
  }
  {
    auto f = detail::open_out(dir / "summary.csv");
    f << "key,value\n";
    f << "trials," << c.trials << '\n';
    f << "completed," << (r.batch ? r.batch->latencies.size() : 0) << '\n';
    f << "stall_fraction," << detail::fmt(r.stall_fraction) << '\n';
    if (r.batch) {
      f << "mean_ms," << detail::fmt(r.batch->latencies.mean()) << '\n';
      f << "q50_ms," << detail::fmt(r.batch->latencies.quantile(0.5)) << '\n';
    }
    if (r.fitted) {
      f << "fit_shape," << detail::fmt(r.fitted->shape) << '\n';
      f << "fit_rate_per_ms," << detail::fmt(r.fitted->rate) << '\n';
    }
    f << "reference_source," << r.reference_source << '\n';
    if (r.reference) {
      f << "reference_shape," << detail::fmt(r.reference->shape) << '\n';
      f << "reference_rate_per_ms," << detail::fmt(r.reference->rate) << '\n';
    }
    if (r.ks) {
      f << "ks_statistic," << detail::fmt(r.ks->statistic) << '\n';
      f << "ks_p_value," << detail::fmt(r.ks->p_value) << '\n';
      f << "ks_reject_at_0.01," << (r.ks->reject_at_01 ? "true" : "false") << '\n';
    }
  }
  if (hist) {
    std::vector<svg::Series> series{{"simulation", {}, hist->densities, true}};
    series[0].x.assign(hist->edges.begin(), hist->edges.end() - 1);
    if (r.reference) {
      svg::Series ref{"reference law", {}, {}, false};
      for (std::size_t i = 0; i <= 200; ++i) {
        const double x = hist->edges.back() * static_cast<double>(i) / 200.0;
        ref.x.push_back(x);
        ref.y.push_back(gamma_pdf(*r.reference, x));
      }
      series.push_back(std::move(ref));
    }
    svg::write_chart((dir / "histogram.svg").string(), "SSA latency", "latency (ms)", "density", series);
  }

  if (!r.batch || r.stall_fraction > c.max_stall_fraction) return 1;
  if (r.ks && r.ks->reject_at_01) return 1;
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

enum class SweepScale { desk, full };

/// Desk scale keeps each density but shrinks the world to 200 m x 200 m.
inline constexpr double kDeskSide = 200.0;

struct DensityPoint {
  double intensity = 0.0;
  double stall_fraction = 1.0;
  std::optional<EmpiricalDist> latencies;
  double q25 = NAN, q50 = NAN, q75 = NAN;
  std::vector<double> feasibility;  // per sae_thresholds_ms()
};

struct SweepResult {
  std::vector<DensityPoint> points;  // in grid order
  bool quantiles_ordered = true;     // q(l1) <= q(l2) whenever l1 > l2
  bool feasibility_ordered = true;   // feasible(100 ms) nondecreasing in l
};

inline SweepResult run_sweep(ExperimentConfig c, const std::vector<double>& densities, SweepScale scale) {
  detail::require(!densities.empty(), ErrorKind::invalid_config, "density grid is empty");
  for (std::size_t i = 0; i < densities.size(); ++i) {
    detail::require(densities[i] > 0.0, ErrorKind::invalid_config, "densities must be positive");
    for (std::size_t j = 0; j < i; ++j) {
      detail::require(densities[i] != densities[j], ErrorKind::invalid_config,
                      "densities must be distinct");
    }
  }
  if (scale == SweepScale::desk) c.world.area = WorldArea(kDeskSide, kDeskSide);
  SweepResult out;
  for (double lambda : densities) {
    c.world.intensity = AreaIntensity(lambda);
    DensityPoint p;
    p.intensity = lambda;
    try {
      auto batch = run_batch(c.world, c.timing, c.rule, c.trials, c.seed, c.threads);
      p.stall_fraction = batch.stall_fraction;
      p.q25 = batch.latencies.quantile(0.25);
      p.q50 = batch.latencies.quantile(0.50);
      p.q75 = batch.latencies.quantile(0.75);
      for (double t : sae_thresholds_ms()) p.feasibility.push_back(empirical_cdf(batch.latencies, t));
      p.latencies = std::move(batch.latencies);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::empty_distribution) throw;
      p.feasibility.assign(sae_thresholds_ms().size(), 0.0);
      out.quantiles_ordered = false;
    }
    out.points.push_back(std::move(p));
  }

  std::vector<const DensityPoint*> by_density;
  for (const auto& p : out.points) by_density.push_back(&p);
  std::sort(by_density.begin(), by_density.end(),
            [](const DensityPoint* a, const DensityPoint* b) { return a->intensity > b->intensity; });
  const std::size_t at_100 = sae_thresholds_ms().size() - 1;
  for (std::size_t i = 1; i < by_density.size(); ++i) {
    const auto& denser = *by_density[i - 1];
    const auto& sparser = *by_density[i];
    if (!denser.latencies || !sparser.latencies) continue;
    if (denser.q25 > sparser.q25 || denser.q50 > sparser.q50 || denser.q75 > sparser.q75) {
      out.quantiles_ordered = false;
    }
    if (denser.feasibility[at_100] < sparser.feasibility[at_100]) out.feasibility_ordered = false;
  }
  return out;
}

/// Writes cdf_<i>.csv per density, quantiles.csv, sae_feasibility.csv,
/// summary.csv and sweep_cdf.svg. Exit code 1 when an ordering check fails
/// or some density produced no completed trial.
inline int cmd_sweep(const ExperimentConfig& c, const std::vector<double>& densities, SweepScale scale,
                     const std::string& out_dir, double cdf_max_ms = 500.0) {
  const auto result = run_sweep(c, densities, scale);
  const auto dir = detail::ensure_dir(out_dir);
  const double side_w = scale == SweepScale::desk ? kDeskSide : c.world.area.width();
  const double side_d = scale == SweepScale::desk ? kDeskSide : c.world.area.depth();

  std::vector<svg::Series> series;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& p = result.points[i];
    auto f = detail::open_out(dir / ("cdf_" + std::to_string(i) + ".csv"));
    f << "intensity_per_m2,x_ms,cdf\n";
    svg::Series s{"lambda=" + detail::fmt(p.intensity), {}, {}, false};
    if (p.latencies) {
      for (int x = 0; x <= static_cast<int>(cdf_max_ms); ++x) {
        const double F = empirical_cdf(*p.latencies, x);
        f << detail::fmt(p.intensity) << ',' << x << ',' << detail::fmt(F) << '\n';
        s.x.push_back(x);
        s.y.push_back(F);
      }
    }
    series.push_back(std::move(s));
  }
  {
    auto f = detail::open_out(dir / "quantiles.csv");
    f << "intensity_per_m2,line_equivalent_per_km,expected_vehicles,stall_fraction,q25_ms,q50_ms,q75_ms\n";
    for (const auto& p : result.points) {
      f << detail::fmt(p.intensity) << ',' << detail::fmt(density_to_line_equivalent(AreaIntensity(p.intensity)))
        << ',' << detail::fmt(p.intensity * side_w * side_d) << ',' << detail::fmt(p.stall_fraction) << ','
        << detail::fmt(p.q25) << ',' << detail::fmt(p.q50) << ',' << detail::fmt(p.q75) << '\n';
    }
  }
  {
    auto f = detail::open_out(dir / "sae_feasibility.csv");
    f << "intensity_per_m2,use_case,latency_ms,feasible_fraction\n";
    for (const auto& p : result.points) {
      for (const auto& req : sae_requirements()) {
        const auto& ts = sae_thresholds_ms();
        const auto k = static_cast<std::size_t>(std::find(ts.begin(), ts.end(), req.latency_ms) - ts.begin());
        f << detail::fmt(p.intensity) << ',' << req.use_case << ',' << detail::fmt(req.latency_ms) << ','
          << detail::fmt(p.feasibility[k]) << '\n';
      }
    }
  }
  {
    auto f = detail::open_out(dir / "summary.csv");
    f << "key,value\n";
    f << "scale," << (scale == SweepScale::desk ? "desk" : "full") << '\n';
    f << "quantiles_ordered," << (result.quantiles_ordered ? "true" : "false") << '\n';
    f << "feasibility_100ms_ordered," << (result.feasibility_ordered ? "true" : "false") << '\n';
  }
  svg::write_chart((dir / "sweep_cdf.svg").string(), "SSA latency CDF by density", "latency (ms)", "CDF",
                   series);
  return result.quantiles_ordered && result.feasibility_ordered ? 0 : 1;
}

// ---------------------------------------------------------------------------
// thinning

struct ThinningResult {
  std::vector<std::uint64_t> counts;
  double rho = 0.0;
  double mean = 0.0;  // rho * intensity * |world|
  GofReport report;
};

/// Counts vehicles inside a disk of `radius` for `seeds` independent PPP
/// fields. The disk center is uniform over positions where the disk fits
/// inside the world; a disk that cannot fit is centered and clipped.
inline ThinningResult thinning_counts(const WorldConfig& world, double radius, std::size_t seeds,
                                      std::uint64_t root_seed) {
  detail::require(radius > 0.0, ErrorKind::invalid_config, "thinning radius must be positive");
  detail::require(seeds >= 1, ErrorKind::invalid_config, "need at least one seed");
  const auto& area = world.area;
  const bool fits = 2.0 * radius <= area.width() && 2.0 * radius <= area.depth();
  ThinningResult r;
  r.rho = fits ? std::numbers::pi * radius * radius / area.area()
               : disk_area_fraction(area, area.center(), radius);
  r.mean = r.rho * world.intensity.expected_count(area.area());
  r.counts.reserve(seeds);
  VehicleTraits traits = world.traits;
  traits.tx_range = radius;
  for (std::size_t i = 0; i < seeds; ++i) {
    const auto field = sample_ppp(world.intensity, area, derive_seed(root_seed, i), traits);
    Position center = area.center();
    if (fits) {
      Rng placement(derive_seed(~root_seed, i));
      center = {placement.uniform(radius, area.width() - radius), placement.uniform(radius, area.depth() - radius)};
    }
    r.counts.push_back(count_in_disk(field, center, radius));
  }
  r.report = chi_square_poisson(r.counts, r.mean);
  return r;
}

/// Writes thinning_pmf.csv (n, observed frequency, Poisson pmf),
/// thinning_report.csv and thinning.svg. Exit code 1 on rejection at 0.01.
inline int cmd_thinning(const ExperimentConfig& c, const std::string& out_dir) {
  const auto r = thinning_counts(c.world, c.world.traits.tx_range, c.trials, c.seed);
  const auto dir = detail::ensure_dir(out_dir);
  const std::uint64_t top = *std::max_element(r.counts.begin(), r.counts.end());
  std::vector<double> freq(top + 1, 0.0);
  for (auto k : r.counts) freq[k] += 1.0 / static_cast<double>(r.counts.size());
  svg::Series sampled{"sampled", {}, {}, true}, pmf{"Poisson pmf", {}, {}, false};
  {
    auto f = detail::open_out(dir / "thinning_pmf.csv");
    f << "n_vehicles,observed_frequency,poisson_pmf\n";
    for (std::uint64_t k = 0; k <= top; ++k) {
      const auto kd = static_cast<double>(k);
      const double p = r.mean > 0.0 ? std::exp(kd * std::log(r.mean) - r.mean - std::lgamma(kd + 1.0))
                                    : (k == 0 ? 1.0 : 0.0);
      f << k << ',' << detail::fmt(freq[k]) << ',' << detail::fmt(p) << '\n';
      sampled.x.push_back(kd);
      sampled.y.push_back(freq[k]);
      pmf.x.push_back(kd);
      pmf.y.push_back(p);
    }
  }
  {
    auto f = detail::open_out(dir / "thinning_report.csv");
    f << "rho,poisson_mean,seeds,chi_square,dof,p_value,reject_at_0.01\n";
    f << detail::fmt(r.rho) << ',' << detail::fmt(r.mean) << ',' << r.counts.size() << ','
      << detail::fmt(r.report.statistic) << ',' << r.report.dof << ',' << detail::fmt(r.report.p_value) << ','
      << (r.report.reject_at_01 ? "true" : "false") << '\n';
  }
  svg::write_chart((dir / "thinning.svg").string(), "Vehicles in a transmission disk", "count", "probability",
                   {sampled, pmf});
  return r.report.reject_at_01 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// coverage

/// Scenario file:
///   {"target": {"x", "y", "radius"},
///    "arcs": [{"x", "y", "heading", "half_angle", "radius"}, ...]
///      or "steps": [[arc, ...], [arc, ...], ...],
///    "sample_points": 100000, "seed": 1, "threshold": 0.9 (optional)}
struct CoverageScenario {
  TargetDisk target;
  std::vector<std::vector<SightArc>> steps;
  std::size_t sample_points = 100000;
  std::uint64_t seed = 1;
  std::optional<double> threshold;
};

inline CoverageScenario parse_scenario(const nlohmann::json& j) {
  using detail::number;
  detail::only_keys(j, {"target", "arcs", "steps", "sample_points", "seed", "threshold"}, "scenario");
  CoverageScenario s;
  try {
    const auto& t = j.at("target");
    detail::only_keys(t, {"x", "y", "radius"}, "target");
    s.target = {{number(t, "x"), number(t, "y")}, number(t, "radius")};
    s.target.validate();
    auto arc_from = [](const nlohmann::json& a) {
      detail::only_keys(a, {"x", "y", "heading", "half_angle", "radius"}, "arc");
      SightArc arc{{number(a, "x"), number(a, "y")}, number(a, "heading"), number(a, "half_angle"),
                   number(a, "radius")};
      arc.validate();
      return arc;
    };
    if (j.contains("arcs") && j.contains("steps")) {
      throw Error(ErrorKind::invalid_config, "scenario takes either arcs or steps, not both");
    }
    if (j.contains("arcs")) {
      s.steps.emplace_back();
      for (const auto& a : j.at("arcs")) s.steps.back().push_back(arc_from(a));
    } else if (j.contains("steps")) {
      for (const auto& step : j.at("steps")) {
        s.steps.emplace_back();
        for (const auto& a : step) s.steps.back().push_back(arc_from(a));
      }
    }
    if (j.contains("sample_points")) s.sample_points = detail::count(j, "sample_points");
    if (j.contains("seed")) s.seed = detail::count(j, "seed");
    if (j.contains("threshold")) s.threshold = number(j, "threshold");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_config, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_config) throw;
    throw Error(ErrorKind::invalid_config, e.what());
  }
  detail::require(s.sample_points >= kMinCoverageSamples, ErrorKind::invalid_config,
                  "sample_points must be >= 1000");
  return s;
}

/// Writes coverage.csv (cumulative rate after each time step) and, when a
/// threshold is given, min_cover.csv with the smallest qualifying subset.
inline int cmd_coverage(const CoverageScenario& s, const std::string& out) {
  const auto path = detail::output_file(out, "coverage.csv");
  {
    auto f = detail::open_out(path);
    f << "step,arcs,rate,std_err,sample_points\n";
    std::vector<SightArc> acc;
    if (s.steps.empty()) {
      const auto est = coverage_rate(acc, s.target, s.sample_points, s.seed);
      f << "0,0," << detail::fmt(est.rate) << ',' << detail::fmt(est.std_err) << ',' << est.sample_points << '\n';
    }
    for (std::size_t t = 0; t < s.steps.size(); ++t) {
      acc = accumulate_vision(std::span(s.steps.data(), t + 1));
      const auto est = coverage_rate(acc, s.target, s.sample_points, s.seed);
      f << t << ',' << acc.size() << ',' << detail::fmt(est.rate) << ',' << detail::fmt(est.std_err) << ','
        << est.sample_points << '\n';
    }
  }
  if (s.threshold) {
    auto subset_path = path;
    subset_path.replace_filename("min_cover.csv");
    auto f = detail::open_out(subset_path);
    f << "threshold,found,size,indices,rate\n";
    const auto flat = accumulate_vision(s.steps);
    const auto best = min_cover_subset(flat, s.target, *s.threshold, s.sample_points, s.seed);
    f << detail::fmt(*s.threshold) << ',' << (best ? "true" : "false") << ',';
    if (best) {
      std::string ids;
      for (std::size_t i = 0; i < best->indices.size(); ++i) {
        ids += (i ? ";" : "") + std::to_string(best->indices[i]);
      }
      f << best->indices.size() << ',' << ids << ',' << detail::fmt(best->estimate.rate) << '\n';
    } else {
      f << "0,,nan\n";
    }
  }
  return 0;
}

}  // namespace ssa
