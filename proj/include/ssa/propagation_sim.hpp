#pragma once

// Monte Carlo propagation of a hazard report through a PPP vehicle field.
//
// A trial drops a hazard uniformly in the world. The vehicle nearest to it
// detects it at t = 0 and becomes the first holder. In chain relay (the
// default) the current holder hands the report to its nearest uninformed
// in-range neighbor, which becomes the next holder. Flooding relay informs
// every uninformed vehicle in range of any informed vehicle once per round.
// The trial ends when the completion rule holds or the report cannot move.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "ssa/coverage.hpp"
#include "ssa/error.hpp"
#include "ssa/geometry.hpp"
#include "ssa/latency_model.hpp"
#include "ssa/rng.hpp"
#include "ssa/stats.hpp"
#include "ssa/stochastic_geometry.hpp"

namespace ssa {

enum class TimingMode { slot, distance, slot_plus_distance };
enum class RelayMode { chain, flooding };

/// Per-hop timing. `slot_ms` is the broadcast interval; `signal_speed` is in
/// m/s. In distance mode a `hop_law` (rate in 1/ms) replaces the geometric
/// d / signal_speed with a draw from that law.
struct TimingModel {
  TimingMode mode = TimingMode::slot_plus_distance;
  double slot_ms = 100.0;
  double signal_speed = kSpeedOfLight;
  std::optional<GammaParams> hop_law;

  void validate() const {
    detail::require(std::isfinite(slot_ms) && slot_ms >= 0.0, ErrorKind::invalid_config,
                    "slot_ms must be non-negative");
    detail::require(mode != TimingMode::slot || slot_ms > 0.0, ErrorKind::invalid_config,
                    "slot timing needs slot_ms > 0");
    detail::require(std::isfinite(signal_speed) && signal_speed > 0.0, ErrorKind::invalid_config,
                    "signal_speed must be positive");
  }

  bool slotted() const { return mode != TimingMode::distance; }
  double slot_seconds() const { return slot_ms * 1e-3; }

  /// Seconds for one hop of `distance_m`.
  double hop_seconds(double distance_m, Rng& rng) const {
    switch (mode) {
      case TimingMode::slot:
        return slot_seconds();
      case TimingMode::distance:
        if (hop_law) return gamma_sample(*hop_law, rng) * 1e-3;
        return hop_time(distance_m, signal_speed).seconds;
      case TimingMode::slot_plus_distance:
        return slot_seconds() + hop_time(distance_m, signal_speed).seconds;
    }
    return 0.0;
  }
};

struct SsaCompletionRule {
  enum class Kind { n_vehicles_informed, coverage_threshold };

  Kind kind = Kind::n_vehicles_informed;
  std::size_t n = 5;
  double threshold = 1.0;
  // Target disk around the hazard for the coverage rule.
  double target_radius = 50.0;
  std::size_t sample_points = 2000;

  static SsaCompletionRule informed(std::size_t n) {
    SsaCompletionRule r;
    r.kind = Kind::n_vehicles_informed;
    r.n = n;
    return r;
  }

  static SsaCompletionRule coverage(double threshold, double target_radius = 50.0) {
    SsaCompletionRule r;
    r.kind = Kind::coverage_threshold;
    r.threshold = threshold;
    r.target_radius = target_radius;
    return r;
  }

  void validate() const {
    if (kind == Kind::n_vehicles_informed) {
      detail::require(n >= 1, ErrorKind::invalid_config, "completion rule needs n >= 1");
    } else {
      detail::require(threshold > 0.0 && threshold <= 1.0, ErrorKind::invalid_config,
                      "coverage threshold must lie in (0, 1]");
      detail::require(target_radius > 0.0, ErrorKind::invalid_config,
                      "target radius must be positive");
      detail::require(sample_points >= kMinCoverageSamples, ErrorKind::invalid_config,
                      "coverage rule needs at least 1000 sample points");
    }
  }
};

/// Geometry and population of one experiment.
struct WorldConfig {
  WorldArea area{1000.0, 1000.0};
  AreaIntensity intensity{100.0 / 1e6};
  VehicleTraits traits;
  RelayMode relay = RelayMode::chain;
  bool mobility = true;
  // Slots a stuck holder waits for vehicles to move into range before the
  // trial is declared stalled (slotted timing with mobility only).
  std::size_t max_wait_slots = 20;

  void validate() const {
    traits.validate();
  }
};

struct Hazard {
  Position position;
};

struct HopRecord {
  VehicleId from = 0;
  VehicleId to = 0;
  double distance_m = 0.0;
  double hop_time_s = 0.0;
  double cumulative_s = 0.0;
};

struct PropagationTrace {
  std::vector<HopRecord> hops;
  bool completed = false;
  std::size_t informed_count = 0;
  double total_latency_s = 0.0;  // meaningful only when completed
  std::optional<VehicleId> detector;
  Hazard hazard;
};

/// Advances every vehicle by speed * dt along its heading. Edge crossings
/// reflect specularly: the position is mirrored about the edge and the
/// heading component normal to that edge is negated.
inline VehicleField step_mobility(const VehicleField& field, double dt) {
  detail::require(dt >= 0.0, ErrorKind::invalid_argument, "dt must be non-negative");
  if (dt == 0.0) return field;
  const double w = field.area().width();
  const double h = field.area().depth();
  auto fold = [](double x, double length, bool& flipped) {
    const double q = std::floor(x / length);
    const double r = x - q * length;
    flipped = std::fmod(std::abs(q), 2.0) == 1.0;
    return std::clamp(flipped ? length - r : r, 0.0, length);
  };
  std::vector<Vehicle> moved = field.vehicles();
  for (auto& v : moved) {
    if (v.speed == 0.0) continue;
    double vx = std::cos(v.heading);
    double vy = std::sin(v.heading);
    bool flip_x = false, flip_y = false;
    v.position.x = fold(v.position.x + v.speed * dt * vx, w, flip_x);
    v.position.y = fold(v.position.y + v.speed * dt * vy, h, flip_y);
    if (flip_x || flip_y) {
      if (flip_x) vx = -vx;
      if (flip_y) vy = -vy;
      v.heading = wrap_angle(std::atan2(vy, vx));
    }
    v.sight.apex = v.position;
    v.sight.heading = v.heading;
  }
  return VehicleField(field.area(), std::move(moved), field.cell_size());
}

namespace detail {

class TrialState {
 public:
  TrialState(VehicleField field, Hazard hazard, const TimingModel& timing,
             const SsaCompletionRule& rule, const WorldConfig& world, Rng& rng)
      : field_(std::move(field)),
        timing_(timing),
        rule_(rule),
        world_(world),
        rng_(rng),
        informed_(field_.size(), 0) {
    trace_.hazard = hazard;
    if (rule_.kind == SsaCompletionRule::Kind::coverage_threshold) {
      coverage_.emplace(TargetDisk{hazard.position, rule_.target_radius}, rule_.sample_points,
                        rng_());
    }
  }

  PropagationTrace run() {
    if (field_.empty()) return std::move(trace_);
    const auto detector = field_.nearest_to(trace_.hazard.position,
                                            std::numeric_limits<double>::infinity(),
                                            [](VehicleId) { return false; });
    trace_.detector = detector;
    mark_informed(*detector);
    holder_ = *detector;
    observe();
    while (!rule_met()) {
      const bool progressed = world_.relay == RelayMode::chain ? chain_step() : flood_step();
      if (!progressed) return std::move(trace_);
    }
    trace_.completed = true;
    trace_.total_latency_s = now_;
    return std::move(trace_);
  }

 private:
  bool moving() const { return world_.mobility && timing_.slotted(); }

  void mark_informed(VehicleId id) {
    informed_[id] = 1;
    order_.push_back(id);
    trace_.informed_count = order_.size();
  }

  // Adds every informed vehicle's current sight sector to the coverage union.
  void observe() {
    if (!coverage_) return;
    for (VehicleId id : order_) coverage_->add(field_[id].sight);
  }

  bool rule_met() const {
    if (rule_.kind == SsaCompletionRule::Kind::n_vehicles_informed) return order_.size() >= rule_.n;
    return coverage_->rate() >= rule_.threshold;
  }

  // Lets one slot pass with vehicles moving. False once waiting is futile.
  bool wait_one_slot() {
    if (!moving() || waited_ >= world_.max_wait_slots) return false;
    ++waited_;
    pending_wait_ += timing_.slot_seconds();
    now_ += timing_.slot_seconds();
    field_ = step_mobility(field_, timing_.slot_seconds());
    observe();
    return true;
  }

  void advance_clock(double hop_s) {
    now_ += hop_s;
    if (moving()) field_ = step_mobility(field_, timing_.slot_seconds());
    waited_ = 0;
    pending_wait_ = 0.0;
    observe();
  }

  bool chain_step() {
    while (true) {
      const auto next = nearest_neighbor(field_, holder_, field_[holder_].tx_range,
                                         [&](VehicleId id) { return informed_[id] != 0; });
      if (next) {
        const double d = distance(field_[holder_].position, field_[*next].position);
        const double hop_s = timing_.hop_seconds(d, rng_);
        HopRecord rec{holder_, *next, d, hop_s + pending_wait_, now_ + hop_s};
        trace_.hops.push_back(rec);
        mark_informed(*next);
        holder_ = *next;
        advance_clock(hop_s);
        return true;
      }
      if (!wait_one_slot()) return false;
    }
  }

  bool flood_step() {
    while (true) {
      // best sender per newly reached vehicle: (distance^2, sender id)
      std::vector<std::pair<VehicleId, std::pair<double, VehicleId>>> reached;
      for (VehicleId sender : order_) {
        const auto& s = field_[sender];
        for (VehicleId id : field_.within(s.position, s.tx_range)) {
          if (informed_[id]) continue;
          const double d2 = squared_distance(s.position, field_[id].position);
          reached.push_back({id, {d2, sender}});
        }
      }
      if (!reached.empty()) {
        std::sort(reached.begin(), reached.end());
        std::vector<HopRecord> round;
        double max_d = 0.0;
        for (std::size_t i = 0; i < reached.size(); ++i) {
          if (i > 0 && reached[i].first == reached[i - 1].first) continue;
          const double d = std::sqrt(reached[i].second.first);
          max_d = std::max(max_d, d);
          round.push_back({reached[i].second.second, reached[i].first, d, 0.0, 0.0});
        }
        const double round_s = timing_.hop_seconds(max_d, rng_);
        for (auto& rec : round) {
          rec.hop_time_s = round_s + pending_wait_;
          rec.cumulative_s = now_ + round_s;
          trace_.hops.push_back(rec);
          mark_informed(rec.to);
        }
        advance_clock(round_s);
        return true;
      }
      if (!wait_one_slot()) return false;
    }
  }

  VehicleField field_;
  const TimingModel& timing_;
  const SsaCompletionRule& rule_;
  const WorldConfig& world_;
  Rng& rng_;
  std::vector<std::uint8_t> informed_;
  std::vector<VehicleId> order_;
  std::optional<CoverageAccumulator> coverage_;
  PropagationTrace trace_;
  VehicleId holder_ = 0;
  double now_ = 0.0;
  double pending_wait_ = 0.0;
  std::size_t waited_ = 0;
};

}  // namespace detail

/// Propagates a hazard report through a given field. Randomness (hop-law
/// draws, coverage points) comes from `rng`.
inline PropagationTrace propagate(VehicleField field, Hazard hazard, const TimingModel& timing,
                                  const SsaCompletionRule& rule, const WorldConfig& world,
                                  Rng& rng) {
  timing.validate();
  rule.validate();
  detail::require(field.area().contains(hazard.position), ErrorKind::invalid_argument,
                  "hazard outside the world");
  return detail::TrialState(std::move(field), hazard, timing, rule, world, rng).run();
}

inline VehicleField sample_field(const WorldConfig& world, Rng& rng) {
  return sample_ppp(world.intensity, world.area, rng(), world.traits);
}

/// One trial: sample a field and a uniform hazard, then propagate.
inline PropagationTrace run_trial(const WorldConfig& world, const TimingModel& timing,
                                  const SsaCompletionRule& rule, std::uint64_t seed) {
  world.validate();
  Rng rng(seed);
  auto field = sample_field(world, rng);
  const Hazard hazard{{rng.uniform(0.0, world.area.width()), rng.uniform(0.0, world.area.depth())}};
  return propagate(std::move(field), hazard, timing, rule, world, rng);
}

/// Runs trials 0..trials-1 with seeds derive_seed(root_seed, i). Output is
/// indexed by trial and does not depend on `threads`.
inline std::vector<PropagationTrace> run_trials(const WorldConfig& world, const TimingModel& timing,
                                                const SsaCompletionRule& rule, std::size_t trials,
                                                std::uint64_t root_seed, unsigned threads = 1) {
  detail::require(trials >= 1, ErrorKind::invalid_config, "trials must be >= 1");
  world.validate();
  timing.validate();
  rule.validate();
  std::vector<PropagationTrace> out(trials);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    for (std::size_t i = 0; i < trials; ++i) out[i] = run_trial(world, timing, rule, derive_seed(root_seed, i));
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < trials; i += threads) {
          out[i] = run_trial(world, timing, rule, derive_seed(root_seed, i));
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

struct BatchResult {
  EmpiricalDist latencies;  // completed trials, milliseconds
  double stall_fraction = 0.0;
  std::size_t trials = 0;
};

/// Latencies of completed traces (ms) and the stalled fraction.
inline BatchResult summarize_batch(const std::vector<PropagationTrace>& traces) {
  std::vector<double> ms;
  ms.reserve(traces.size());
  for (const auto& t : traces) {
    if (t.completed) ms.push_back(t.total_latency_s * 1e3);
  }
  if (ms.empty()) throw Error(ErrorKind::empty_distribution, "every trial stalled");
  BatchResult r;
  r.trials = traces.size();
  r.stall_fraction = 1.0 - static_cast<double>(ms.size()) / static_cast<double>(traces.size());
  r.latencies = EmpiricalDist(std::move(ms), "ms");
  return r;
}

inline BatchResult run_batch(const WorldConfig& world, const TimingModel& timing,
                             const SsaCompletionRule& rule, std::size_t trials,
                             std::uint64_t root_seed, unsigned threads = 1) {
  return summarize_batch(run_trials(world, timing, rule, trials, root_seed, threads));
}

inline void write_trace_csv_header(std::ostream& out) {
  out << "trial_id,hop_idx,from_id,to_id,distance_m,hop_time_s,cumulative_s\n";
}

inline void write_trace_csv_rows(std::ostream& out, std::size_t trial_id,
                                 const PropagationTrace& trace) {
  char buf[256];
  for (std::size_t i = 0; i < trace.hops.size(); ++i) {
    const auto& h = trace.hops[i];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%u,%u,%.17g,%.17g,%.17g\n", trial_id, i,
                  static_cast<unsigned>(h.from), static_cast<unsigned>(h.to), h.distance_m,
                  h.hop_time_s, h.cumulative_s);
    out << buf;
  }
}

}  // namespace ssa
