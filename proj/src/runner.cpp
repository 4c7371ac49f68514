#include "hisac/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hisac/baselines.hpp"
#include "hisac/log.hpp"
#include "hisac/metrics.hpp"
#include "hisac/rng.hpp"

namespace hisac {

namespace {

double snap_to(double value, double step) { return std::round(value / step) * step; }

double range_to_delay(double range_m, const Geometry& g) {
  if (g.mode == GeometryMode::MonoStatic)
    return g.mono_round_trip ? 2.0 * range_m / kSpeedOfLight : range_m / kSpeedOfLight;
  return (range_m + g.distance_m) / kSpeedOfLight;
}

double delay_to_range(double delay_s, const Geometry& g) {
  if (g.mode == GeometryMode::MonoStatic)
    return g.mono_round_trip ? kSpeedOfLight * delay_s / 2.0 : kSpeedOfLight * delay_s;
  return kSpeedOfLight * delay_s - g.distance_m;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Squared magnitude of the inverse DFT of the model CFR, evaluated in closed
// form (each path contributes a shifted Dirichlet kernel), restricted to
// [0, tau_max] and normalized to its maximum.
void append_pdp(std::string& body, const RangeReport& report, const FrequencyPlan& plan,
                double tau_max) {
  if (report.entries.empty()) return;
  const double step = 1.0 / (plan.K * plan.delta_f);
  std::vector<double> power;
  for (int m = 0; m * step <= tau_max * (1.0 + 1e-12); ++m) {
    const double tau = m * step;
    cplx h{0.0, 0.0};
    for (const auto& e : report.entries) {
      const double theta = kTwoPi * plan.delta_f * (tau - e.delay_s);
      const cplx rho = std::polar(1.0, theta);
      cplx s{1.0, 0.0};
      if (std::abs(cplx{1.0, 0.0} - rho) >= 1e-12)
        s = (cplx{1.0, 0.0} - std::polar(1.0, theta * plan.K)) /
            (static_cast<double>(plan.K) * (cplx{1.0, 0.0} - rho));
      h += e.amp * s;
    }
    power.push_back(std::norm(h));
  }
  const double peak = *std::max_element(power.begin(), power.end());
  if (peak <= 0.0) return;
  for (std::size_t m = 0; m < power.size(); ++m) {
    body += fmt(static_cast<double>(m) * step);
    body += ',';
    body += std::to_string(report.slot);
    body += ',';
    body += fmt(power[m] / peak);
    body += '\n';
  }
}

void append_ranges(std::string& body, const RangeReport& report, int trial, double snr_db) {
  for (const auto& e : report.entries) {
    body += std::to_string(trial);
    body += ',';
    body += fmt(snr_db);
    body += ',';
    body += std::to_string(report.slot);
    body += ',';
    body += fmt(e.range_m);
    body += ',';
    body += fmt(e.amp.real());
    body += ',';
    body += fmt(e.amp.imag());
    body += ',';
    body += fmt(e.delay_s);
    body += '\n';
  }
}

}  // namespace

std::vector<double> TrialScene::truth_at(const Geometry& geometry, int slot) const {
  std::vector<double> out;
  const std::size_t first = has_anchor ? 1 : 0;
  const std::size_t last = std::min(first + truth_ranges_m.size(), scene.paths.size());
  for (std::size_t i = first; i < last; ++i)
    out.push_back(delay_to_range(scene.delay_at(i, slot), geometry));
  std::sort(out.begin(), out.end());
  return out;
}

TrialScene make_trial_scene(const Scenario& sc, int trial) {
  const SceneTemplate& t = sc.scene;
  std::vector<double> ranges;
  if (!t.pair_spacings_m.empty()) {
    const double d = t.pair_spacings_m[static_cast<std::size_t>(trial) % t.pair_spacings_m.size()];
    ranges = {t.base_range_m - d, t.base_range_m};
  } else {
    ranges = t.target_ranges_m;
  }

  std::vector<double> delays;
  delays.reserve(ranges.size());
  for (double r : ranges) delays.push_back(range_to_delay(r, sc.geometry));
  double anchor_delay = t.anchor_delay_s;

  double step = 0.0;
  if (t.snap == SceneTemplate::Snap::Fused) step = sc.fused_grid_step();
  if (t.snap == SceneTemplate::Snap::Coarse) step = sc.coarse_step(0);
  if (step > 0.0) {
    for (double& d : delays) d = snap_to(d, step);
    if (anchor_delay > 0.0) anchor_delay = snap_to(anchor_delay, step);
  }

  std::vector<double> mags(delays.size(), 1.0);
  for (std::size_t i = 0; i < std::min(t.target_amps.size(), mags.size()); ++i)
    mags[i] = t.target_amps[i];
  const double max_mag = mags.empty() ? 1.0 : *std::max_element(mags.begin(), mags.end());

  const double drift =
      sc.geometry.mode == GeometryMode::MonoStatic && sc.geometry.mono_round_trip
          ? 2.0 * t.target_speed_mps / kSpeedOfLight
          : t.target_speed_mps / kSpeedOfLight;

  RandomStream stream(derive_seed(sc.seed, {static_cast<std::uint64_t>(trial),
                                            seed_purpose::kScene}));
  std::vector<PathComponent> targets;
  targets.reserve(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i) {
    cplx amp{mags[i], 0.0};
    if (t.amp_mode == SceneTemplate::AmpMode::RandomPhase)
      amp = std::polar(mags[i], stream.uniform(0.0, kTwoPi));
    targets.push_back({delays[i], amp, drift});
  }
  std::sort(targets.begin(), targets.end(),
            [](const PathComponent& a, const PathComponent& b) { return a.delay_s < b.delay_s; });

  TrialScene out;
  out.has_anchor = anchor_delay > 0.0;
  if (out.has_anchor)
    out.scene.paths.push_back({anchor_delay, cplx{t.anchor_gain * max_mag, 0.0}, 0.0});
  out.scene.paths.insert(out.scene.paths.end(), targets.begin(), targets.end());
  // Clutter goes after the targets so the [anchor, targets...] prefix keeps
  // its meaning; phases are drawn after the target phases so clutter-free
  // scenes are unchanged by this feature.
  for (const auto& c : t.clutter)
    out.scene.paths.push_back({c.delay_s, std::polar(c.amp, stream.uniform(0.0, kTwoPi)), 0.0});
  out.scene.slot_times.resize(static_cast<std::size_t>(sc.slots));
  for (int n = 0; n < sc.slots; ++n) out.scene.slot_times[static_cast<std::size_t>(n)] = n * sc.ifs_s;

  for (const auto& p : targets) out.truth_ranges_m.push_back(delay_to_range(p.delay_s, sc.geometry));
  std::sort(out.truth_ranges_m.begin(), out.truth_ranges_m.end());
  if (out.truth_ranges_m.size() >= 2) {
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < out.truth_ranges_m.size(); ++i)
      spacing = std::min(spacing, out.truth_ranges_m[i] - out.truth_ranges_m[i - 1]);
    out.min_spacing_m = spacing;
  } else {
    out.min_spacing_m = sc.detect_tol_m;
  }
  return out;
}

OffsetState make_trial_offsets(const Scenario& sc, int trial) {
  OffsetModel model;
  model.to_range_s = sc.offsets.to_range_s;
  model.cfo_range_hz = sc.offsets.cfo_range_hz;
  model.rpo_range = sc.offsets.rpo_range;
  model.mode = sc.offsets.mode;
  std::vector<double> slot_times(static_cast<std::size_t>(sc.slots));
  for (int n = 0; n < sc.slots; ++n) slot_times[static_cast<std::size_t>(n)] = n * sc.ifs_s;
  OffsetState state = gen_offsets(derive_seed(sc.seed, {static_cast<std::uint64_t>(trial)}), model,
                                  sc.subsystems, slot_times);
  if (sc.offsets.snap_to_coarse) {
    for (std::size_t si = 0; si < sc.subsystems.size(); ++si) {
      const double step = 1.0 / (4.0 * sc.subsystems[si].Bi);
      for (auto& e : state.entries[si]) e.tau_o = snap_to(e.tau_o, step);
    }
  }
  return state;
}

std::uint64_t slice_noise_seed(const Scenario& sc, int trial, int snr_index, int subsystem_id,
                               int subband, int slot) {
  return derive_seed(sc.seed, {static_cast<std::uint64_t>(trial),
                               static_cast<std::uint64_t>(snr_index),
                               static_cast<std::uint64_t>(subsystem_id),
                               static_cast<std::uint64_t>(subband),
                               static_cast<std::uint64_t>(slot), seed_purpose::kNoise});
}

std::uint64_t baseline_noise_seed(const Scenario& sc, int trial, int snr_index, int slot,
                                  int which) {
  return derive_seed(sc.seed, {static_cast<std::uint64_t>(trial),
                               static_cast<std::uint64_t>(snr_index),
                               static_cast<std::uint64_t>(slot),
                               static_cast<std::uint64_t>(which), seed_purpose::kBaselineNoise});
}

TrialData make_trial(const Scenario& sc, int trial, int snr_index) {
  TrialData data;
  data.truth = make_trial_scene(sc, trial);
  data.offsets = make_trial_offsets(sc, trial);
  const double snr = sc.snr_db.at(static_cast<std::size_t>(snr_index));

  data.scene_per_slot.assign(static_cast<std::size_t>(sc.slots), data.truth.scene);
  if (sc.scene.amp_mode == SceneTemplate::AmpMode::RandomPhasePerSlot) {
    for (int n = 0; n < sc.slots; ++n) {
      RandomStream rot(derive_seed(sc.seed, {static_cast<std::uint64_t>(trial),
                                             seed_purpose::kScene,
                                             static_cast<std::uint64_t>(n) + 1}));
      auto& paths = data.scene_per_slot[static_cast<std::size_t>(n)].paths;
      const std::size_t first = data.truth.has_anchor ? 1 : 0;
      const std::size_t last = first + data.truth.truth_ranges_m.size();  // clutter stays put
      for (std::size_t i = first; i < last && i < paths.size(); ++i)
        paths[i].amp *= std::polar(1.0, rot.uniform(0.0, kTwoPi));
    }
  }

  std::vector<std::pair<int, int>> pairs;  // (subsystem index, subband index)
  for (std::size_t si = 0; si < sc.subsystems.size(); ++si)
    for (std::size_t bi = 0; bi < sc.subsystems[si].subbands.size(); ++bi)
      pairs.emplace_back(static_cast<int>(si), static_cast<int>(bi));

  data.slices_per_slot.resize(static_cast<std::size_t>(sc.slots));
  std::vector<int> last_seen(pairs.size(), -1);
  std::vector<CfrSlice> latest(pairs.size());
  for (int n = 0; n < sc.slots; ++n) {
    std::vector<std::size_t> scheduled;
    if (sc.staggered) {
      scheduled = {static_cast<std::size_t>(n) % pairs.size()};
    } else {
      scheduled.resize(pairs.size());
      for (std::size_t p = 0; p < pairs.size(); ++p) scheduled[p] = p;
    }
    for (std::size_t p : scheduled) {
      const auto& sub = sc.subsystems[static_cast<std::size_t>(pairs[p].first)];
      CfrSlice slice = synth_subband_cfr(
          data.scene_per_slot[static_cast<std::size_t>(n)], sc.plan, sub, pairs[p].second,
          data.offsets, n, snr, slice_noise_seed(sc, trial, snr_index, sub.id, pairs[p].second, n));
      data.slices_per_slot[static_cast<std::size_t>(n)].push_back(slice);
      last_seen[p] = n;
      latest[p] = std::move(slice);
    }
    if (sc.staggered) {
      bool complete = true;
      for (std::size_t p = 0; p < pairs.size(); ++p)
        complete = complete && last_seen[p] >= 0 && n - last_seen[p] < sc.staleness;
      if (complete) {
        data.fusable_slots.push_back(n);
        data.fusable_sets.emplace_back(latest.begin(), latest.end());
      }
    } else {
      data.fusable_slots.push_back(n);
      data.fusable_sets.push_back(data.slices_per_slot[static_cast<std::size_t>(n)]);
    }
  }
  return data;
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {"hisac", "fullband", "contiguous",
                                                   "spotfi_hisac"};
  return methods;
}

RunResult run_scenario(const Scenario& sc, std::vector<std::string> methods) {
  if (methods.empty()) methods = known_methods();
  std::vector<std::string> requested;
  for (const auto& m : methods) {
    const auto& known = known_methods();
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw std::runtime_error("unknown method: " + m);
    if (std::find(requested.begin(), requested.end(), m) == requested.end())
      requested.push_back(m);
  }
  ValidationReport vr = validate_scenario(sc);
  if (!vr.ok()) throw std::runtime_error("invalid scenario: " + vr.violations.front());

  struct Acc {
    double sumsq = 0.0;
    long det = 0;
  };
  const std::size_t n_snr = sc.snr_db.size();
  std::map<std::string, std::vector<Acc>> acc;
  for (const auto& m : requested) acc[m].resize(n_snr);
  std::vector<long> full_det(n_snr, 0);
  std::map<std::string, std::string> ranges_body;
  std::map<std::string, std::string> pdp_body;
  const bool agg = sc.aggregation.enabled;
  auto requested_has = [&requested](const std::string& name) {
    return std::find(requested.begin(), requested.end(), name) != requested.end();
  };
  const bool want_fullband = requested_has("fullband");

  for (std::size_t snr_index = 0; snr_index < n_snr; ++snr_index) {
    const double snr = sc.snr_db[snr_index];
    for (int trial = 0; trial < sc.trials; ++trial) {
      TrialData data = make_trial(sc, trial, static_cast<int>(snr_index));
      if (data.fusable_slots.empty()) {
        log_warn("trial " + std::to_string(trial) + ": no fusable slot, skipped");
        continue;
      }
      std::vector<std::size_t> eval;  // indices into fusable_slots/fusable_sets
      if (agg) {
        eval = {data.fusable_slots.size() - 1};
      } else {
        eval.resize(data.fusable_slots.size());
        for (std::size_t i = 0; i < eval.size(); ++i) eval[i] = i;
      }
      const bool dump = trial == 0 && snr_index == 0;
      const double spacing = data.truth.min_spacing_m;

      auto score = [&](const std::string& name, const RangeReport& report,
                       const std::vector<double>& truth) {
        const MatchResult match = match_detections(report.ranges(), truth, spacing);
        if (requested_has(name)) {
          auto& a = acc[name][snr_index];
          a.sumsq += match.squared_error_sum();
          a.det += match.count();
          append_ranges(ranges_body[name], report, trial, snr);
          if (dump) append_pdp(pdp_body[name], report, sc.plan, sc.tau_max);
        }
        return match;
      };

      for (std::size_t i : eval) {
        const int slot = data.fusable_slots[i];
        const auto& scene = data.scene_per_slot[static_cast<std::size_t>(slot)];
        const std::vector<double> truth = data.truth.truth_at(sc.geometry, slot);

        const RangeReport fb = fullband_baseline(
            scene, sc.plan, sc.geometry, slot, snr,
            baseline_noise_seed(sc, trial, static_cast<int>(snr_index), slot, 0), sc.tau_max);
        if (want_fullband) {
          full_det[snr_index] += score("fullband", fb, truth).count();
        } else {
          full_det[snr_index] += match_detections(fb.ranges(), truth, spacing).count();
        }

        if (requested_has("contiguous")) {
          const RangeReport report = contiguous_baseline(
              scene, sc.plan, sc.subsystems, sc.geometry, slot, snr,
              baseline_noise_seed(sc, trial, static_cast<int>(snr_index), slot, 1), sc.tau_max);
          score("contiguous", report, truth);
        }
      }

      for (const char* name : {"hisac", "spotfi_hisac"}) {
        if (!requested_has(name)) continue;
        PipelineOptions opt;
        opt.tau_max = sc.tau_max;
        opt.coherence = std::string(name) == "hisac" ? CoherenceMethod::AnchorGridSearch
                                                     : CoherenceMethod::PhaseLineFit;
        opt.staggered = sc.staggered;
        try {
          if (agg) {
            const WindowResult w = hisac_window(data.fusable_sets, sc.subsystems, sc.plan,
                                                sc.geometry, opt, sc.aggregation.mode,
                                                sc.aggregation.l_out, sc.aggregation.mean);
            score(name, w.aggregated, data.truth.truth_at(sc.geometry, w.aggregated.slot));
          } else {
            for (std::size_t i : eval) {
              const RangeReport report = hisac_slot(data.fusable_sets[i], sc.subsystems, sc.plan,
                                                    sc.geometry, opt);
              score(name, report,
                    data.truth.truth_at(sc.geometry, data.fusable_slots[i]));
            }
          }
        } catch (const std::exception& e) {
          log_warn(std::string(name) + " failed on trial " + std::to_string(trial) + ": " +
                   e.what());
        }
      }
    }
  }

  RunResult result;
  std::string metrics = "method,snr_db,rmse_m,frt,trials\n";
  for (const auto& m : requested) {
    for (std::size_t snr_index = 0; snr_index < n_snr; ++snr_index) {
      const Acc& a = acc[m][snr_index];
      MetricsRow row;
      row.method = m;
      row.snr_db = sc.snr_db[snr_index];
      row.rmse_m = a.det > 0 ? std::sqrt(a.sumsq / static_cast<double>(a.det))
                             : std::numeric_limits<double>::quiet_NaN();
      row.frt = compute_frt(a.det, full_det[snr_index]);
      row.trials = sc.trials;
      row.detections = a.det;
      row.fullband_detections = full_det[snr_index];
      result.rows.push_back(row);
      metrics += m + ',' + fmt(row.snr_db) + ',' + fmt(row.rmse_m) + ',' + fmt(row.frt) + ',' +
                 std::to_string(row.trials) + '\n';
    }
  }
  result.artifacts.emplace_back("metrics.csv", metrics);
  for (const auto& m : requested) {
    result.artifacts.emplace_back(
        "ranges_" + m + ".csv",
        "trial,snr_db,slot,range_m,amp_re,amp_im,delay_s\n" + ranges_body[m]);
    result.artifacts.emplace_back("pdp_" + m + ".csv", "delay_s,slot,power\n" + pdp_body[m]);
  }
  return result;
}

void write_artifacts(const RunResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, contents] : result.artifacts) {
    std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write artifact: " + name);
    out << contents;
  }
}

}  // namespace hisac
