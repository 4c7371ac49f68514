#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hisac/aggregation.hpp"
#include "hisac/spectrum.hpp"
#include "hisac/synth.hpp"

namespace hisac {

// How a trial's ground-truth scene is drawn.
struct SceneTemplate {
  double anchor_delay_s = 6e-9;  // 0 disables the anchor path
  double anchor_gain = 10.0;     // anchor amplitude relative to the strongest target

  // Either an explicit target list, or a two-target pair at
  // {base_range - spacing, base_range} with the spacing cycling per trial.
  std::vector<double> target_ranges_m;
  double base_range_m = 0.0;
  std::vector<double> pair_spacings_m;

  std::vector<double> target_amps;  // magnitudes; defaults to 1.0 each

  enum class AmpMode {
    RandomPhase,         // fresh uniform phase per target per trial
    FixedReal,           // real positive amplitudes
    RandomPhasePerSlot,  // fresh phase every slot (crude moving-scatterer model)
  };
  AmpMode amp_mode = AmpMode::RandomPhase;

  // Snap path delays to a lattice: the fused grid step 1/(8B), or the
  // reference subsystem's coarse step 1/(4 B_1).
  enum class Snap { None, Fused, Coarse };
  Snap snap = Snap::Fused;

  double target_speed_mps = 0.0;  // radial speed; nonzero makes delays drift per slot

  // Static non-target reflections (walls, furniture, leakage). Each gets a
  // fresh uniform phase per trial; none of them enter the truth ranges or the
  // detection matching.
  struct ClutterPath {
    double delay_s = 0.0;
    double amp = 0.0;  // magnitude, absolute (not relative to the targets)
  };
  std::vector<ClutterPath> clutter;
};

struct OffsetModelCfg {
  double to_range_s = 5e-9;
  double cfo_range_hz = 0.0;
  double rpo_range = kTwoPi;
  OffsetModel::Mode mode = OffsetModel::Mode::Independent;
  // Snap each subsystem's TO draw to its own coarse delay lattice.
  bool snap_to_coarse = false;
};

struct AggregationCfg {
  bool enabled = false;
  AggregationMode mode = AggregationMode::Static;
  RunningMean mean = RunningMean::PerAppearance;
  int l_out = 0;  // 0 = use the first slot's detected path count
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  FrequencyPlan plan;
  std::vector<SubsystemSpec> subsystems;
  Geometry geometry;
  SceneTemplate scene;
  OffsetModelCfg offsets;
  std::vector<double> snr_db = {5.0, 10.0, 20.0};
  int slots = 1;
  double ifs_s = 1e-3;  // inter-frame spacing (slot period), informational
  int trials = 20;
  std::uint64_t seed = 1;
  double tau_max = 60e-9;
  bool staggered = false;  // one subband acquired per slot
  int staleness = 8;       // max slice age, in slots, usable during fusion
  AggregationCfg aggregation;
  double detect_tol_m = 0.5;  // detection radius when truth has fewer than 2 targets

  double fused_grid_step() const { return 1.0 / (8.0 * plan.B); }
  double coarse_step(int subsystem_index = 0) const {
    return 1.0 / (4.0 * subsystems.at(static_cast<std::size_t>(subsystem_index)).Bi);
  }
};

// Scenario-level validation: plan/subsystem constraints plus template sanity.
ValidationReport validate_scenario(const Scenario& scenario);

std::vector<std::string> preset_names();
Scenario make_preset(const std::string& name);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

// Resolve a preset name, otherwise read the file at the given path.
Scenario load_scenario(const std::string& name_or_path);

}  // namespace hisac
