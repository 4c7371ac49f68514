#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hisac/pipeline.hpp"
#include "hisac/scenario.hpp"

namespace hisac {

// Ground truth drawn for one trial. Truth ranges are the post-snap target
// ranges at slot 0; the anchor path is excluded from matching.
struct TrialScene {
  MultipathScene scene;
  std::vector<double> truth_ranges_m;
  double min_spacing_m = 0.0;
  bool has_anchor = false;

  std::vector<double> truth_at(const Geometry& geometry, int slot) const;
};

TrialScene make_trial_scene(const Scenario& scenario, int trial);
OffsetState make_trial_offsets(const Scenario& scenario, int trial);

std::uint64_t slice_noise_seed(const Scenario& scenario, int trial, int snr_index,
                               int subsystem_id, int subband, int slot);
// which: 0 = fullband, 1 = contiguous.
std::uint64_t baseline_noise_seed(const Scenario& scenario, int trial, int snr_index, int slot,
                                  int which);

// Everything one trial measures at one SNR. The same slices feed every
// method, so method comparisons are paired.
struct TrialData {
  TrialScene truth;
  OffsetState offsets;
  // Per-slot scene actually radiated (differs from truth.scene only for the
  // per-slot random phase mode).
  std::vector<MultipathScene> scene_per_slot;
  std::vector<std::vector<CfrSlice>> slices_per_slot;  // acquisitions made at each slot
  std::vector<int> fusable_slots;
  // Freshest slice per subband for each fusable slot (staggered acquisition
  // collects a complete set across slots; otherwise this is the slot's own set).
  std::vector<std::vector<CfrSlice>> fusable_sets;
};

TrialData make_trial(const Scenario& scenario, int trial, int snr_index);

struct MetricsRow {
  std::string method;
  double snr_db = 0.0;
  double rmse_m = 0.0;  // NaN when nothing was detected
  double frt = 0.0;     // NaN when the full-band reference detected nothing
  int trials = 0;
  long detections = 0;
  long fullband_detections = 0;
};

struct RunResult {
  std::vector<MetricsRow> rows;
  // (file name, contents): metrics.csv, ranges_<method>.csv, pdp_<method>.csv.
  std::vector<std::pair<std::string, std::string>> artifacts;
};

const std::vector<std::string>& known_methods();

// Runs the requested methods over every (snr, trial) cell. Rejects unknown
// method names before any work. Byte-deterministic for a fixed scenario.
RunResult run_scenario(const Scenario& scenario, std::vector<std::string> methods);

void write_artifacts(const RunResult& result, const std::string& out_dir);

}  // namespace hisac
