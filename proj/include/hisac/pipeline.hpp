#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hisac/aggregation.hpp"
#include "hisac/baselines.hpp"
#include "hisac/coherence.hpp"
#include "hisac/fusion.hpp"
#include "hisac/sparse.hpp"
#include "hisac/synth.hpp"

namespace hisac {

// Module failures are rethrown with the pipeline stage that hit them.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(int stage, const std::string& what)
      : std::runtime_error("stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

enum class CoherenceMethod { AnchorGridSearch, PhaseLineFit };

struct PipelineOptions {
  double tau_max = 60e-9;
  double stop_ratio = 0.05;
  CoherenceMethod coherence = CoherenceMethod::AnchorGridSearch;
  // When set, fusion reuses this grid instead of focusing on the current
  // coarse estimates (aggregation windows freeze the grid at the first slot).
  std::shared_ptr<const FocusedGrid> frozen_grid;
  bool staggered = false;  // slices may come from different slots
};

struct SlotDiagnostics {
  std::map<int, SparseCir> coarse;                 // per subsystem id
  std::map<int, CoherenceSolution> solutions;      // per subsystem id
  std::map<int, double> coarse_residual_ratio;     // per subsystem id
  std::shared_ptr<const FocusedGrid> focused_grid;
  SparseCir fused;
};

// One acquisition: per-subsystem coarse OMP, offset solve against the
// reference, compensation, focused fusion, delay-to-range mapping.
RangeReport hisac_slot(const std::vector<CfrSlice>& slices,
                       const std::vector<SubsystemSpec>& subsystems, const FrequencyPlan& plan,
                       const Geometry& geometry, const PipelineOptions& options,
                       SlotDiagnostics* diagnostics = nullptr);

struct WindowResult {
  SparseCir aggregated_cir;         // temporal aggregation output on the frozen grid
  RangeReport aggregated;           // absolute ranges of the aggregated delays
  RangeReport aggregated_relative;  // ranges relative to the earliest aggregated delay
  std::vector<RangeReport> per_slot;
  std::vector<SlotDiagnostics> diagnostics;
};

// N-slot window: the fused grid is frozen at the first slot, every slot runs
// the full per-slot pipeline (offsets are re-estimated each slot), and the
// per-slot fused estimates are aggregated over the shared grid. l_out <= 0
// falls back to the first slot's detected path count.
WindowResult hisac_window(const std::vector<std::vector<CfrSlice>>& slices_per_slot,
                          const std::vector<SubsystemSpec>& subsystems,
                          const FrequencyPlan& plan, const Geometry& geometry,
                          const PipelineOptions& options, AggregationMode mode, int l_out,
                          RunningMean mean = RunningMean::PerAppearance);

}  // namespace hisac
