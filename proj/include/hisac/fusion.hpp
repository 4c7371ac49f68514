#pragma once

#include <memory>
#include <vector>

#include "hisac/sparse.hpp"
#include "hisac/spectrum.hpp"
#include "hisac/synth.hpp"
#include "hisac/types.hpp"

namespace hisac {

// Union of +/- gamma windows around the reference subsystem's coarse delays,
// discretized on the absolute delta lattice (so grid points from different
// windows stay mutually aligned) and clamped to non-negative delays.
struct FocusedGrid {
  std::vector<std::pair<double, double>> intervals;
  double gamma = 0.0;
  DelayGrid grid;
};

FocusedGrid build_focused_grid(const std::vector<double>& ref_delays,
                               const std::vector<SubsystemSpec>& subsystems, double delta);

// Joint OMP over every compensated subband of one acquisition. Slices are
// concatenated in ascending subcarrier order into the fused measurement.
// With allow_mixed_slots the slices may come from different slots (staggered
// acquisition); otherwise a slot mismatch is an error.
SparseCir fuse(const std::vector<CfrSlice>& compensated, const FocusedGrid& grid,
               const FrequencyPlan& plan, double stop_ratio = 0.05,
               bool allow_mixed_slots = false);

struct RangeReport {
  struct Entry {
    double range_m = 0.0;
    cplx amp{0.0, 0.0};
    double delay_s = 0.0;
    bool negative_range = false;  // flagged but retained
  };
  int slot = 0;
  std::vector<Entry> entries;  // sorted by range
  Geometry geometry;

  std::vector<double> ranges() const;
};

// Map grid delays to ranges: bi-static r = c*tau - D; mono-static halves the
// round trip (or uses the raw mapping with D = 0 when mono_round_trip is off).
RangeReport delays_to_ranges(const SparseCir& cir, const Geometry& geometry, int slot = 0);

}  // namespace hisac
