#pragma once

#include <vector>

#include "hisac/fusion.hpp"
#include "hisac/sparse.hpp"

namespace hisac {

// Static scenes average the complex amplitudes (coherent gain); dynamic scenes
// average magnitudes, since a moving scatterer's per-slot phases would cancel.
enum class AggregationMode { Static, Dynamic };

// Per-appearance divides by the number of slots a grid point appeared in.
// SlotIndexed is the recursion chi <- (alpha + n*chi)/(n+1) with n the global
// 1-based slot index; it shrinks points that appear in few slots, which
// suppresses noise-only detections.
enum class RunningMean { PerAppearance, SlotIndexed };

// Temporal aggregation over N per-slot estimates that share one fixed grid.
// Returns the l_out grid points with the largest aggregated metric (|chi| for
// Static, chi for Dynamic); ties prefer the smaller delay.
SparseCir aggregate(const std::vector<SparseCir>& cirs, AggregationMode mode, int l_out,
                    RunningMean mean = RunningMean::PerAppearance);

// Ranges relative to the earliest aggregated delay: c*(tau - tau_1), halved
// for mono-static round trips. Agrees with delays_to_ranges up to the
// constant shift introduced by tau_1.
RangeReport aggregate_ranges(const SparseCir& agg, const Geometry& geometry);

}  // namespace hisac
