#pragma once

#include <cstdint>
#include <vector>

#include "hisac/coherence.hpp"
#include "hisac/fusion.hpp"
#include "hisac/synth.hpp"

namespace hisac {

// Upper-bound reference: offset-free CFR over the whole virtual band, OMP on a
// uniform grid with the fused step 1/(8B). Its detections are the denominator
// of every fraction-of-resolved-targets figure.
RangeReport fullband_baseline(const MultipathScene& scene, const FrequencyPlan& plan,
                              const Geometry& geometry, int slot, double snr_db,
                              std::uint64_t noise_seed, double tau_max);

// Same pipeline over one contiguous block with as many subcarriers as the
// scenario actually measures, starting at its first available index.
RangeReport contiguous_baseline(const MultipathScene& scene, const FrequencyPlan& plan,
                                const std::vector<SubsystemSpec>& subsystems,
                                const Geometry& geometry, int slot, double snr_db,
                                std::uint64_t noise_seed, double tau_max);

// Line-fit coherence: per subband, least-squares fit of the unwrapped sample
// phase against the local subcarrier index; per subsystem, average the fitted
// (intercept, slope); offsets relative to subsystem 1 follow from the
// differences. Output feeds the same compensate/fuse path as the grid search.
std::vector<CoherenceSolution> spotfi_coherence(const std::vector<CfrSlice>& slices,
                                                const std::vector<SubsystemSpec>& subsystems,
                                                const FrequencyPlan& plan);

// Standard +/- pi jump rule along the sample axis.
std::vector<double> unwrap_phase(const cvec& samples);

}  // namespace hisac
