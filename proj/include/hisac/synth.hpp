#pragma once

#include <cstdint>
#include <vector>

#include "hisac/rng.hpp"
#include "hisac/spectrum.hpp"
#include "hisac/types.hpp"

namespace hisac {

struct PathComponent {
  double delay_s = 0.0;
  cplx amp{0.0, 0.0};
  double drift = 0.0;  // delay drift rate, s/s (0 = static path)
};

// Ground-truth channel: path 1 (smallest delay) is the anchor by convention.
struct MultipathScene {
  std::vector<PathComponent> paths;  // sorted by delay ascending
  std::vector<double> slot_times;    // t_n, seconds

  double delay_at(std::size_t path, int slot) const;
};

struct OffsetEntry {
  double tau_o = 0.0;     // relative timing offset, s
  double f_o = 0.0;       // residual carrier frequency offset, Hz
  double varphi_o = 0.0;  // random phase offset, rad
  double phi_o = 0.0;     // effective phase -2*pi*f_o*t_n + varphi_o, wrapped to [0, 2*pi)
};

// Per-(subsystem, slot) relative offsets. Subsystem 1 is the reference and is
// identically zero.
struct OffsetState {
  std::vector<int> subsystem_ids;
  std::vector<std::vector<OffsetEntry>> entries;  // [subsystem][slot]

  const OffsetEntry& at(int subsystem_id, int slot) const;
};

struct OffsetModel {
  double to_range_s = 5e-9;    // TO drawn uniformly in +/- this
  double cfo_range_hz = 0.0;   // CFO drawn uniformly in +/- this
  double rpo_range = kTwoPi;   // RPO drawn uniformly in [0, this)
  // Independent redraws each slot model the hardest case. Hold keeps one draw
  // for the whole window (needed when subbands are acquired across slots and
  // must stay mutually coherent). Walk perturbs the previous slot's draw by a
  // uniform step of 1/8 the range, clamped to the range.
  enum class Mode { Independent, Hold, Walk } mode = Mode::Independent;
};

OffsetState gen_offsets(std::uint64_t seed, const OffsetModel& model,
                        const std::vector<SubsystemSpec>& subsystems,
                        const std::vector<double>& slot_times);

// One subband's measured CFR for one slot.
struct CfrSlice {
  int subsystem_id = 0;
  int subband = 0;  // index into the subsystem's subband list
  int slot = 0;
  int start_index = 0;  // absolute index of samples[0]
  cvec samples;
  double snr_db = 0.0;  // +inf marks a noiseless slice
};

// Full-band CFR H_k = sum_l a_l exp(-j 2 pi k df tau_l), k = 0..K-1.
cvec synth_fullband_cfr(const MultipathScene& scene, const FrequencyPlan& plan, int slot);

// Channel values over an arbitrary contiguous index range (no offsets, no noise).
cvec synth_cfr_segment(const MultipathScene& scene, const FrequencyPlan& plan, int slot,
                       int start_index, int width);

// Measured subband CFR: channel restricted to the subband, scaled by the
// subsystem offset factor exp(j phi_o) exp(-j 2 pi k df tau_o) over the
// absolute subcarrier index k, plus white Gaussian noise at snr_db.
// The absolute-index ramp makes compensation an exact algebraic inverse; the
// per-subcarrier ramp slope inside a subband is unchanged by this choice.
CfrSlice synth_subband_cfr(const MultipathScene& scene, const FrequencyPlan& plan,
                           const SubsystemSpec& subsystem, int subband,
                           const OffsetState& offsets, int slot, double snr_db,
                           std::uint64_t noise_seed);

// Add complex white Gaussian noise scaled so E||w||^2 / mean|x|^2 = 10^(-snr/10).
void add_awgn(cvec& samples, double snr_db, std::uint64_t noise_seed);

// Forward DFT of zero-padded taps (converts a CIR estimate into a CFR).
cvec cir_to_cfr(const cvec& cir_taps, int n_dft);

}  // namespace hisac
