#include "hisac/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hisac {

namespace {

RangeReport block_baseline(const MultipathScene& scene, const FrequencyPlan& plan,
                           const Geometry& geometry, int slot, double snr_db,
                           std::uint64_t noise_seed, double tau_max, int start_index,
                           int width) {
  cvec H = synth_cfr_segment(scene, plan, slot, start_index, width);
  add_awgn(H, snr_db, noise_seed);
  std::vector<int> indices(static_cast<std::size_t>(width));
  std::iota(indices.begin(), indices.end(), start_index);
  const Dictionary dict =
      build_dictionary(std::move(indices), uniform_grid(tau_max, 1.0 / (8.0 * plan.B)), plan);
  const SparseCir cir = omp_solve(H, dict);
  return delays_to_ranges(cir, geometry, slot);
}

}  // namespace

RangeReport fullband_baseline(const MultipathScene& scene, const FrequencyPlan& plan,
                              const Geometry& geometry, int slot, double snr_db,
                              std::uint64_t noise_seed, double tau_max) {
  return block_baseline(scene, plan, geometry, slot, snr_db, noise_seed, tau_max, 0, plan.K);
}

RangeReport contiguous_baseline(const MultipathScene& scene, const FrequencyPlan& plan,
                                const std::vector<SubsystemSpec>& subsystems,
                                const Geometry& geometry, int slot, double snr_db,
                                std::uint64_t noise_seed, double tau_max) {
  int first = plan.K;
  int measured = 0;
  for (const auto& sub : subsystems) {
    for (const auto& sb : sub.subbands) {
      first = std::min(first, sb.start_index);
      measured += sb.width;
    }
  }
  if (measured == 0) throw std::invalid_argument("no measured subcarriers");
  measured = std::min(measured, plan.K - first);
  return block_baseline(scene, plan, geometry, slot, snr_db, noise_seed, tau_max, first,
                        measured);
}

std::vector<double> unwrap_phase(const cvec& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double raw = std::arg(samples[i]);
    if (i == 0) {
      out.push_back(raw);
      prev = raw;
      continue;
    }
    double d = raw - std::arg(samples[i - 1]);
    while (d > kPi) d -= kTwoPi;
    while (d <= -kPi) d += kTwoPi;
    prev += d;
    out.push_back(prev);
  }
  return out;
}

namespace {

// Least-squares line a + b*kappa through the unwrapped phase of one subband.
std::pair<double, double> fit_phase_line(const cvec& samples) {
  if (samples.size() < 2) throw std::invalid_argument("phase fit needs at least two samples");
  const std::vector<double> phase = unwrap_phase(samples);
  const double n = static_cast<double>(phase.size());
  const double kappa_mean = (n - 1.0) / 2.0;
  double phase_mean = 0.0;
  for (double p : phase) phase_mean += p;
  phase_mean /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < phase.size(); ++k) {
    const double dk = static_cast<double>(k) - kappa_mean;
    num += dk * (phase[k] - phase_mean);
    den += dk * dk;
  }
  const double slope = num / den;
  return {phase_mean - slope * kappa_mean, slope};
}

}  // namespace

std::vector<CoherenceSolution> spotfi_coherence(const std::vector<CfrSlice>& slices,
                                                const std::vector<SubsystemSpec>& subsystems,
                                                const FrequencyPlan& plan) {
  // Per subsystem: unweighted mean of the per-subband (intercept, slope).
  std::vector<double> intercept(subsystems.size(), 0.0), slope(subsystems.size(), 0.0);
  std::size_t ref_pos = subsystems.size();
  for (std::size_t i = 0; i < subsystems.size(); ++i) {
    const auto& sub = subsystems[i];
    if (sub.id == 1) ref_pos = i;
    double a_sum = 0.0, b_sum = 0.0;
    int count = 0;
    for (std::size_t s = 0; s < sub.subbands.size(); ++s) {
      const CfrSlice* found = nullptr;
      for (const auto& slice : slices) {
        if (slice.subsystem_id == sub.id && slice.subband == static_cast<int>(s)) {
          found = &slice;
          break;
        }
      }
      if (!found) throw std::runtime_error("missing slice for phase line fit");
      const auto [a, b] = fit_phase_line(found->samples);
      a_sum += a;
      b_sum += b;
      ++count;
    }
    intercept[i] = a_sum / count;
    slope[i] = b_sum / count;
  }
  if (ref_pos == subsystems.size())
    throw std::runtime_error("no reference subsystem (id 1) for phase line fit");

  std::vector<CoherenceSolution> out(subsystems.size());
  for (std::size_t i = 0; i < subsystems.size(); ++i) {
    CoherenceSolution sol;
    sol.subsystem_id = subsystems[i].id;
    if (i != ref_pos) {
      sol.to_hat = -(slope[i] - slope[ref_pos]) / (kTwoPi * plan.delta_f);
      sol.po_hat = wrap_angle(intercept[i] - intercept[ref_pos]);
      sol.to_init = sol.to_hat;
    }
    out[i] = sol;
  }
  return out;
}

}  // namespace hisac
