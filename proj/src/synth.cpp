#include "hisac/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hisac {

double MultipathScene::delay_at(std::size_t path, int slot) const {
  const auto& p = paths.at(path);
  const double t = slot_times.empty() ? 0.0 : slot_times.at(static_cast<std::size_t>(slot));
  return p.delay_s + p.drift * t;
}

const OffsetEntry& OffsetState::at(int subsystem_id, int slot) const {
  for (std::size_t i = 0; i < subsystem_ids.size(); ++i) {
    if (subsystem_ids[i] == subsystem_id) return entries[i].at(static_cast<std::size_t>(slot));
  }
  throw std::out_of_range("no offsets recorded for subsystem " + std::to_string(subsystem_id));
}

OffsetState gen_offsets(std::uint64_t seed, const OffsetModel& model,
                        const std::vector<SubsystemSpec>& subsystems,
                        const std::vector<double>& slot_times) {
  if (model.to_range_s < 0.0 || model.cfo_range_hz < 0.0 || model.rpo_range < 0.0)
    throw std::domain_error("offset ranges must be non-negative");
  OffsetState state;
  const std::size_t slots = slot_times.size();
  for (const auto& sub : subsystems) {
    state.subsystem_ids.push_back(sub.id);
    std::vector<OffsetEntry> per_slot(slots);
    if (sub.id != 1) {
      RandomStream rng(derive_seed(seed, {seed_purpose::kOffsets, static_cast<std::uint64_t>(sub.id)}));
      double tau = 0.0, f = 0.0, varphi = 0.0;
      for (std::size_t n = 0; n < slots; ++n) {
        const bool fresh = (n == 0) || model.mode == OffsetModel::Mode::Independent;
        if (fresh) {
          tau = rng.uniform(-model.to_range_s, model.to_range_s);
          f = rng.uniform(-model.cfo_range_hz, model.cfo_range_hz);
          varphi = model.rpo_range > 0.0 ? rng.uniform(0.0, model.rpo_range) : 0.0;
        } else if (model.mode == OffsetModel::Mode::Walk) {
          tau = std::clamp(tau + rng.uniform(-model.to_range_s / 8.0, model.to_range_s / 8.0),
                           -model.to_range_s, model.to_range_s);
          f = std::clamp(f + rng.uniform(-model.cfo_range_hz / 8.0, model.cfo_range_hz / 8.0),
                         -model.cfo_range_hz, model.cfo_range_hz);
          varphi = wrap_angle(varphi + (model.rpo_range > 0.0 ? rng.uniform(-kPi / 8.0, kPi / 8.0) : 0.0));
        }
        per_slot[n].tau_o = tau;
        per_slot[n].f_o = f;
        per_slot[n].varphi_o = varphi;
        per_slot[n].phi_o = wrap_angle(-kTwoPi * f * slot_times[n] + varphi);
      }
    }
    state.entries.push_back(std::move(per_slot));
  }
  return state;
}

cvec synth_cfr_segment(const MultipathScene& scene, const FrequencyPlan& plan, int slot,
                       int start_index, int width) {
  cvec out(static_cast<std::size_t>(width), cplx{0.0, 0.0});
  for (std::size_t l = 0; l < scene.paths.size(); ++l) {
    const double tau = scene.delay_at(l, slot);
    const cplx amp = scene.paths[l].amp;
    const double theta = -kTwoPi * plan.delta_f * tau;  // per-subcarrier phase step
    const cplx step = std::polar(1.0, theta);
    cplx phase = std::polar(1.0, theta * start_index);
    for (int k = 0; k < width; ++k) {
      out[static_cast<std::size_t>(k)] += amp * phase;
      phase *= step;
    }
  }
  return out;
}

cvec synth_fullband_cfr(const MultipathScene& scene, const FrequencyPlan& plan, int slot) {
  return synth_cfr_segment(scene, plan, slot, 0, plan.K);
}

void add_awgn(cvec& samples, double snr_db, std::uint64_t noise_seed) {
  if (std::isinf(snr_db) || samples.empty()) return;
  double power = 0.0;
  for (const cplx& v : samples) power += std::norm(v);
  power /= static_cast<double>(samples.size());
  const double sigma2 = power * std::pow(10.0, -snr_db / 10.0);
  RandomStream rng(noise_seed);
  for (cplx& v : samples) v += rng.complex_gaussian(sigma2);
}

CfrSlice synth_subband_cfr(const MultipathScene& scene, const FrequencyPlan& plan,
                           const SubsystemSpec& subsystem, int subband,
                           const OffsetState& offsets, int slot, double snr_db,
                           std::uint64_t noise_seed) {
  const SubbandSpec& sb = subsystem.subbands.at(static_cast<std::size_t>(subband));
  CfrSlice slice;
  slice.subsystem_id = subsystem.id;
  slice.subband = subband;
  slice.slot = slot;
  slice.start_index = sb.start_index;
  slice.snr_db = snr_db;
  slice.samples = synth_cfr_segment(scene, plan, slot, sb.start_index, sb.width);

  const OffsetEntry& off = offsets.at(subsystem.id, slot);
  if (off.tau_o != 0.0 || off.phi_o != 0.0) {
    const double theta = -kTwoPi * plan.delta_f * off.tau_o;
    const cplx step = std::polar(1.0, theta);
    cplx phase = std::polar(1.0, off.phi_o + theta * sb.start_index);
    for (cplx& v : slice.samples) {
      v *= phase;
      phase *= step;
    }
  }
  add_awgn(slice.samples, snr_db, noise_seed);
  return slice;
}

cvec cir_to_cfr(const cvec& cir_taps, int n_dft) {
  if (static_cast<int>(cir_taps.size()) > n_dft)
    throw std::invalid_argument("CIR longer than the DFT size");
  cvec out(static_cast<std::size_t>(n_dft), cplx{0.0, 0.0});
  for (int k = 0; k < n_dft; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t n = 0; n < cir_taps.size(); ++n) {
      const double ang = -kTwoPi * static_cast<double>(k) * static_cast<double>(n) / n_dft;
      acc += cir_taps[n] * std::polar(1.0, ang);
    }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

}  // namespace hisac
