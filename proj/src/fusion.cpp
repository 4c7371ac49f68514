#include "hisac/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hisac {

FocusedGrid build_focused_grid(const std::vector<double>& ref_delays,
                               const std::vector<SubsystemSpec>& subsystems, double delta) {
  if (ref_delays.empty()) throw std::invalid_argument("no reference delays to focus on");
  if (!(delta > 0.0)) throw std::domain_error("grid step must be positive");
  if (subsystems.empty()) throw std::invalid_argument("no subsystems configured");

  double b_max = 0.0;
  for (const auto& sub : subsystems) b_max = std::max(b_max, sub.Bi);
  FocusedGrid focused;
  focused.gamma = 1.0 / (2.0 * b_max);
  focused.grid.step = delta;

  std::set<long long> lattice;
  for (double tau : ref_delays) {
    const double lo = std::max(0.0, tau - focused.gamma);
    const double hi = tau + focused.gamma;
    focused.intervals.emplace_back(lo, hi);
    const long long m0 = static_cast<long long>(std::ceil(lo / delta - 1e-9));
    const long long m1 = static_cast<long long>(std::floor(hi / delta + 1e-9));
    for (long long m = std::max(m0, 0LL); m <= m1; ++m) lattice.insert(m);
  }
  focused.grid.candidates.reserve(lattice.size());
  for (long long m : lattice) focused.grid.candidates.push_back(m * delta);
  return focused;
}

SparseCir fuse(const std::vector<CfrSlice>& compensated, const FocusedGrid& grid,
               const FrequencyPlan& plan, double stop_ratio, bool allow_mixed_slots) {
  if (compensated.empty()) throw std::invalid_argument("no slices to fuse");
  if (!allow_mixed_slots) {
    for (const auto& s : compensated) {
      if (s.slot != compensated.front().slot)
        throw std::runtime_error("slices from different slots without staggered acquisition");
    }
  }
  // Concatenate in ascending subcarrier order so the measurement vector lines
  // up with the dictionary rows.
  std::vector<const CfrSlice*> ordered;
  ordered.reserve(compensated.size());
  for (const auto& s : compensated) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const CfrSlice* a, const CfrSlice* b) { return a->start_index < b->start_index; });

  std::vector<int> indices;
  cvec measurement;
  for (const CfrSlice* s : ordered) {
    for (std::size_t k = 0; k < s->samples.size(); ++k) {
      indices.push_back(s->start_index + static_cast<int>(k));
      measurement.push_back(s->samples[k]);
    }
  }
  const Dictionary dict = build_dictionary(std::move(indices), grid.grid, plan);
  return omp_solve(measurement, dict, stop_ratio);
}

std::vector<double> RangeReport::ranges() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.range_m);
  return out;
}

RangeReport delays_to_ranges(const SparseCir& cir, const Geometry& geometry, int slot) {
  RangeReport report;
  report.slot = slot;
  report.geometry = geometry;
  report.entries.reserve(cir.entries.size());
  for (const auto& e : cir.entries) {
    RangeReport::Entry out;
    out.delay_s = e.delay_s;
    out.amp = e.amp;
    if (geometry.mode == GeometryMode::MonoStatic) {
      out.range_m = geometry.mono_round_trip ? kSpeedOfLight * e.delay_s / 2.0
                                             : kSpeedOfLight * e.delay_s;
    } else {
      out.range_m = kSpeedOfLight * e.delay_s - geometry.distance_m;
    }
    out.negative_range = out.range_m < 0.0;
    report.entries.push_back(out);
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const RangeReport::Entry& a, const RangeReport::Entry& b) {
              return a.range_m < b.range_m;
            });
  return report;
}

}  // namespace hisac
