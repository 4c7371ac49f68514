#include "hisac/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hisac {

SparseCir aggregate(const std::vector<SparseCir>& cirs, AggregationMode mode, int l_out,
                    RunningMean mean) {
  if (cirs.empty()) throw std::invalid_argument("nothing to aggregate");
  if (l_out < 1) throw std::domain_error("l_out must be positive");
  const auto& ref_grid = cirs.front().grid;
  for (const auto& cir : cirs) {
    const bool same = cir.grid == ref_grid ||
                      (cir.grid && ref_grid && cir.grid->candidates == ref_grid->candidates);
    if (!same) throw std::runtime_error("aggregation inputs use different delay grids");
  }

  struct Acc {
    cplx chi{0.0, 0.0};
    int appearances = 0;
  };
  std::map<double, Acc> acc;  // keyed by grid delay (exact: shared grid values)
  int n = 0;
  for (const auto& cir : cirs) {
    ++n;  // global 1-based slot index
    for (const auto& e : cir.entries) {
      const cplx value = mode == AggregationMode::Static ? e.amp : cplx{std::abs(e.amp), 0.0};
      Acc& a = acc[e.delay_s];
      ++a.appearances;
      if (mean == RunningMean::SlotIndexed) {
        a.chi = (value + static_cast<double>(n) * a.chi) / static_cast<double>(n + 1);
      } else {
        a.chi += value;  // divided by the appearance count below
      }
    }
  }

  std::vector<SparseCir::Entry> points;
  points.reserve(acc.size());
  for (auto& [delay, a] : acc) {
    const cplx chi =
        mean == RunningMean::PerAppearance ? a.chi / static_cast<double>(a.appearances) : a.chi;
    if (chi == cplx{0.0, 0.0}) continue;  // fully cancelled, drop
    points.push_back({delay, chi});
  }
  std::sort(points.begin(), points.end(), [](const SparseCir::Entry& a, const SparseCir::Entry& b) {
    const double ma = std::abs(a.amp), mb = std::abs(b.amp);
    if (ma != mb) return ma > mb;
    return a.delay_s < b.delay_s;
  });
  if (static_cast<int>(points.size()) > l_out) points.resize(static_cast<std::size_t>(l_out));
  std::sort(points.begin(), points.end(), [](const SparseCir::Entry& a, const SparseCir::Entry& b) {
    return a.delay_s < b.delay_s;
  });

  SparseCir out;
  out.grid = ref_grid;
  out.entries = std::move(points);
  return out;
}

RangeReport aggregate_ranges(const SparseCir& agg, const Geometry& geometry) {
  if (agg.empty()) throw std::invalid_argument("empty aggregated estimate");
  const double tau_1 = agg.entries.front().delay_s;  // entries sorted by delay
  RangeReport report;
  report.geometry = geometry;
  const double scale =
      (geometry.mode == GeometryMode::MonoStatic && geometry.mono_round_trip) ? 0.5 : 1.0;
  for (const auto& e : agg.entries) {
    RangeReport::Entry out;
    out.delay_s = e.delay_s;
    out.amp = e.amp;
    out.range_m = kSpeedOfLight * (e.delay_s - tau_1) * scale;
    report.entries.push_back(out);
  }
  return report;
}

}  // namespace hisac
