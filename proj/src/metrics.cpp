#include "hisac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace hisac {

double MatchResult::squared_error_sum() const {
  double s = 0.0;
  for (const auto& d : detections) s += d.abs_error_m * d.abs_error_m;
  return s;
}

MatchResult match_detections(const std::vector<double>& estimates,
                             const std::vector<double>& truth, double min_spacing) {
  if (truth.empty()) throw std::invalid_argument("truth set must be non-empty");
  std::vector<std::tuple<double, int, int>> pairs;  // (distance, est index, truth index)
  pairs.reserve(estimates.size() * truth.size());
  for (std::size_t i = 0; i < estimates.size(); ++i)
    for (std::size_t j = 0; j < truth.size(); ++j)
      pairs.emplace_back(std::abs(estimates[i] - truth[j]), static_cast<int>(i),
                         static_cast<int>(j));
  std::sort(pairs.begin(), pairs.end());

  MatchResult result;
  std::vector<char> est_used(estimates.size(), 0), truth_used(truth.size(), 0);
  std::vector<char> contributed(estimates.size(), 0);
  for (const auto& [dist, i, j] : pairs) {
    if (est_used[static_cast<std::size_t>(i)] || truth_used[static_cast<std::size_t>(j)]) continue;
    est_used[static_cast<std::size_t>(i)] = 1;
    truth_used[static_cast<std::size_t>(j)] = 1;
    if (dist < min_spacing) {  // strict: a boundary hit is not a detection
      result.detections.push_back({j, dist});
      contributed[static_cast<std::size_t>(i)] = 1;
    }
  }
  for (std::size_t i = 0; i < estimates.size(); ++i)
    if (!contributed[i]) result.false_alarms.push_back(static_cast<int>(i));
  return result;
}

double compute_frt(long method_detections, long fullband_detections) {
  if (fullband_detections == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(method_detections) / static_cast<double>(fullband_detections);
}

}  // namespace hisac
