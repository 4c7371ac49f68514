#pragma once

#include <vector>

namespace hisac {

// Greedy nearest-neighbor one-to-one pairing between estimated and true
// ranges. A truth target counts as detected when its paired estimate lies
// strictly within min_spacing; estimates left unpaired (or paired too far)
// are false alarms and do not enter the RMSE.
struct MatchResult {
  struct Detection {
    int truth_index = 0;
    double abs_error_m = 0.0;
  };
  std::vector<Detection> detections;
  std::vector<int> false_alarms;  // estimate indices

  int count() const { return static_cast<int>(detections.size()); }
  double squared_error_sum() const;
};

MatchResult match_detections(const std::vector<double>& estimates,
                             const std::vector<double>& truth, double min_spacing);

// Fraction of resolved targets: method detections over full-band detections
// accumulated across trials. Zero denominator yields NaN (undefined).
double compute_frt(long method_detections, long fullband_detections);

}  // namespace hisac
