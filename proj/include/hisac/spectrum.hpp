#pragma once

#include <string>
#include <vector>

#include "hisac/types.hpp"

namespace hisac {

// The virtual full band: K subcarriers spaced delta_f starting at f0.
// bandwidth is always snapped to an integer multiple of delta_f so every index
// computation downstream can assume a uniform grid.
struct FrequencyPlan {
  double f0 = 0.0;       // carrier start frequency, Hz
  double delta_f = 0.0;  // subcarrier spacing, Hz
  int K = 0;             // virtual subcarrier count
  double B = 0.0;        // K * delta_f, Hz

  static FrequencyPlan make(double f0, double bandwidth_hz, double delta_f_hz);
};

// One measured subband: a contiguous index range inside the full-band grid.
struct SubbandSpec {
  int start_index = 0;
  int width = 0;
};

enum class AnchorPolicy { MinDelayMaxPower, KnownDelay };

// A mutually incoherent acquisition chain: the subbands it measures plus the
// policy used to pick its anchor path. id 1 is the phase reference.
struct SubsystemSpec {
  int id = 0;
  double fi = 0.0;  // start frequency, Hz
  double Bi = 0.0;  // subsystem bandwidth (span of its subbands), Hz
  std::vector<SubbandSpec> subbands;
  AnchorPolicy anchor_policy = AnchorPolicy::MinDelayMaxPower;
  double known_anchor_delay_s = 0.0;  // used by AnchorPolicy::KnownDelay

  int measured_count() const;  // M_i = sum of subband widths
  std::vector<int> absolute_indices() const;
};

// Convenience constructor: derives fi/Bi from the subband span.
SubsystemSpec make_subsystem(int id, const FrequencyPlan& plan,
                             std::vector<SubbandSpec> subbands);

enum class GeometryMode { MonoStatic, BiStatic };

struct Geometry {
  GeometryMode mode = GeometryMode::MonoStatic;
  double distance_m = 0.0;       // TX-RX separation D
  double bistatic_angle = 0.0;   // radians, BiStatic only
  // Mono-static delays are round trips; dividing by 2 yields target distance.
  // Disable to get the raw relative-distance mapping c*tau - D with D = 0.
  bool mono_round_trip = true;
};

// Nominal delay resolution 1/B.
double delay_resolution(double bandwidth_hz);

// Range resolution c / (2 B cos(beta/2)); beta = 0 is the mono-static case.
double range_resolution(double bandwidth_hz, double beta);

struct ValidationReport {
  std::vector<std::string> violations;
  double effective_bandwidth_hz = 0.0;  // M * delta_f over all subsystems
  double virtual_bandwidth_hz = 0.0;    // B
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_plan(const FrequencyPlan& plan,
                               const std::vector<SubsystemSpec>& subsystems);

}  // namespace hisac
