#include "hisac/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hisac {

double wrap_angle(double radians) {
  double w = std::fmod(radians, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // guard against fmod returning exactly 2*pi
  return w;
}

double angle_difference(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

FrequencyPlan FrequencyPlan::make(double f0, double bandwidth_hz, double delta_f_hz) {
  if (!(delta_f_hz > 0.0)) throw std::domain_error("subcarrier spacing must be positive");
  FrequencyPlan plan;
  plan.f0 = f0;
  plan.delta_f = delta_f_hz;
  plan.K = static_cast<int>(std::llround(bandwidth_hz / delta_f_hz));
  if (plan.K < 2) throw std::domain_error("plan needs at least two subcarriers");
  plan.B = plan.K * plan.delta_f;
  return plan;
}

int SubsystemSpec::measured_count() const {
  int m = 0;
  for (const auto& sb : subbands) m += sb.width;
  return m;
}

std::vector<int> SubsystemSpec::absolute_indices() const {
  std::vector<int> out;
  out.reserve(measured_count());
  for (const auto& sb : subbands)
    for (int k = 0; k < sb.width; ++k) out.push_back(sb.start_index + k);
  return out;
}

SubsystemSpec make_subsystem(int id, const FrequencyPlan& plan,
                             std::vector<SubbandSpec> subbands) {
  if (subbands.empty()) throw std::invalid_argument("subsystem needs at least one subband");
  std::sort(subbands.begin(), subbands.end(),
            [](const SubbandSpec& a, const SubbandSpec& b) { return a.start_index < b.start_index; });
  SubsystemSpec sub;
  sub.id = id;
  sub.subbands = std::move(subbands);
  const int k0 = sub.subbands.front().start_index;
  const int k1 = sub.subbands.back().start_index + sub.subbands.back().width;
  sub.fi = plan.f0 + k0 * plan.delta_f;
  sub.Bi = (k1 - k0) * plan.delta_f;
  return sub;
}

double delay_resolution(double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("bandwidth must be positive");
  return 1.0 / bandwidth_hz;
}

double range_resolution(double bandwidth_hz, double beta) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("bandwidth must be positive");
  if (!(beta >= 0.0) || beta >= kPi) throw std::domain_error("bistatic angle must lie in [0, pi)");
  return kSpeedOfLight / (2.0 * bandwidth_hz * std::cos(beta / 2.0));
}

ValidationReport validate_plan(const FrequencyPlan& plan,
                               const std::vector<SubsystemSpec>& subsystems) {
  ValidationReport report;
  report.virtual_bandwidth_hz = plan.B;
  auto fail = [&report](const std::string& msg) { report.violations.push_back(msg); };

  if (plan.delta_f <= 0.0) fail("subcarrier spacing must be positive");
  if (plan.K < 2) fail("plan needs at least two subcarriers");
  if (std::abs(plan.B - plan.K * plan.delta_f) > 1e-6)
    fail("bandwidth is not an integer multiple of the subcarrier spacing");
  if (subsystems.empty()) fail("no subsystems configured");

  int total_measured = 0;
  bool saw_reference = false;
  for (const auto& sub : subsystems) {
    std::ostringstream tag;
    tag << "subsystem " << sub.id << ": ";
    if (sub.id == 1) saw_reference = true;
    if (sub.subbands.empty()) {
      fail(tag.str() + "no subbands");
      continue;
    }
    const double lo = sub.fi - plan.f0;
    const double hi = lo + sub.Bi;
    int prev_end = -1;
    bool sorted = true, disjoint = true;
    for (const auto& sb : sub.subbands) {
      if (sb.width < 2) fail(tag.str() + "subband width must be at least 2");
      if (sb.start_index < 0 || sb.start_index + sb.width > plan.K)
        fail(tag.str() + "subband exceeds the virtual band");
      const double sb_lo = sb.start_index * plan.delta_f;
      const double sb_hi = (sb.start_index + sb.width) * plan.delta_f;
      if (sb_lo < lo - 1e-6 || sb_hi > hi + 1e-6)
        fail(tag.str() + "subband lies outside the declared subsystem bandwidth");
      if (prev_end >= 0) {
        if (sb.start_index < prev_end) {
          if (sb.start_index < sub.subbands.front().start_index) sorted = false;
          disjoint = false;
        }
      }
      prev_end = sb.start_index + sb.width;
      total_measured += sb.width;
    }
    if (!disjoint) fail(tag.str() + "subbands overlap or are out of order");
    if (!sorted) fail(tag.str() + "subbands are not sorted by start index");
    const int Ki = static_cast<int>(std::llround(sub.Bi / plan.delta_f));
    if (sub.measured_count() > Ki)
      fail(tag.str() + "measured subcarriers exceed the subsystem bandwidth");
  }
  if (!subsystems.empty() && !saw_reference) fail("no reference subsystem (id 1)");

  report.effective_bandwidth_hz = total_measured * plan.delta_f;
  return report;
}

}  // namespace hisac
