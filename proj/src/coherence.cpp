#include "hisac/coherence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hisac {

SparseCir::Entry select_anchor(const SparseCir& cir, AnchorPolicy policy, double known_delay_s) {
  if (cir.empty()) throw std::runtime_error("no anchor path: coarse estimate is empty");
  if (policy == AnchorPolicy::KnownDelay) {
    const SparseCir::Entry* best = nullptr;
    for (const auto& e : cir.entries) {
      if (!best || std::abs(e.delay_s - known_delay_s) < std::abs(best->delay_s - known_delay_s))
        best = &e;
    }
    return *best;
  }
  double peak = 0.0;
  for (const auto& e : cir.entries) peak = std::max(peak, std::abs(e.amp));
  const double gate = 0.5 * peak;
  for (const auto& e : cir.entries) {  // entries are sorted by delay
    if (std::abs(e.amp) >= gate) return e;
  }
  throw std::runtime_error("no anchor path: power gate excluded every entry");
}

CoherenceSolution refine_offsets(const cvec& model_ref, const cvec& model_i, double to_init,
                                 double xi, const FrequencyPlan& plan) {
  if (model_ref.size() != model_i.size())
    throw std::invalid_argument("model vectors must have equal length");
  if (!(xi > 0.0)) throw std::domain_error("search half-width xi must be positive");
  const std::size_t K = model_ref.size();

  // cost(tau, phi) = sum(|ref|^2 + |model|^2) - 2 Re{ exp(-j phi) G(tau) }
  // with G(tau) = sum_k conj(ref_k) model_k exp(j 2 pi k df tau).
  double base = 0.0;
  cvec prod(K);
  for (std::size_t k = 0; k < K; ++k) {
    base += std::norm(model_ref[k]) + std::norm(model_i[k]);
    prod[k] = std::conj(model_ref[k]) * model_i[k];
  }

  const double tau_step = 2.0 * xi / 100.0;
  const double phi_step = kPi / 100.0;
  cvec phase_table(200);
  for (int j = 0; j < 200; ++j) phase_table[static_cast<std::size_t>(j)] = std::polar(1.0, -phi_step * j);

  double best_cost = std::numeric_limits<double>::infinity();
  double best_tau = to_init, best_phi = 0.0, best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100; ++i) {
    const double tau = to_init + (i - 50) * tau_step;
    const double theta = kTwoPi * plan.delta_f * tau;
    const cplx step = std::polar(1.0, theta);
    cplx phase{1.0, 0.0};
    cplx G{0.0, 0.0};
    for (std::size_t k = 0; k < K; ++k) {
      G += prod[k] * phase;
      phase *= step;
    }
    const double dist = std::abs(tau - to_init);
    for (int j = 0; j < 200; ++j) {
      const double cost = base - 2.0 * std::real(phase_table[static_cast<std::size_t>(j)] * G);
      const double phi = phi_step * j;
      const bool better =
          cost < best_cost ||
          (cost == best_cost &&
           (dist < best_dist || (dist == best_dist && (phi < best_phi || (phi == best_phi && tau < best_tau)))));
      if (better) {
        best_cost = cost;
        best_tau = tau;
        best_phi = phi;
        best_dist = dist;
      }
    }
  }

  CoherenceSolution sol;
  sol.to_hat = best_tau;
  sol.po_hat = best_phi;
  sol.cost = best_cost;
  sol.to_init = to_init;
  return sol;
}

CfrSlice compensate(const CfrSlice& slice, const CoherenceSolution& sol,
                    const FrequencyPlan& plan) {
  if (sol.subsystem_id != 0 && sol.subsystem_id != slice.subsystem_id)
    throw std::invalid_argument("coherence solution belongs to a different subsystem");
  CfrSlice out = slice;
  if (sol.to_hat == 0.0 && sol.po_hat == 0.0) return out;
  const double theta = kTwoPi * plan.delta_f * sol.to_hat;
  const cplx step = std::polar(1.0, theta);
  cplx phase = std::polar(1.0, theta * slice.start_index - sol.po_hat);
  for (cplx& v : out.samples) {
    v *= phase;
    phase *= step;
  }
  return out;
}

}  // namespace hisac
