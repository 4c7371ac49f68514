#pragma once

#include "hisac/sparse.hpp"
#include "hisac/spectrum.hpp"
#include "hisac/synth.hpp"
#include "hisac/types.hpp"

namespace hisac {

struct CoherenceSolution {
  int subsystem_id = 0;
  double to_hat = 0.0;   // estimated relative timing offset, s
  double po_hat = 0.0;   // estimated relative phase offset, [0, 2*pi)
  double cost = 0.0;     // objective value at the returned minimizer
  double to_init = 0.0;  // anchor-difference initializer
};

// Anchor path of a coarse estimate. MinDelayMaxPower keeps entries whose
// magnitude reaches half the strongest one and returns the earliest of them;
// KnownDelay returns the entry nearest the configured delay.
SparseCir::Entry select_anchor(const SparseCir& cir, AnchorPolicy policy,
                               double known_delay_s = 0.0);

inline double init_to(double anchor_i_s, double anchor_ref_s) { return anchor_i_s - anchor_ref_s; }

// Joint TO/PO grid search: minimizes
//   sum_k | ref_k - exp(-j phi) exp(j 2 pi k df tau) model_k |^2
// over tau in [to_init - xi, to_init + xi] (101 points, step 2*xi/100) and
// phi in [0, 2*pi) (200 points, step pi/100). Ties prefer the tau closest to
// the initializer, then the smaller phi.
CoherenceSolution refine_offsets(const cvec& model_ref, const cvec& model_i, double to_init,
                                 double xi, const FrequencyPlan& plan);

// Undo the offset factor on a slice: samples[kappa] *= exp(-j po) exp(j 2 pi k df to)
// with k the absolute subcarrier index, the exact inverse of the injected factor.
CfrSlice compensate(const CfrSlice& slice, const CoherenceSolution& sol,
                    const FrequencyPlan& plan);

}  // namespace hisac
