#pragma once

#include <memory>
#include <vector>

#include "hisac/spectrum.hpp"
#include "hisac/types.hpp"

namespace hisac {

struct DelayGrid {
  std::vector<double> candidates;  // strictly increasing, non-negative, seconds
  double step = 0.0;               // informational for uniform grids
};

// Uniform grid m * step for m = 0.. while m * step < tau_max.
DelayGrid uniform_grid(double tau_max, double step);

// Partial Fourier dictionary over the available absolute subcarrier indices.
// Column q is exp(-j 2 pi k(m) df nu_q) / sqrt(K). The matrix is never stored
// explicitly: correlations and Gram entries are evaluated in closed form from
// the contiguous runs of the index set.
struct Dictionary {
  std::vector<int> rows;  // available absolute indices, ascending
  DelayGrid grid;
  double delta_f = 0.0;
  int K = 0;
  double normalizer = 0.0;  // sqrt(K)

  // Maximal stretches of consecutive indices, as (start, length).
  std::vector<std::pair<int, int>> runs;

  int measurement_count() const { return static_cast<int>(rows.size()); }

  // Explicit column value: exp(-j 2 pi rows[m] df nu_q) / sqrt(K).
  cplx element(int m, int q) const;
  // Inner product <col_a, col_b> (conjugate on the first argument).
  cplx column_inner(int qa, int qb) const;
  // Inner product of column q with an arbitrary delay nu (column not on the grid).
  cplx column_inner_delay(int q, double nu) const;
  // Adjoint apply: out[q] = <col_q, H> for all grid columns.
  void correlate(const cvec& H, cvec& out) const;
};

Dictionary build_dictionary(std::vector<int> available_indices, DelayGrid grid,
                            const FrequencyPlan& plan);

// Sparse delay-domain estimate on a grid.
struct SparseCir {
  struct Entry {
    double delay_s = 0.0;
    cplx amp{0.0, 0.0};  // physical path amplitude
  };
  std::vector<Entry> entries;  // sorted by delay, distinct grid delays
  std::shared_ptr<const DelayGrid> grid;
  double residual_ratio = 0.0;  // final ||r|| / ||H||

  // Diagnostics.
  bool hit_max_iter = false;     // stopped at max_iter with residual above threshold
  int dropped_candidates = 0;    // near-dependent columns skipped during selection
  std::vector<double> residual_history;  // ||r|| after each accepted iteration

  bool empty() const { return entries.empty(); }
  std::vector<double> delays() const;
  std::vector<cplx> amps() const;
};

inline constexpr int kOmpDefaultMaxIter = -1;  // -1 selects min(32, M/2)

// Greedy orthogonal matching pursuit with full joint least-squares refit each
// iteration. Stops when ||r|| <= stop_ratio * ||H|| or after max_iter picks.
// Candidates whose projection complement onto the selected span falls below
// 1% of their energy are dropped (banned) to keep the selected set
// well-conditioned; drops are counted in the result.
SparseCir omp_solve(const cvec& H, const Dictionary& dict, double stop_ratio = 0.05,
                    int max_iter = kOmpDefaultMaxIter);

// Synthetic CFR of a sparse estimate over an arbitrary contiguous index range
// (may extend beyond the measured subbands).
cvec synth_model_cfr(const SparseCir& cir, int start_index, int width,
                     const FrequencyPlan& plan);

}  // namespace hisac
