#include "hisac/sparse.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hisac {

namespace {

constexpr double kDropTol = 1e-2;

// sum over the available indices k of exp(-j * theta * k), evaluated per
// contiguous run as a geometric series so the cost is O(#runs), not O(M).
cplx index_sum(const std::vector<std::pair<int, int>>& runs, double theta) {
  cplx total{0.0, 0.0};
  for (const auto& [start, len] : runs) {
    const cplx rho = std::polar(1.0, -theta);
    const cplx lead = std::polar(1.0, -theta * start);
    cplx geo;
    if (std::abs(cplx{1.0, 0.0} - rho) < 1e-12) {
      geo = cplx{static_cast<double>(len), 0.0};
    } else {
      geo = (cplx{1.0, 0.0} - std::polar(1.0, -theta * len)) / (cplx{1.0, 0.0} - rho);
    }
    total += lead * geo;
  }
  return total;
}

}  // namespace

DelayGrid uniform_grid(double tau_max, double step) {
  if (!(tau_max > 0.0) || !(step > 0.0))
    throw std::domain_error("uniform grid needs positive span and step");
  const int count = static_cast<int>(std::ceil(tau_max / step - 1e-9));
  DelayGrid grid;
  grid.step = step;
  grid.candidates.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) grid.candidates.push_back(m * step);
  return grid;
}

Dictionary build_dictionary(std::vector<int> available_indices, DelayGrid grid,
                            const FrequencyPlan& plan) {
  if (available_indices.empty()) throw std::invalid_argument("empty subcarrier index set");
  if (grid.candidates.empty()) throw std::invalid_argument("empty delay grid");
  std::sort(available_indices.begin(), available_indices.end());
  if (available_indices.front() < 0 || available_indices.back() >= plan.K)
    throw std::invalid_argument("subcarrier index outside the virtual band");
  for (std::size_t q = 0; q + 1 < grid.candidates.size(); ++q) {
    if (!(grid.candidates[q] < grid.candidates[q + 1]))
      throw std::invalid_argument("delay grid must be strictly increasing");
  }
  if (grid.candidates.front() < 0.0)
    throw std::invalid_argument("delay grid must be non-negative");

  Dictionary dict;
  dict.rows = std::move(available_indices);
  dict.grid = std::move(grid);
  dict.delta_f = plan.delta_f;
  dict.K = plan.K;
  dict.normalizer = std::sqrt(static_cast<double>(plan.K));
  int run_start = dict.rows.front();
  int prev = run_start;
  for (std::size_t m = 1; m < dict.rows.size(); ++m) {
    if (dict.rows[m] != prev + 1) {
      dict.runs.emplace_back(run_start, prev - run_start + 1);
      run_start = dict.rows[m];
    }
    prev = dict.rows[m];
  }
  dict.runs.emplace_back(run_start, prev - run_start + 1);
  return dict;
}

cplx Dictionary::element(int m, int q) const {
  const double ang = -kTwoPi * rows.at(static_cast<std::size_t>(m)) * delta_f *
                     grid.candidates.at(static_cast<std::size_t>(q));
  return std::polar(1.0, ang) / normalizer;
}

cplx Dictionary::column_inner(int qa, int qb) const {
  return column_inner_delay(qa, grid.candidates.at(static_cast<std::size_t>(qb)));
}

cplx Dictionary::column_inner_delay(int q, double nu) const {
  const double delta = nu - grid.candidates.at(static_cast<std::size_t>(q));
  return index_sum(runs, kTwoPi * delta_f * delta) / static_cast<double>(K);
}

void Dictionary::correlate(const cvec& H, cvec& out) const {
  const std::size_t Q = grid.candidates.size();
  out.assign(Q, cplx{0.0, 0.0});
  for (std::size_t q = 0; q < Q; ++q) {
    const double theta = kTwoPi * delta_f * grid.candidates[q];
    const cplx step = std::polar(1.0, theta);
    cplx acc{0.0, 0.0};
    std::size_t m = 0;
    for (const auto& [start, len] : runs) {
      cplx phase = std::polar(1.0, theta * start);
      for (int i = 0; i < len; ++i) {
        acc += phase * H[m++];
        phase *= step;
      }
    }
    out[q] = acc / normalizer;
  }
}

std::vector<double> SparseCir::delays() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.delay_s);
  return out;
}

std::vector<cplx> SparseCir::amps() const {
  std::vector<cplx> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.amp);
  return out;
}

SparseCir omp_solve(const cvec& H, const Dictionary& dict, double stop_ratio, int max_iter) {
  const int M = dict.measurement_count();
  const int Q = static_cast<int>(dict.grid.candidates.size());
  if (static_cast<int>(H.size()) != M)
    throw std::invalid_argument("measurement length does not match the dictionary");
  if (!(stop_ratio > 0.0 && stop_ratio < 1.0))
    throw std::domain_error("stop_ratio must lie in (0, 1)");
  if (max_iter == kOmpDefaultMaxIter) max_iter = std::min(32, M / 2);
  if (max_iter < 1) max_iter = 1;

  SparseCir result;
  result.grid = std::make_shared<DelayGrid>(dict.grid);

  double energy = 0.0;
  for (const cplx& v : H) energy += std::norm(v);
  const double nH = std::sqrt(energy);
  if (nH == 0.0) return result;

  cvec c0;
  dict.correlate(H, c0);
  cvec c = c0;

  const double g0 = std::real(dict.column_inner(0, 0));  // squared column norm, M/K
  std::vector<char> banned(static_cast<std::size_t>(Q), 0);
  std::vector<char> taken(static_cast<std::size_t>(Q), 0);
  std::vector<int> sel;
  std::vector<cvec> gram_cols;  // per selected atom j: <col_q, col_j> for all q
  Eigen::MatrixXcd gram_sel;
  Eigen::LDLT<Eigen::MatrixXcd> factor;
  Eigen::VectorXcd x;

  double norm_r2 = energy;
  while (static_cast<int>(sel.size()) < max_iter) {
    if (std::sqrt(norm_r2) <= stop_ratio * nH) break;

    int pick = -1;
    while (true) {
      int best = -1;
      double best_mag = -1.0;
      for (int q = 0; q < Q; ++q) {
        if (banned[static_cast<std::size_t>(q)] || taken[static_cast<std::size_t>(q)]) continue;
        const double mag = std::norm(c[static_cast<std::size_t>(q)]);
        if (mag > best_mag) {
          best_mag = mag;
          best = q;
        }
      }
      if (best < 0) break;
      if (!sel.empty()) {
        // Projection complement of the candidate onto the selected span; a
        // near-dependent column would make the joint refit ill-conditioned.
        const int n = static_cast<int>(sel.size());
        Eigen::VectorXcd w(n);
        for (int i = 0; i < n; ++i) w(i) = dict.column_inner(sel[static_cast<std::size_t>(i)], best);
        const Eigen::VectorXcd y = factor.solve(w);
        const double complement = g0 - std::real(w.dot(y));
        if (complement < kDropTol * g0) {
          banned[static_cast<std::size_t>(best)] = 1;
          ++result.dropped_candidates;
          continue;
        }
      }
      pick = best;
      break;
    }
    if (pick < 0) break;

    sel.push_back(pick);
    taken[static_cast<std::size_t>(pick)] = 1;
    const int n = static_cast<int>(sel.size());
    gram_sel.conservativeResize(n, n);
    for (int i = 0; i < n; ++i) {
      const cplx v = dict.column_inner(sel[static_cast<std::size_t>(i)], pick);
      gram_sel(i, n - 1) = v;
      gram_sel(n - 1, i) = std::conj(v);
    }
    factor.compute(gram_sel);

    Eigen::VectorXcd b(n);
    for (int i = 0; i < n; ++i) b(i) = c0[static_cast<std::size_t>(sel[static_cast<std::size_t>(i)])];
    x = factor.solve(b);
    norm_r2 = std::max(0.0, energy - std::real(b.dot(x)));
    result.residual_history.push_back(std::sqrt(norm_r2));

    cvec col(static_cast<std::size_t>(Q));
    for (int q = 0; q < Q; ++q) col[static_cast<std::size_t>(q)] = dict.column_inner(q, pick);
    gram_cols.push_back(std::move(col));
    for (int q = 0; q < Q; ++q) {
      cplx acc = c0[static_cast<std::size_t>(q)];
      for (int i = 0; i < n; ++i) acc -= gram_cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] * x(i);
      c[static_cast<std::size_t>(q)] = acc;
    }
  }

  result.residual_ratio = std::sqrt(norm_r2) / nH;
  result.hit_max_iter =
      static_cast<int>(sel.size()) == max_iter && result.residual_ratio > stop_ratio;

  if (!sel.empty()) {
    std::vector<int> order(sel.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return dict.grid.candidates[static_cast<std::size_t>(sel[static_cast<std::size_t>(a)])] <
             dict.grid.candidates[static_cast<std::size_t>(sel[static_cast<std::size_t>(b)])];
    });
    result.entries.reserve(sel.size());
    for (int i : order) {
      SparseCir::Entry e;
      e.delay_s = dict.grid.candidates[static_cast<std::size_t>(sel[static_cast<std::size_t>(i)])];
      e.amp = x(i) / dict.normalizer;  // dictionary columns carry 1/sqrt(K)
      result.entries.push_back(e);
    }
  }
  return result;
}

cvec synth_model_cfr(const SparseCir& cir, int start_index, int width,
                     const FrequencyPlan& plan) {
  cvec out(static_cast<std::size_t>(width), cplx{0.0, 0.0});
  for (const auto& e : cir.entries) {
    const double theta = -kTwoPi * plan.delta_f * e.delay_s;
    const cplx step = std::polar(1.0, theta);
    cplx phase = std::polar(1.0, theta * start_index);
    for (int k = 0; k < width; ++k) {
      out[static_cast<std::size_t>(k)] += e.amp * phase;
      phase *= step;
    }
  }
  return out;
}

}  // namespace hisac
