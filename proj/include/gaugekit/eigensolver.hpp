#pragma once

// Lowest eigenpair of a Pauli sum: matrix-free Lanczos with full
// reorthogonalization, plus a dense path for small registers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaugekit/error.hpp"
#include "gaugekit/pauli.hpp"
#include "gaugekit/statevector.hpp"

namespace gaugekit {

inline constexpr int kMaxDenseEigenQubits = 10;

struct GroundStateOptions {
  double tol = 1e-9;  // on ||H psi - E psi||
  std::uint64_t seed = 0;
  int restarts = 3;
  int max_krylov = 120;
  int max_cycles = 60;
  int max_qubits = kMaxStateQubits;
  std::optional<std::uint64_t> hint_index;  // usually the HF determinant
  const std::vector<char>* sector = nullptr;  // restrict to basis indices with mask[i] != 0
};

struct GroundStateResult {
  double energy = 0.0;
  Statevector state{1};
  double residual_norm = 0.0;
  int iterations = 0;
  bool degenerate = false;
};

namespace detail {

inline void project(Eigen::VectorXcd& v, const std::vector<char>* sector) {
  if (!sector) return;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(*sector)[static_cast<std::size_t>(i)]) v[i] = 0.0;
}

struct LanczosRun {
  double energy;
  Eigen::VectorXcd vec;
  double gap;  // second Ritz value minus the first in the final cycle
  int iterations;
};

inline LanczosRun lanczos_run(const CompiledPauliSum& op, Eigen::VectorXcd v, const GroundStateOptions& opt,
                              Eigen::Index sector_dim) {
  const Eigen::Index dim = v.size();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opt.max_krylov, sector_dim));
  Eigen::MatrixXcd V(dim, m_max);
  Eigen::VectorXcd w;
  LanczosRun out{std::numeric_limits<double>::infinity(), v, std::numeric_limits<double>::infinity(), 0};
  for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
    v.normalize();
    std::vector<double> alpha, beta;
    int m = 0;
    bool invariant = false;
    V.col(0) = v;
    for (m = 0; m < m_max; ++m) {
      op.apply(V.col(m), w);
      project(w, opt.sector);
      ++out.iterations;
      alpha.push_back(V.col(m).dot(w).real());
      for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(m + 1) * (V.leftCols(m + 1).adjoint() * w);
      const double b = w.norm();
      if (m + 1 == m_max) break;
      if (b < 1e-12 * std::max(1.0, std::abs(alpha.back()))) {
        invariant = true;
        ++m;
        break;
      }
      beta.push_back(b);
      V.col(m + 1) = w / b;
    }
    const int k = invariant ? m : m + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd s = es.eigenvectors().col(0);
    Eigen::VectorXcd ritz = V.leftCols(k) * s.cast<cplx>();
    ritz.normalize();
    op.apply(ritz, w);
    project(w, opt.sector);
    const double e = ritz.dot(w).real();
    const double res = (w - e * ritz).norm();
    out.energy = e;
    out.vec = ritz;
    out.gap = k > 1 ? es.eigenvalues()[1] - es.eigenvalues()[0] : std::numeric_limits<double>::infinity();
    if (res < opt.tol || invariant) return out;
    v = ritz;  // thick restart from the current Ritz vector
  }
  return out;
}

}  // namespace detail

inline GroundStateResult ground_state(const PauliSum& h, const GroundStateOptions& opt = {}) {
  const int n = h.n_qubits();
  if (n > opt.max_qubits) throw Error("ground_state: " + std::to_string(n) + " qubits exceeds the configured maximum");
  if (!h.is_hermitian()) throw Error("ground_state: operator is not Hermitian");
  if (opt.tol <= 0.0) throw Error("ground_state: tolerance must be positive");
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (opt.sector && opt.sector->size() != static_cast<std::size_t>(dim))
    throw Error("ground_state: sector mask has the wrong size");
  Eigen::Index sector_dim = dim;
  if (opt.sector) sector_dim = std::count_if(opt.sector->begin(), opt.sector->end(), [](char c) { return c != 0; });
  if (sector_dim == 0) throw Error("ground_state: empty sector");
  if (opt.hint_index && (*opt.hint_index >= static_cast<std::uint64_t>(dim) ||
                         (opt.sector && !(*opt.sector)[*opt.hint_index])))
    throw Error("ground_state: hint index outside the search space");

  const CompiledPauliSum op(h);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  GroundStateResult best;
  best.energy = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXcd> found;
  std::vector<double> found_e;
  int total_iter = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = cplx{normal(rng), normal(rng)};
    detail::project(v, opt.sector);
    v /= v.norm();
    if (opt.hint_index) v[static_cast<Eigen::Index>(*opt.hint_index)] += 1.0;
    auto run = detail::lanczos_run(op, v, opt, sector_dim);
    total_iter += run.iterations;
    min_gap = std::min(min_gap, run.gap);
    found.push_back(run.vec);
    found_e.push_back(run.energy);
    if (run.energy < best.energy) {
      best.energy = run.energy;
      best.state = Statevector(n, run.vec);
    }
  }
  Eigen::VectorXcd hv = op.apply(best.state.amplitudes());
  detail::project(hv, opt.sector);
  best.residual_norm = (hv - best.energy * best.state.amplitudes()).norm();
  best.iterations = total_iter;
  const double scale = std::max(1.0, std::abs(best.energy));
  if (best.residual_norm > opt.tol * scale)
    throw Error("ground_state: Lanczos did not converge (residual " + format_double(best.residual_norm) + ")");
  // Single-vector Lanczos sees one copy of a degenerate level; distinct
  // restarts landing on orthogonal-ish vectors of the same energy expose it.
  best.degenerate = min_gap < 1e-8;
  for (std::size_t a = 0; a < found.size(); ++a)
    if (std::abs(found_e[a] - best.energy) < 1e-8 && std::abs(found[a].dot(best.state.amplitudes())) < 1.0 - 1e-6)
      best.degenerate = true;
  return best;
}

/// Dense diagonalization, optionally inside a sector. For n <= 10.
inline GroundStateResult dense_ground_state(const PauliSum& h, const std::vector<char>* sector = nullptr) {
  const int n = h.n_qubits();
  if (n > kMaxDenseEigenQubits) throw Error("dense_ground_state: register too large for the dense path");
  const Eigen::MatrixXcd full = to_dense_matrix(h);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < full.rows(); ++i)
    if (!sector || (*sector)[static_cast<std::size_t>(i)]) idx.push_back(i);
  if (idx.empty()) throw Error("dense_ground_state: empty sector");
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = full(idx[a], idx[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
  GroundStateResult r;
  r.energy = es.eigenvalues()[0];
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(full.rows());
  for (Eigen::Index a = 0; a < k; ++a) v[idx[a]] = es.eigenvectors()(a, 0);
  r.state = Statevector(n, v);
  r.residual_norm = (full * v - r.energy * v).norm();
  r.degenerate = k > 1 && es.eigenvalues()[1] - es.eigenvalues()[0] < 1e-8;
  return r;
}

}  // namespace gaugekit
