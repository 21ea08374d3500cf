#pragma once

// Variational adiabatic gauge potential by nested commutators.
//
// O_1 = i[H, dH], O_{k+1} = [H, [H, O_k]] (all Hermitian), A = sum_k alpha_k O_k.
// With C_k = i[H, O_k] the residual G = dH + i[A, H] = dH - sum_k alpha_k C_k,
// and S(alpha) = <G, G> is minimised by M alpha = b, M_jk = <C_j, C_k>,
// b_j = <C_j, dH>, where <A, B> = Tr[AB]/2^n.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaugekit/error.hpp"
#include "gaugekit/fermion.hpp"
#include "gaugekit/pauli.hpp"

namespace gaugekit {

inline constexpr int kDefaultMaxAgpOrder = 3;
inline constexpr double kGramCutoff = 1e-10;

struct SchedulePoint {
  double t = 0.0;
  double T = 1.0;
  double lambda = 0.0;
  double lambda_dot = 0.0;
};

/// lambda(t) = sin^2(pi t / 2T)
inline SchedulePoint schedule_at(double t, double T) {
  if (!(T > 0.0)) throw Error("schedule_at: total time must be positive");
  if (t < 0.0 || t > T) throw Error("schedule_at: t outside [0, T]");
  const double s = std::sin(std::numbers::pi * t / (2.0 * T));
  return {t, T, s * s, std::numbers::pi / (2.0 * T) * std::sin(std::numbers::pi * t / T)};
}

inline PauliSum hamiltonian_at(const AdiabaticSplit& split, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw Error("hamiltonian_at: lambda outside [0, 1]");
  return split.at(lambda);
}

/// O_1 .. O_l at the given lambda.
inline std::vector<PauliSum> nested_basis(const AdiabaticSplit& split, double lambda, int l) {
  if (l < 1) throw Error("nested_basis: order must be at least 1");
  const PauliSum h = split.at(lambda);
  std::vector<PauliSum> out;
  out.reserve(static_cast<std::size_t>(l));
  out.push_back(commutator(h, split.h_two) * cplx{0.0, 1.0});
  for (int k = 1; k < l; ++k) out.push_back(commutator(h, commutator(h, out.back())));
  return out;
}

struct ActionProblem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
  double dh_norm2 = 0.0;  // <dH, dH>, the action at alpha = 0
};

struct AgpExpansion {
  int order = 0;
  double lambda = 0.0;
  std::vector<PauliSum> basis;
  std::vector<double> alphas;
  double action = 0.0;          // S_l at the optimum
  double action_at_zero = 0.0;  // <dH, dH>
  int rank = 0;
  double condition = 0.0;
  bool rank_deficient = false;

  /// sum_k alpha_k O_k
  PauliSum potential(double drop_tol = kDefaultDropTol) const {
    if (basis.empty()) throw Error("AgpExpansion: empty basis");
    detail::Accumulator acc;
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (const auto& [w, c] : basis[k]) acc[w] += alphas[k] * c;
    return detail::collect(basis.front().n_qubits(), acc, drop_tol);
  }
};

namespace detail {

inline double real_inner(const PauliSum& a, const PauliSum& b) { return trace_inner_product(a, b).real(); }

struct GramSolution {
  Eigen::VectorXd alpha;
  int rank;
  double condition;
};

inline GramSolution solve_gram(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(kGramCutoff);
  GramSolution s{svd.solve(b), static_cast<int>(svd.rank()), 0.0};
  const auto& sv = svd.singularValues();
  s.condition = sv.size() && sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  if (sv.size() && sv[0] == 0.0) s.alpha.setZero();
  return s;
}

inline AgpExpansion solve_expansion(std::vector<PauliSum> basis, const std::vector<PauliSum>& cs, const PauliSum& dh,
                                    double lambda) {
  const auto l = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(l, l);
  Eigen::VectorXd b(l);
  for (Eigen::Index j = 0; j < l; ++j) {
    b[j] = real_inner(cs[j], dh);
    for (Eigen::Index k = 0; k <= j; ++k) m(j, k) = m(k, j) = real_inner(cs[j], cs[k]);
  }
  const auto sol = solve_gram(m, b);
  AgpExpansion e;
  e.order = static_cast<int>(l);
  e.lambda = lambda;
  e.basis = std::move(basis);
  e.alphas.assign(sol.alpha.data(), sol.alpha.data() + l);
  e.action_at_zero = real_inner(dh, dh);
  e.action = e.action_at_zero - 2.0 * sol.alpha.dot(b) + sol.alpha.dot(m * sol.alpha);
  e.rank = sol.rank;
  e.condition = sol.condition;
  e.rank_deficient = sol.rank < l;
  return e;
}

}  // namespace detail

inline ActionProblem action_problem(const AdiabaticSplit& split, double lambda, int l) {
  const auto basis = nested_basis(split, lambda, l);
  const PauliSum h = split.at(lambda);
  ActionProblem p{Eigen::MatrixXd(l, l), Eigen::VectorXd(l), detail::real_inner(split.h_two, split.h_two)};
  std::vector<PauliSum> cs;
  for (const auto& o : basis) cs.push_back(commutator(h, o) * cplx{0.0, 1.0});
  for (int j = 0; j < l; ++j) {
    p.rhs[j] = detail::real_inner(cs[j], split.h_two);
    for (int k = 0; k < l; ++k) p.gram(j, k) = detail::real_inner(cs[j], cs[k]);
  }
  return p;
}

/// Optimal alphas and the minimal action at lambda.
inline AgpExpansion minimize_action(const AdiabaticSplit& split, double lambda, int l,
                                    int max_order = kDefaultMaxAgpOrder) {
  if (l < 1) throw Error("minimize_action: order must be at least 1");
  if (l > max_order)
    throw Error("minimize_action: order " + std::to_string(l) + " exceeds the maximum " + std::to_string(max_order));
  auto basis = nested_basis(split, lambda, l);
  const PauliSum h = split.at(lambda);
  std::vector<PauliSum> cs;
  for (const auto& o : basis) cs.push_back(commutator(h, o) * cplx{0.0, 1.0});
  return detail::solve_expansion(std::move(basis), cs, split.h_two, lambda);
}

/// The residual G = dH - sum_k alpha_k C_k of an expansion.
inline PauliSum action_residual(const AdiabaticSplit& split, const AgpExpansion& e) {
  const PauliSum h = split.at(e.lambda);
  PauliSum g = split.h_two;
  for (std::size_t k = 0; k < e.basis.size(); ++k) g -= commutator(h, e.basis[k]) * cplx{0.0, e.alphas[k]};
  return simplify(g);
}

/// Counter-diabatic term lambda_dot * A(lambda) along the schedule. Reuses the
/// order-1 pieces, which are polynomial in lambda: O_1 = i[h_one, h_two] and
/// C_1 = P + lambda Q with P = i[h_one, O_1], Q = i[h_two, O_1].
class CdDriver {
 public:
  CdDriver(const AdiabaticSplit& split, int order, int max_order = kDefaultMaxAgpOrder)
      : split_(split), order_(order) {
    if (order < 1) throw Error("CdDriver: order must be at least 1");
    if (order > max_order)
      throw Error("CdDriver: order " + std::to_string(order) + " exceeds the maximum " + std::to_string(max_order));
    if (order_ == 1) {
      o1_ = commutator(split.h_one, split.h_two) * cplx{0.0, 1.0};
      const PauliSum p = commutator(split.h_one, o1_) * cplx{0.0, 1.0};
      const PauliSum q = commutator(split.h_two, o1_) * cplx{0.0, 1.0};
      pp_ = detail::real_inner(p, p);
      pq_ = detail::real_inner(p, q);
      qq_ = detail::real_inner(q, q);
      pd_ = detail::real_inner(p, split.h_two);
      qd_ = detail::real_inner(q, split.h_two);
    }
  }

  int order() const { return order_; }
  const AdiabaticSplit& split() const { return split_; }

  std::vector<double> alphas(double lambda) const {
    if (order_ != 1) return minimize_action(split_, lambda, order_, order_).alphas;
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = pp_ + 2.0 * lambda * pq_ + lambda * lambda * qq_;
    Eigen::VectorXd b(1);
    b[0] = pd_ + lambda * qd_;
    return {detail::solve_gram(m, b).alpha[0]};
  }

  /// A(lambda)
  PauliSum potential(double lambda) const {
    if (order_ == 1) return simplify(o1_ * cplx{alphas(lambda)[0], 0.0});
    return minimize_action(split_, lambda, order_, order_).potential();
  }

  PauliSum hamiltonian(const SchedulePoint& p) const {
    if (p.lambda_dot == 0.0) return PauliSum(split_.n_qubits);
    return simplify(potential(p.lambda) * cplx{p.lambda_dot, 0.0});
  }

 private:
  AdiabaticSplit split_;
  int order_;
  PauliSum o1_{1};
  double pp_ = 0, pq_ = 0, qq_ = 0, pd_ = 0, qd_ = 0;
};

inline PauliSum cd_hamiltonian(const AdiabaticSplit& split, const SchedulePoint& point, int l,
                               int max_order = kDefaultMaxAgpOrder) {
  if (l < 1 || l > max_order) throw Error("cd_hamiltonian: order out of range");
  if (point.lambda_dot == 0.0) return PauliSum(split.n_qubits);
  return simplify(minimize_action(split, point.lambda, l, max_order).potential() * cplx{point.lambda_dot, 0.0});
}

// ---------------------------------------------------------------------------
// Z-type symmetries and the AGA operator pool

/// Basis (over GF(2)) of Z-only words commuting with every term of the given sums.
inline std::vector<std::uint64_t> z_symmetries(const std::vector<const PauliSum*>& sums) {
  if (sums.empty()) throw Error("z_symmetries: no operators");
  const int n = sums.front()->n_qubits();
  // rows: x masks; find z with popcount(z & x) even for every row
  std::vector<std::uint64_t> rows;
  for (const auto* s : sums)
    for (const auto& [w, c] : *s)
      if (w.x_mask) rows.push_back(w.x_mask);
  // Gaussian elimination to reduced row echelon form
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int col = 0; col < n && r < rows.size(); ++col) {
    const std::uint64_t bit = std::uint64_t{1} << col;
    std::size_t sel = r;
    while (sel < rows.size() && !(rows[sel] & bit)) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && (rows[i] & bit)) rows[i] ^= rows[r];
    pivots.push_back(col);
    ++r;
  }
  rows.resize(r);
  std::vector<std::uint64_t> basis;
  for (int free = 0; free < n; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    std::uint64_t z = std::uint64_t{1} << free;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i] & (std::uint64_t{1} << free)) z |= std::uint64_t{1} << pivots[i];
    basis.push_back(z);
  }
  return basis;
}

inline std::vector<std::uint64_t> symmetry_group(const std::vector<std::uint64_t>& generators) {
  if (generators.size() > 20) throw Error("symmetry_group: too many generators");
  std::vector<std::uint64_t> group{0};
  for (auto g : generators) {
    const std::size_t k = group.size();
    for (std::size_t i = 0; i < k; ++i) group.push_back(group[i] ^ g);
  }
  return group;
}

/// Lowest-weight member of {w S : S in group}, ties broken by word order.
inline PauliWord canonical_representative(const PauliWord& w, const std::vector<std::uint64_t>& group) {
  PauliWord best = w;
  for (auto s : group) {
    const PauliWord c{w.x_mask, w.z_mask ^ s, w.n_qubits};
    if (c.weight() < best.weight() || (c.weight() == best.weight() && c < best)) best = c;
  }
  return best;
}

/// Qubits on which every term acts as I or Z; each carries a conserved Z_q.
inline std::uint64_t frozen_qubits(const std::vector<const PauliSum*>& sums) {
  if (sums.empty()) throw Error("frozen_qubits: no operators");
  std::uint64_t xs = 0;
  for (const auto* s : sums)
    for (const auto& [w, c] : *s) xs |= w.x_mask;
  return ~xs & qubit_mask(sums.front()->n_qubits());
}

/// How pool words related by a Z-type symmetry of the Hamiltonian are merged.
/// Merging is exact on the symmetry sector of a basis-state reference: there
/// w and w S act identically up to the sign of the eigenvalue of S.
enum class PoolReduction {
  none,           // every word of O_1..O_l
  frozen_qubits,  // strip Z factors on qubits no term flips
  z_group,        // full group of Z-only symmetries, lowest-weight member kept
};

inline std::string to_string(PoolReduction r) {
  switch (r) {
    case PoolReduction::none: return "none";
    case PoolReduction::frozen_qubits: return "frozen-qubits";
    default: return "z-group";
  }
}

inline PoolReduction parse_pool_reduction(const std::string& s) {
  if (s == "none") return PoolReduction::none;
  if (s == "frozen-qubits") return PoolReduction::frozen_qubits;
  if (s == "z-group") return PoolReduction::z_group;
  throw Error("unknown pool reduction '" + s + "' (expected none, frozen-qubits or z-group)");
}

struct PoolOptions {
  PoolReduction reduction = PoolReduction::frozen_qubits;
  int max_order = kDefaultMaxAgpOrder;
  double drop_tol = 1e-10;
};

/// Pauli words of O_1..O_l at reference_lambda, merged per opt.reduction and
/// sorted in word order.
inline std::vector<PauliWord> aga_pool(const AdiabaticSplit& split, int l, double reference_lambda = 0.5,
                                      const PoolOptions& opt = {}) {
  if (!(reference_lambda > 0.0 && reference_lambda <= 1.0)) throw Error("aga_pool: reference lambda outside (0, 1]");
  if (l < 1 || l > opt.max_order) throw Error("aga_pool: order out of range");
  const auto basis = nested_basis(split, reference_lambda, l);
  std::vector<std::uint64_t> group{0};
  if (opt.reduction == PoolReduction::z_group) {
    group = symmetry_group(z_symmetries({&split.h_one, &split.h_two}));
  } else if (opt.reduction == PoolReduction::frozen_qubits) {
    std::vector<std::uint64_t> gens;
    const std::uint64_t frozen = frozen_qubits({&split.h_one, &split.h_two});
    for (int q = 0; q < split.n_qubits; ++q)
      if ((frozen >> q) & 1u) gens.push_back(std::uint64_t{1} << q);
    group = symmetry_group(gens);
  }
  std::set<PauliWord> pool;
  for (const auto& o : basis)
    for (const auto& [w, c] : o)
      if (std::abs(c) > opt.drop_tol && !w.is_identity()) pool.insert(canonical_representative(w, group));
  if (pool.empty()) throw Error("aga_pool: empty pool; [h_one, h_two] vanishes");
  return {pool.begin(), pool.end()};
}

// ---------------------------------------------------------------------------
// Dense checks (small registers only)

/// Off-diagonal weight of G in the eigenbasis of H(lambda): Tr[G_off^2]/2^n.
/// The diagonal part of dH is untouched by any gauge potential, so this is the
/// part of the action above the exact-AGP floor.
inline double dense_excess_action(const AdiabaticSplit& split, const AgpExpansion& e, double degeneracy_tol = 1e-9) {
  const Eigen::MatrixXcd h = to_dense_matrix(split.at(e.lambda));
  const Eigen::MatrixXcd g = to_dense_matrix(action_residual(split, e));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::MatrixXcd gt = es.eigenvectors().adjoint() * g * es.eigenvectors();
  double s = 0.0;
  for (Eigen::Index i = 0; i < gt.rows(); ++i)
    for (Eigen::Index j = 0; j < gt.cols(); ++j)
      if (std::abs(es.eigenvalues()[i] - es.eigenvalues()[j]) > degeneracy_tol) s += std::norm(gt(i, j));
  return s / static_cast<double>(gt.rows());
}

/// Tr[D^2]/2^n with D the eigenbasis-diagonal part of dH: the least action any
/// gauge potential can reach.
inline double dense_action_floor(const AdiabaticSplit& split, double lambda, double degeneracy_tol = 1e-9) {
  const Eigen::MatrixXcd h = to_dense_matrix(split.at(lambda));
  const Eigen::MatrixXcd d = to_dense_matrix(split.h_two);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::MatrixXcd dt = es.eigenvectors().adjoint() * d * es.eigenvectors();
  double s = 0.0;
  for (Eigen::Index i = 0; i < dt.rows(); ++i)
    for (Eigen::Index j = 0; j < dt.cols(); ++j)
      if (std::abs(es.eigenvalues()[i] - es.eigenvalues()[j]) <= degeneracy_tol) s += std::norm(dt(i, j));
  return s / static_cast<double>(dt.rows());
}

/// H = delta X + lambda Z on one qubit.
inline AdiabaticSplit landau_zener(double delta) {
  return {PauliSum::from_strings({{"X", delta}}), PauliSum::from_strings({{"Z", 1.0}}), 1};
}

/// Closed-form gauge potential of the two-level problem: -delta / (2 (delta^2 + lambda^2)) Y.
inline PauliSum landau_zener_exact_agp(double delta, double lambda) {
  return PauliSum::from_strings({{"Y", -delta / (2.0 * (delta * delta + lambda * lambda))}});
}

}  // namespace gaugekit
