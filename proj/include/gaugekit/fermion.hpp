#pragma once

// Second-quantized molecular Hamiltonians and fermion-to-qubit encodings.
//
// Annihilation follows a_p -> (X_p + iY_p)/2 times the parity string, so an
// occupied mode is qubit value 1 (Z eigenvalue -1) and a+_p a_p -> (I - Z_p)/2
// under Jordan-Wigner. Bravyi-Kitaev uses the Fenwick-tree update/parity/flip
// sets: qubit j stores the parity of modes (j & (j+1)) .. j.

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gaugekit/error.hpp"
#include "gaugekit/fcidump.hpp"
#include "gaugekit/pauli.hpp"

namespace gaugekit {

enum class Mapping { jordan_wigner, bravyi_kitaev };

/// How (spatial orbital, spin) pairs are numbered as modes. Interleaved puts
/// alpha of orbital p at 2p and beta at 2p+1; blocked puts every alpha before
/// every beta.
enum class SpinOrdering { interleaved, blocked };

enum class Spin { alpha = 0, beta = 1 };

inline std::string to_string(Mapping m) { return m == Mapping::jordan_wigner ? "jw" : "bk"; }
inline std::string to_string(SpinOrdering o) { return o == SpinOrdering::interleaved ? "interleaved" : "blocked"; }

inline Mapping parse_mapping(const std::string& s) {
  if (s == "jw" || s == "jordan-wigner") return Mapping::jordan_wigner;
  if (s == "bk" || s == "bravyi-kitaev") return Mapping::bravyi_kitaev;
  throw Error("unknown mapping '" + s + "' (expected jw or bk)");
}

inline SpinOrdering parse_spin_ordering(const std::string& s) {
  if (s == "interleaved") return SpinOrdering::interleaved;
  if (s == "blocked") return SpinOrdering::blocked;
  throw Error("unknown spin ordering '" + s + "'");
}

inline int spin_orbital(int spatial, Spin spin, int n_spatial, SpinOrdering ordering) {
  if (spatial < 0 || spatial >= n_spatial) throw Error("spin_orbital: spatial index out of range");
  const int s = static_cast<int>(spin);
  return ordering == SpinOrdering::interleaved ? 2 * spatial + s : spatial + s * n_spatial;
}

struct LadderOp {
  int mode = 0;
  bool creation = false;
  friend bool operator==(const LadderOp&, const LadderOp&) = default;
};

inline LadderOp cre(int p) { return {p, true}; }
inline LadderOp ann(int p) { return {p, false}; }

/// coefficient * ops[0] ops[1] ... (leftmost acts last).
struct FermionTerm {
  std::vector<LadderOp> ops;
  cplx coefficient{1.0, 0.0};
};

class FermionSum {
 public:
  explicit FermionSum(int n_modes) : n_modes_(n_modes) {
    if (n_modes < 1 || n_modes > kMaxPauliQubits) throw Error("FermionSum: mode count out of range");
  }

  int n_modes() const { return n_modes_; }
  const std::vector<FermionTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add(std::vector<LadderOp> ops, cplx c) {
    for (const auto& op : ops)
      if (op.mode < 0 || op.mode >= n_modes_) throw Error("FermionSum: mode index out of range");
    terms_.push_back({std::move(ops), c});
  }

  FermionSum& operator+=(const FermionSum& o) {
    if (o.n_modes_ != n_modes_) throw Error("FermionSum: mode-count mismatch");
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }

  FermionSum adjoint() const {
    FermionSum r(n_modes_);
    for (const auto& t : terms_) {
      std::vector<LadderOp> ops(t.ops.rbegin(), t.ops.rend());
      for (auto& op : ops) op.creation = !op.creation;
      r.terms_.push_back({std::move(ops), std::conj(t.coefficient)});
    }
    return r;
  }

 private:
  int n_modes_;
  std::vector<FermionTerm> terms_;
};

// ---------------------------------------------------------------------------
// Bravyi-Kitaev index sets

struct BkSets {
  std::uint64_t update = 0;     // qubits other than j whose stored parity includes mode j
  std::uint64_t parity = 0;     // qubits whose parities sum to modes 0..j-1
  std::uint64_t flip = 0;       // qubits that together with j give the occupation of mode j
  std::uint64_t remainder = 0;  // parity \ flip
};

inline BkSets bk_sets(int j, int n) {
  if (j < 0 || j >= n) throw Error("bk_sets: mode index out of range");
  BkSets s;
  for (int i = j | (j + 1); i < n; i = i | (i + 1)) s.update |= std::uint64_t{1} << i;
  for (int i = j - 1; i >= 0; i = (i & (i + 1)) - 1) s.parity |= std::uint64_t{1} << i;
  const int start = j & (j + 1);
  for (int i = j - 1; i >= start; i = (i & (i + 1)) - 1) s.flip |= std::uint64_t{1} << i;
  s.remainder = s.parity & ~s.flip;
  return s;
}

/// Rows of the BK transformation matrix over GF(2); row j is a bit mask over modes.
inline std::vector<std::uint64_t> bk_matrix(int n) {
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) rows[j] = qubit_mask(j + 1) & ~qubit_mask(j & (j + 1));
  return rows;
}

/// Maps an occupation-number bit string to the qubit basis index of the encoding.
inline std::uint64_t occupation_to_basis(std::uint64_t occupation, int n, Mapping mapping) {
  if (mapping == Mapping::jordan_wigner) return occupation;
  std::uint64_t b = 0;
  for (int j = 0; j < n; ++j) {
    const int start = j & (j + 1);
    const std::uint64_t range = qubit_mask(j + 1) & ~qubit_mask(start);
    if (std::popcount(occupation & range) & 1) b |= std::uint64_t{1} << j;
  }
  return b;
}

inline std::uint64_t basis_to_occupation(std::uint64_t basis, int n, Mapping mapping) {
  if (mapping == Mapping::jordan_wigner) return basis;
  std::uint64_t occ = 0;
  for (int j = 0; j < n; ++j) {
    const auto s = bk_sets(j, n);
    const int nj = ((basis >> j) & 1u) ^ (std::popcount(basis & s.flip) & 1);
    if (nj) occ |= std::uint64_t{1} << j;
  }
  return occ;
}

/// Pauli image of a single ladder operator on n modes.
inline PauliSum ladder_image(LadderOp op, int n, Mapping mapping) {
  const int j = op.mode;
  if (j < 0 || j >= n) throw Error("ladder_image: mode index out of range");
  const std::uint64_t bit = std::uint64_t{1} << j;
  std::uint64_t x = bit, z_x = 0, z_y = bit;
  if (mapping == Mapping::jordan_wigner) {
    z_x = qubit_mask(j);
    z_y |= qubit_mask(j);
  } else {
    const auto s = bk_sets(j, n);
    x |= s.update;
    z_x = s.parity;
    z_y |= s.remainder;
  }
  // a = (X_U X_j Z_P + i X_U Y_j Z_R) / 2, a+ flips the sign of the second term.
  PauliSum r(n);
  r.add(PauliWord{x, z_x, n}, 0.5);
  r.add(PauliWord{x, z_y, n}, cplx{0.0, op.creation ? -0.5 : 0.5});
  return r;
}

class FermionMapper {
 public:
  FermionMapper(int n_modes, Mapping mapping) : n_(n_modes), mapping_(mapping) {
    for (int p = 0; p < n_; ++p) {
      ann_.push_back(ladder_image(ann(p), n_, mapping_));
      cre_.push_back(ladder_image(cre(p), n_, mapping_));
    }
  }

  const PauliSum& image(LadderOp op) const { return op.creation ? cre_.at(op.mode) : ann_.at(op.mode); }

  PauliSum map(const FermionSum& f, double drop_tol = kDefaultDropTol) const {
    if (f.n_modes() != n_) throw Error("FermionMapper: mode-count mismatch");
    detail::Accumulator acc;
    for (const auto& t : f.terms()) {
      PauliSum prod = PauliSum::identity(n_, t.coefficient);
      for (const auto& op : t.ops) prod = multiply(prod, image(op), 0.0);
      for (const auto& [w, c] : prod) acc[w] += c;
    }
    return detail::collect(n_, acc, drop_tol);
  }

 private:
  int n_;
  Mapping mapping_;
  std::vector<PauliSum> ann_, cre_;
};

inline PauliSum map_fermions(const FermionSum& f, Mapping mapping) { return FermionMapper(f.n_modes(), mapping).map(f); }
inline PauliSum jordan_wigner(const FermionSum& f) { return map_fermions(f, Mapping::jordan_wigner); }
inline PauliSum bravyi_kitaev(const FermionSum& f) { return map_fermions(f, Mapping::bravyi_kitaev); }

// ---------------------------------------------------------------------------
// Molecular Hamiltonian

/// sum_{pq,sigma} h_pq a+_{p sigma} a_{q sigma}, plus the core energy as an identity term.
inline FermionSum build_one_body(const MolecularIntegrals& ints, SpinOrdering ordering = SpinOrdering::interleaved,
                                 bool include_core = true) {
  const int m = ints.n_spatial_orbitals();
  FermionSum f(2 * m);
  if (include_core && ints.core_energy != 0.0) f.add({}, ints.core_energy);
  for (Spin s : {Spin::alpha, Spin::beta})
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const double h = ints.one_body(p, q);
        if (h == 0.0) continue;
        f.add({cre(spin_orbital(p, s, m, ordering)), ann(spin_orbital(q, s, m, ordering))}, h);
      }
  return f;
}

/// 1/2 sum (pq|rs) a+_{p sigma} a+_{r tau} a_{s tau} a_{q sigma}: chemist
/// integrals reindexed to the physicist product order.
inline FermionSum build_two_body(const MolecularIntegrals& ints, SpinOrdering ordering = SpinOrdering::interleaved) {
  const int m = ints.n_spatial_orbitals();
  FermionSum f(2 * m);
  for (Spin sg : {Spin::alpha, Spin::beta})
    for (Spin tau : {Spin::alpha, Spin::beta})
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          for (int r = 0; r < m; ++r)
            for (int s = 0; s < m; ++s) {
              const double v = ints.two_body(p, q, r, s);
              if (v == 0.0) continue;
              const int ps = spin_orbital(p, sg, m, ordering), qs = spin_orbital(q, sg, m, ordering);
              const int rt = spin_orbital(r, tau, m, ordering), st = spin_orbital(s, tau, m, ordering);
              if (ps == rt || qs == st) continue;
              f.add({cre(ps), cre(rt), ann(st), ann(qs)}, 0.5 * v);
            }
  return f;
}

inline FermionSum build_second_quantized(const MolecularIntegrals& ints,
                                         SpinOrdering ordering = SpinOrdering::interleaved) {
  ints.validate();
  FermionSum f = build_one_body(ints, ordering);
  f += build_two_body(ints, ordering);
  return f;
}

/// Hamiltonian split into the repulsion-free part (one-body + core) and the
/// electron repulsion; H(lambda) = h_one + lambda * h_two.
struct AdiabaticSplit {
  PauliSum h_one;
  PauliSum h_two;
  int n_qubits = 1;

  PauliSum at(double lambda) const { return simplify(h_one + h_two * cplx{lambda, 0.0}); }
  PauliSum full() const { return at(1.0); }
};

inline AdiabaticSplit adiabatic_split(const MolecularIntegrals& ints, Mapping mapping,
                                      SpinOrdering ordering = SpinOrdering::interleaved) {
  ints.validate();
  const int n = ints.n_spin_orbitals();
  FermionMapper mapper(n, mapping);
  AdiabaticSplit split{mapper.map(build_one_body(ints, ordering)), mapper.map(build_two_body(ints, ordering)), n};
  if (!split.h_one.is_hermitian() || !split.h_two.is_hermitian())
    throw Error("adiabatic_split: mapped Hamiltonian is not Hermitian");
  return split;
}

// ---------------------------------------------------------------------------
// Reference determinant

/// Aufbau occupation: electrons fill spatial orbitals from the bottom, alpha
/// before beta within each orbital.
inline std::uint64_t hartree_fock_occupation(int n_electrons, int n_qubits,
                                             SpinOrdering ordering = SpinOrdering::interleaved) {
  if (n_electrons < 0) throw Error("hartree_fock_occupation: negative electron count");
  if (n_electrons > n_qubits) throw Error("hartree_fock_occupation: electron count exceeds modes");
  if (n_qubits % 2 != 0 && ordering == SpinOrdering::blocked)
    throw Error("hartree_fock_occupation: blocked ordering needs an even mode count");
  const int m = n_qubits / 2;
  std::uint64_t occ = 0;
  for (int k = 0; k < n_electrons; ++k) {
    const int mode = ordering == SpinOrdering::interleaved
                         ? k
                         : spin_orbital(k / 2, k % 2 == 0 ? Spin::alpha : Spin::beta, m, ordering);
    occ |= std::uint64_t{1} << mode;
  }
  return occ;
}

inline std::uint64_t hartree_fock_index(int n_electrons, int n_qubits, Mapping mapping,
                                        SpinOrdering ordering = SpinOrdering::interleaved) {
  return occupation_to_basis(hartree_fock_occupation(n_electrons, n_qubits, ordering), n_qubits, mapping);
}

/// Energy of the aufbau determinant straight from the integrals (Slater-Condon).
inline double hartree_fock_energy(const MolecularIntegrals& ints) {
  const int n_alpha = (ints.n_electrons() + 1) / 2, n_beta = ints.n_electrons() / 2;
  std::vector<std::pair<int, int>> occ;  // (spatial, spin)
  for (int i = 0; i < n_alpha; ++i) occ.emplace_back(i, 0);
  for (int i = 0; i < n_beta; ++i) occ.emplace_back(i, 1);
  double e = ints.core_energy;
  for (const auto& [i, si] : occ) e += ints.one_body(i, i);
  for (const auto& [i, si] : occ)
    for (const auto& [j, sj] : occ) {
      e += 0.5 * ints.two_body(i, i, j, j);
      if (si == sj) e -= 0.5 * ints.two_body(i, j, j, i);
    }
  return e;
}

/// Number operator sum_p a+_p a_p, mapped.
inline PauliSum number_operator(int n_modes, Mapping mapping) {
  FermionSum f(n_modes);
  for (int p = 0; p < n_modes; ++p) f.add({cre(p), ann(p)}, 1.0);
  return map_fermions(f, mapping);
}

/// Mask over basis indices whose occupation has the given electron count and
/// 2*S_z. Both encodings keep occupations diagonal, so sectors are index sets.
inline std::vector<char> particle_sector(int n_qubits, int n_electrons, int two_sz, Mapping mapping,
                                         SpinOrdering ordering = SpinOrdering::interleaved) {
  const int m = n_qubits / 2;
  std::uint64_t alpha_modes = 0;
  for (int p = 0; p < m; ++p) alpha_modes |= std::uint64_t{1} << spin_orbital(p, Spin::alpha, m, ordering);
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  std::vector<char> mask(dim, 0);
  for (std::uint64_t b = 0; b < dim; ++b) {
    const std::uint64_t occ = basis_to_occupation(b, n_qubits, mapping);
    const int na = std::popcount(occ & alpha_modes), nb = std::popcount(occ & ~alpha_modes);
    mask[b] = (na + nb == n_electrons && na - nb == two_sz) ? 1 : 0;
  }
  return mask;
}

/// Sector of the aufbau determinant.
inline std::vector<char> hartree_fock_sector(int n_electrons, int n_qubits, Mapping mapping,
                                             SpinOrdering ordering = SpinOrdering::interleaved) {
  return particle_sector(n_qubits, n_electrons, n_electrons % 2, mapping, ordering);
}

}  // namespace gaugekit
