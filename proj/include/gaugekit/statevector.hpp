#pragma once

// Dense statevector kernels. Basis index bit q is qubit q.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "gaugekit/error.hpp"
#include "gaugekit/pauli.hpp"

namespace gaugekit {

inline constexpr int kMaxStateQubits = 16;

class Statevector {
 public:
  explicit Statevector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxStateQubits) throw Error("Statevector: qubit count out of range");
    amp_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
  }
  Statevector(int n_qubits, Eigen::VectorXcd amplitudes) : Statevector(n_qubits) {
    if (amplitudes.size() != amp_.size()) throw Error("Statevector: amplitude count does not match qubit count");
    amp_ = std::move(amplitudes);
  }

  int n_qubits() const { return n_; }
  std::uint64_t dimension() const { return static_cast<std::uint64_t>(amp_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Eigen::VectorXcd& amplitudes() { return amp_; }
  cplx operator[](std::uint64_t i) const { return amp_[static_cast<Eigen::Index>(i)]; }
  cplx& operator[](std::uint64_t i) { return amp_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amp_.norm(); }
  void normalize() {
    const double nrm = norm();
    if (!(nrm > 0.0)) throw Error("Statevector: cannot normalize a zero vector");
    amp_ /= nrm;
  }
  cplx inner(const Statevector& o) const {
    require_same_qubits(n_, o.n_, "Statevector::inner");
    return amp_.dot(o.amp_);  // conjugates *this
  }

 private:
  int n_;
  Eigen::VectorXcd amp_;
};

inline Statevector basis_state(std::uint64_t index, int n_qubits) {
  Statevector s(n_qubits);
  if (index >= s.dimension()) throw Error("basis_state: index out of range");
  s[index] = 1.0;
  return s;
}

namespace detail {

inline double z_sign(std::uint64_t z, std::uint64_t i) { return (std::popcount(z & i) & 1) ? -1.0 : 1.0; }

}  // namespace detail

/// state <- c * P state
inline void apply_pauli_word(Statevector& state, const PauliWord& w, cplx c = 1.0) {
  require_same_qubits(state.n_qubits(), w.n_qubits, "apply_pauli_word");
  auto& a = state.amplitudes();
  const std::uint64_t dim = state.dimension(), x = w.x_mask, z = w.z_mask;
  const cplx base = c * i_power(std::popcount(x & z));
  if (x == 0) {
    if (z == 0) {
      a *= c;
      return;
    }
    for (std::uint64_t i = 0; i < dim; ++i) a[i] *= base * detail::z_sign(z, i);
    return;
  }
  for (std::uint64_t i = 0; i < dim; ++i) {
    const std::uint64_t j = i ^ x;
    if (j < i) continue;
    const cplx ai = a[i], aj = a[j];
    a[j] = base * detail::z_sign(z, i) * ai;
    a[i] = base * detail::z_sign(z, j) * aj;
  }
}

/// state <- exp(-i theta P) state
inline void apply_pauli_exp(Statevector& state, const PauliWord& w, double theta) {
  require_same_qubits(state.n_qubits(), w.n_qubits, "apply_pauli_exp");
  if (theta == 0.0) return;
  auto& a = state.amplitudes();
  const std::uint64_t dim = state.dimension(), x = w.x_mask, z = w.z_mask;
  const double c = std::cos(theta), s = std::sin(theta);
  const cplx ms = cplx{0.0, -s} * i_power(std::popcount(x & z));
  if (x == 0) {
    if (z == 0) {
      a *= cplx{c, -s};
      return;
    }
    const cplx plus = c + ms, minus = c - ms;
    for (std::uint64_t i = 0; i < dim; ++i) a[i] *= (std::popcount(z & i) & 1) ? minus : plus;
    return;
  }
  for (std::uint64_t i = 0; i < dim; ++i) {
    const std::uint64_t j = i ^ x;
    if (j < i) continue;
    const cplx ai = a[i], aj = a[j];
    a[i] = c * ai + ms * detail::z_sign(z, j) * aj;
    a[j] = c * aj + ms * detail::z_sign(z, i) * ai;
  }
}

/// Precomputed terms for repeated H|psi> products.
class CompiledPauliSum {
 public:
  explicit CompiledPauliSum(const PauliSum& h) : n_(h.n_qubits()) {
    if (n_ > kMaxStateQubits) throw Error("CompiledPauliSum: too many qubits for a dense state");
    for (const auto& [w, c] : h) terms_.push_back({w.x_mask, w.z_mask, c * i_power(std::popcount(w.x_mask & w.z_mask))});
  }

  int n_qubits() const { return n_; }

  /// out = H in (out resized and overwritten)
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    const std::uint64_t dim = static_cast<std::uint64_t>(in.size());
    if (dim != (std::uint64_t{1} << n_)) throw Error("CompiledPauliSum: vector size mismatch");
    out.setZero(in.size());
    for (const auto& t : terms_)
      for (std::uint64_t i = 0; i < dim; ++i) out[i ^ t.x] += t.c * detail::z_sign(t.z, i) * in[i];
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const {
    Eigen::VectorXcd out;
    apply(in, out);
    return out;
  }

 private:
  struct Term {
    std::uint64_t x, z;
    cplx c;
  };
  int n_;
  std::vector<Term> terms_;
};

inline Statevector apply_pauli_sum(const PauliSum& h, const Statevector& state) {
  require_same_qubits(state.n_qubits(), h.n_qubits(), "apply_pauli_sum");
  return Statevector(state.n_qubits(), CompiledPauliSum(h).apply(state.amplitudes()));
}

inline cplx expectation_complex(const Statevector& state, const PauliSum& h) {
  require_same_qubits(state.n_qubits(), h.n_qubits(), "expectation");
  const auto& a = state.amplitudes();
  const std::uint64_t dim = state.dimension();
  cplx total = 0.0;
  for (const auto& [w, c] : h) {
    const std::uint64_t x = w.x_mask, z = w.z_mask;
    cplx acc = 0.0;
    for (std::uint64_t i = 0; i < dim; ++i) acc += std::conj(a[i ^ x]) * detail::z_sign(z, i) * a[i];
    total += c * i_power(std::popcount(x & z)) * acc;
  }
  return total;
}

/// <psi|H|psi> for Hermitian H; the imaginary residue must stay below 1e-10
/// relative to the operator one-norm.
inline double expectation(const Statevector& state, const PauliSum& h) {
  if (!h.is_hermitian()) throw Error("expectation: operator is not Hermitian");
  const cplx e = expectation_complex(state, h);
  const double scale = std::max(1.0, h.one_norm()) * std::max(1.0, state.amplitudes().squaredNorm());
  if (std::abs(e.imag()) > 1e-10 * scale) throw Error("expectation: imaginary residue above tolerance");
  return e.real();
}

// Binary amplitude dump: each amplitude as two little-endian IEEE doubles (re, im).

namespace detail {

inline void put_le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

inline double get_le(std::istream& in) {
  std::uint64_t bits = 0;
  if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw Error("read_amplitudes: truncated input");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace detail

inline void write_amplitudes(std::ostream& out, const Statevector& s) {
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    detail::put_le(out, s.amplitudes()[i].real());
    detail::put_le(out, s.amplitudes()[i].imag());
  }
}

inline void write_amplitudes(const std::filesystem::path& path, const Statevector& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_amplitudes(out, s);
}

inline Statevector read_amplitudes(std::istream& in, int n_qubits) {
  Statevector s(n_qubits);
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    const double re = detail::get_le(in);
    s.amplitudes()[i] = cplx{re, detail::get_le(in)};
  }
  return s;
}

}  // namespace gaugekit
