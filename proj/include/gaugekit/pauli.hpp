#pragma once

// Symbolic algebra over n-qubit Pauli operators.
//
// A PauliWord stores one bit per qubit for its X and Z components; qubit p
// carries Y when both bits are set. The matrix of a word is the tensor product
// of its single-qubit factors with qubit 0 the least-significant bit of a basis
// index, i.e. P_{n-1} (x) ... (x) P_0. In terms of masks this is
//     P = i^{|x & z|} X^x Z^z,
// which is what makes products cheap bit arithmetic.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <charconv>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "gaugekit/error.hpp"

namespace gaugekit {

using cplx = std::complex<double>;

inline constexpr int kMaxPauliQubits = 64;
inline constexpr int kMaxDenseQubits = 12;
inline constexpr double kDefaultDropTol = 1e-12;

/// i^k for k taken mod 4.
inline cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline std::uint64_t qubit_mask(int n_qubits) {
  return n_qubits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_qubits) - 1;
}

struct PauliWord {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  int n_qubits = 1;

  PauliWord() = default;
  PauliWord(std::uint64_t x, std::uint64_t z, int n) : x_mask(x), z_mask(z), n_qubits(n) {
    if (n < 1 || n > kMaxPauliQubits) throw Error("PauliWord: qubit count out of range");
    if (((x | z) & ~qubit_mask(n)) != 0) throw Error("PauliWord: mask exceeds qubit count");
  }

  static PauliWord identity(int n) { return {0, 0, n}; }

  static PauliWord single(int n, int qubit, char op) {
    if (qubit < 0 || qubit >= n) throw Error("PauliWord: qubit index out of range");
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    switch (op) {
      case 'I': return {0, 0, n};
      case 'X': return {bit, 0, n};
      case 'Y': return {bit, bit, n};
      case 'Z': return {0, bit, n};
      default: throw Error(std::string("PauliWord: unknown factor '") + op + "'");
    }
  }

  /// Parses a string over {I,X,Y,Z}; the first character is qubit n-1.
  static PauliWord from_string(std::string_view s) {
    const int n = static_cast<int>(s.size());
    if (n < 1 || n > kMaxPauliQubits) throw Error("PauliWord: bad word length");
    std::uint64_t x = 0, z = 0;
    for (int k = 0; k < n; ++k) {
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - k);
      switch (s[k]) {
        case 'I': break;
        case 'X': x |= bit; break;
        case 'Y': x |= bit; z |= bit; break;
        case 'Z': z |= bit; break;
        default: throw Error("PauliWord: unknown factor in '" + std::string(s) + "'");
      }
    }
    return {x, z, n};
  }

  char at(int qubit) const {
    const bool x = (x_mask >> qubit) & 1u, z = (z_mask >> qubit) & 1u;
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  int weight() const { return std::popcount(x_mask | z_mask); }
  int y_count() const { return std::popcount(x_mask & z_mask); }
  bool is_identity() const { return (x_mask | z_mask) == 0; }
  bool is_diagonal() const { return x_mask == 0; }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(n_qubits), 'I');
    for (int q = 0; q < n_qubits; ++q) s[static_cast<std::size_t>(n_qubits - 1 - q)] = at(q);
    return s;
  }

  friend bool operator==(const PauliWord&, const PauliWord&) = default;
  friend bool operator<(const PauliWord& a, const PauliWord& b) {
    return std::tie(a.n_qubits, a.z_mask, a.x_mask) < std::tie(b.n_qubits, b.z_mask, b.x_mask);
  }
};

struct PauliWordHash {
  std::size_t operator()(const PauliWord& w) const noexcept {
    std::uint64_t h = w.x_mask * 0x9E3779B97F4A7C15ull;
    h ^= w.z_mask + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(w.n_qubits));
  }
};

/// A word together with a global phase i^phase.
struct PhasedWord {
  int phase = 0;  // exponent of i, in [0, 4)
  PauliWord word;
};

inline void require_same_qubits(int a, int b, const char* what) {
  if (a != b) throw Error(std::string(what) + ": qubit-count mismatch");
}

/// a*b = i^phase * word, exactly.
inline PhasedWord pauli_mul(const PauliWord& a, const PauliWord& b) {
  require_same_qubits(a.n_qubits, b.n_qubits, "pauli_mul");
  const std::uint64_t x = a.x_mask ^ b.x_mask;
  const std::uint64_t z = a.z_mask ^ b.z_mask;
  // i^{ya} X^xa Z^za i^{yb} X^xb Z^zb = i^{ya+yb} (-1)^{|za & xb|} X^x Z^z
  //                                   = i^{ya+yb+2|za&xb|-y} * word
  const int e = a.y_count() + b.y_count() + 2 * std::popcount(a.z_mask & b.x_mask) -
                std::popcount(x & z);
  return {((e % 4) + 4) % 4, PauliWord{x, z, a.n_qubits}};
}

inline bool commutes(const PauliWord& a, const PauliWord& b) {
  require_same_qubits(a.n_qubits, b.n_qubits, "commutes");
  return ((std::popcount(a.x_mask & b.z_mask) + std::popcount(a.z_mask & b.x_mask)) & 1) == 0;
}

/// Weighted collection of Pauli words over a fixed qubit count. Iteration is
/// lexicographic on (z_mask, x_mask).
class PauliSum {
 public:
  using Terms = std::map<PauliWord, cplx>;

  explicit PauliSum(int n_qubits = 1) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxPauliQubits) throw Error("PauliSum: qubit count out of range");
  }

  static PauliSum identity(int n, cplx c = 1.0) {
    PauliSum s(n);
    s.add(PauliWord::identity(n), c);
    return s;
  }

  static PauliSum from_word(const PauliWord& w, cplx c = 1.0) {
    PauliSum s(w.n_qubits);
    s.add(w, c);
    return s;
  }

  /// Convenience for tests and fixtures: {"XZ", c}, ...
  static PauliSum from_strings(std::initializer_list<std::pair<std::string_view, cplx>> items) {
    if (items.size() == 0) throw Error("PauliSum::from_strings: empty list");
    PauliSum s(static_cast<int>(items.begin()->first.size()));
    for (const auto& [w, c] : items) s.add(PauliWord::from_string(w), c);
    return s;
  }

  int n_qubits() const { return n_qubits_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  /// Accumulates c onto word w. No tolerance is applied; see simplify().
  void add(const PauliWord& w, cplx c) {
    require_same_qubits(w.n_qubits, n_qubits_, "PauliSum::add");
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) it->second += c;
  }

  cplx coefficient(const PauliWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? cplx{} : it->second;
  }

  bool contains(const PauliWord& w) const { return terms_.count(w) != 0; }

  PauliSum& operator+=(const PauliSum& o) {
    require_same_qubits(n_qubits_, o.n_qubits_, "PauliSum::operator+=");
    for (const auto& [w, c] : o.terms_) add(w, c);
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    require_same_qubits(n_qubits_, o.n_qubits_, "PauliSum::operator-=");
    for (const auto& [w, c] : o.terms_) add(w, -c);
    return *this;
  }
  PauliSum& operator*=(cplx s) {
    for (auto& [w, c] : terms_) c *= s;
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

  bool is_hermitian(double tol = 1e-12) const {
    for (const auto& [w, c] : terms_)
      if (std::abs(c.imag()) > tol) return false;
    return true;
  }

  PauliSum adjoint() const {
    PauliSum r(n_qubits_);
    for (const auto& [w, c] : terms_) r.terms_.emplace(w, std::conj(c));
    return r;
  }

  /// Largest absolute coefficient difference against another sum.
  double max_abs_difference(const PauliSum& o) const {
    require_same_qubits(n_qubits_, o.n_qubits_, "PauliSum::max_abs_difference");
    double d = 0.0;
    for (const auto& [w, c] : terms_) d = std::max(d, std::abs(c - o.coefficient(w)));
    for (const auto& [w, c] : o.terms_)
      if (!contains(w)) d = std::max(d, std::abs(c));
    return d;
  }

  double one_norm() const {
    double s = 0.0;
    for (const auto& [w, c] : terms_) s += std::abs(c);
    return s;
  }

  std::vector<PauliWord> words() const {
    std::vector<PauliWord> out;
    out.reserve(terms_.size());
    for (const auto& [w, c] : terms_) out.push_back(w);
    return out;
  }

  friend bool operator==(const PauliSum&, const PauliSum&) = default;

 private:
  int n_qubits_;
  Terms terms_;
};

namespace detail {

using Accumulator = std::unordered_map<PauliWord, cplx, PauliWordHash>;

inline PauliSum collect(int n_qubits, const Accumulator& acc, double drop_tol) {
  std::vector<std::pair<PauliWord, cplx>> items;
  items.reserve(acc.size());
  for (const auto& [w, c] : acc)
    if (std::abs(c) >= drop_tol && c != cplx{}) items.emplace_back(w, c);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  PauliSum out(n_qubits);
  for (const auto& [w, c] : items) out.add(w, c);
  return out;
}

}  // namespace detail

/// Coalesces duplicate words and drops coefficients with magnitude < drop_tol.
inline PauliSum simplify(const PauliSum& s, double drop_tol = kDefaultDropTol) {
  if (drop_tol < 0) throw Error("simplify: negative drop tolerance");
  PauliSum out(s.n_qubits());
  for (const auto& [w, c] : s)
    if (std::abs(c) >= drop_tol && c != cplx{}) out.add(w, c);
  return out;
}

inline PauliSum multiply(const PauliSum& a, const PauliSum& b, double drop_tol = kDefaultDropTol) {
  require_same_qubits(a.n_qubits(), b.n_qubits(), "multiply");
  detail::Accumulator acc;
  acc.reserve(a.size() * b.size());
  for (const auto& [wa, ca] : a)
    for (const auto& [wb, cb] : b) {
      const auto p = pauli_mul(wa, wb);
      acc[p.word] += i_power(p.phase) * ca * cb;
    }
  return detail::collect(a.n_qubits(), acc, drop_tol);
}

inline PauliSum operator*(const PauliSum& a, const PauliSum& b) { return multiply(a, b); }

/// [a, b] = ab - ba. Commuting word pairs contribute nothing; anticommuting
/// pairs contribute 2ab.
inline PauliSum commutator(const PauliSum& a, const PauliSum& b, double drop_tol = kDefaultDropTol) {
  require_same_qubits(a.n_qubits(), b.n_qubits(), "commutator");
  detail::Accumulator acc;
  acc.reserve(a.size() * b.size() / 2 + 1);
  for (const auto& [wa, ca] : a)
    for (const auto& [wb, cb] : b) {
      if (commutes(wa, wb)) continue;
      const auto p = pauli_mul(wa, wb);
      acc[p.word] += 2.0 * i_power(p.phase) * ca * cb;
    }
  return detail::collect(a.n_qubits(), acc, drop_tol);
}

/// Tr[A B] / 2^n through Pauli orthogonality.
inline cplx trace_inner_product(const PauliSum& a, const PauliSum& b) {
  require_same_qubits(a.n_qubits(), b.n_qubits(), "trace_inner_product");
  const PauliSum& small = a.size() <= b.size() ? a : b;
  const PauliSum& large = a.size() <= b.size() ? b : a;
  cplx s{};
  for (const auto& [w, c] : small) {
    auto it = large.terms().find(w);
    if (it != large.terms().end()) s += c * it->second;
  }
  return s;
}

inline PauliSum weight_filter(const PauliSum& s, int max_weight) {
  if (max_weight < 0) throw Error("weight_filter: negative max weight");
  PauliSum out(s.n_qubits());
  for (const auto& [w, c] : s)
    if (w.weight() <= max_weight) out.add(w, c);
  return out;
}

inline double mean_weight(const PauliSum& s) {
  if (s.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [w, c] : s) total += w.weight();
  return total / static_cast<double>(s.size());
}

/// Phase picked up by basis state |index> under word w: P|index> = phase |index ^ x>.
inline cplx word_phase(const PauliWord& w, std::uint64_t index) {
  const int sign = std::popcount(w.z_mask & index) & 1;
  return i_power(w.y_count() + 2 * sign);
}

inline Eigen::MatrixXcd to_dense_matrix(const PauliWord& w) {
  if (w.n_qubits > kMaxDenseQubits) throw Error("to_dense_matrix: qubit count over limit");
  const std::uint64_t dim = std::uint64_t{1} << w.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < dim; ++i)
    m(static_cast<Eigen::Index>(i ^ w.x_mask), static_cast<Eigen::Index>(i)) = word_phase(w, i);
  return m;
}

inline Eigen::MatrixXcd to_dense_matrix(const PauliSum& s) {
  if (s.n_qubits() > kMaxDenseQubits) throw Error("to_dense_matrix: qubit count over limit");
  const std::uint64_t dim = std::uint64_t{1} << s.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [w, c] : s)
    for (std::uint64_t i = 0; i < dim; ++i)
      m(static_cast<Eigen::Index>(i ^ w.x_mask), static_cast<Eigen::Index>(i)) += c * word_phase(w, i);
  return m;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// One term per line: "<re> <im> <word>", word written from qubit n-1 down to 0.
inline std::string to_text(const PauliSum& s) {
  std::string out;
  for (const auto& [w, c] : s) {
    out += format_double(c.real());
    out += ' ';
    out += format_double(c.imag());
    out += ' ';
    out += w.to_string();
    out += '\n';
  }
  return out;
}

/// Inverse of to_text. Blank lines and lines starting with '#' are skipped.
inline PauliSum parse_pauli_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::pair<PauliWord, cplx>> items;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    std::string word;
    if (!(ls >> re >> im >> word)) throw Error("parse_pauli_text: malformed line " + std::to_string(line_no));
    items.emplace_back(PauliWord::from_string(word), cplx{re, im});
  }
  if (items.empty()) throw Error("parse_pauli_text: no terms");
  PauliSum s(items.front().first.n_qubits);
  for (const auto& [w, c] : items) s.add(w, c);
  return s;
}

}  // namespace gaugekit
