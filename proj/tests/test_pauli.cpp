#include <gtest/gtest.h>

#include <random>

#include "gaugekit/pauli.hpp"
#include "support.hpp"

using namespace gaugekit;
using testing_support::max_abs;
using testing_support::random_sum;

namespace {

const cplx I{0.0, 1.0};

Eigen::Matrix2cd single_matrix(char c) {
  Eigen::Matrix2cd m;
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -I, I, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity();
  }
  return m;
}

// Kronecker product P_{n-1} (x) ... (x) P_0, built independently of word_phase.
Eigen::MatrixXcd kron_matrix(const PauliWord& w) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = w.n_qubits - 1; q >= 0; --q) {
    const Eigen::Matrix2cd f = single_matrix(w.at(q));
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = m(r, c) * f;
    m = next;
  }
  return m;
}

std::vector<PauliWord> all_words(int n) {
  std::vector<PauliWord> out;
  for (std::uint64_t x = 0; x <= qubit_mask(n); ++x)
    for (std::uint64_t z = 0; z <= qubit_mask(n); ++z) out.emplace_back(x, z, n);
  return out;
}

}  // namespace

TEST(PauliWord, StringRoundTripAndOrdering) {
  const auto w = PauliWord::from_string("XYZI");
  EXPECT_EQ(w.at(3), 'X');
  EXPECT_EQ(w.at(2), 'Y');
  EXPECT_EQ(w.at(1), 'Z');
  EXPECT_EQ(w.at(0), 'I');
  EXPECT_EQ(w.to_string(), "XYZI");
  EXPECT_EQ(w.weight(), 3);
  EXPECT_THROW(PauliWord::from_string("XQ"), Error);
  EXPECT_THROW(PauliWord(4, 0, 2), Error);
}

TEST(PauliWord, SpecProducts) {
  auto p = pauli_mul(PauliWord::from_string("X"), PauliWord::from_string("Y"));
  EXPECT_EQ(p.phase, 1);
  EXPECT_EQ(p.word.to_string(), "Z");
  p = pauli_mul(PauliWord::from_string("XZ"), PauliWord::from_string("YZ"));
  EXPECT_EQ(p.phase, 1);
  EXPECT_EQ(p.word.to_string(), "ZI");
  EXPECT_THROW(pauli_mul(PauliWord::from_string("X"), PauliWord::from_string("XX")), Error);
}

TEST(PauliWord, ProductIsMatrixFaithfulExhaustive) {
  for (int n = 1; n <= 3; ++n) {
    const auto words = all_words(n);
    std::vector<Eigen::MatrixXcd> mats;
    for (const auto& w : words) {
      mats.push_back(kron_matrix(w));
      ASSERT_EQ(max_abs(mats.back() - to_dense_matrix(w)), 0.0) << w.to_string();
    }
    for (std::size_t a = 0; a < words.size(); ++a)
      for (std::size_t b = 0; b < words.size(); ++b) {
        const auto p = pauli_mul(words[a], words[b]);
        const Eigen::MatrixXcd prod = mats[a] * mats[b];
        ASSERT_EQ(max_abs(prod - i_power(p.phase) * kron_matrix(p.word)), 0.0)
            << words[a].to_string() << "*" << words[b].to_string();
        const bool comm = max_abs(prod - mats[b] * mats[a]) == 0.0;
        ASSERT_EQ(commutes(words[a], words[b]), comm);
        const auto c = commutator(PauliSum::from_word(words[a]), PauliSum::from_word(words[b]));
        ASSERT_EQ(max_abs(to_dense_matrix(c) - (prod - mats[b] * mats[a])), 0.0);
      }
  }
}

TEST(PauliWord, ProductAssociative) {
  const auto words = all_words(2);
  for (const auto& a : words)
    for (const auto& b : words)
      for (const auto& c : words) {
        const auto ab = pauli_mul(a, b);
        const auto l = pauli_mul(ab.word, c);
        const auto bc = pauli_mul(b, c);
        const auto r = pauli_mul(a, bc.word);
        ASSERT_EQ(l.word, r.word);
        ASSERT_EQ((ab.phase + l.phase) % 4, (bc.phase + r.phase) % 4);
      }
}

TEST(PauliSum, Commutators) {
  const auto z = PauliSum::from_strings({{"Z", 1.0}});
  const auto x = PauliSum::from_strings({{"X", 1.0}});
  const auto c = commutator(z, x);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.coefficient(PauliWord::from_string("Y")), cplx(0.0, 2.0));
  std::mt19937_64 rng(7);
  const auto a = random_sum(rng, 3, 12, false);
  EXPECT_TRUE(commutator(a, a).empty());
}

TEST(PauliSum, AntisymmetryAndJacobi) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_sum(rng, 3, 10, false);
    const auto b = random_sum(rng, 3, 10, false);
    const auto c = random_sum(rng, 3, 10, false);
    EXPECT_LT(commutator(a, b).max_abs_difference(commutator(b, a) * cplx{-1.0, 0.0}), 1e-14);
    PauliSum jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    EXPECT_LT(jac.one_norm(), 1e-12);
    const Eigen::MatrixXcd ma = to_dense_matrix(a), mb = to_dense_matrix(b);
    EXPECT_LT(max_abs(to_dense_matrix(multiply(a, b)) - ma * mb), 1e-12);
  }
}

TEST(PauliSum, TraceInnerProduct) {
  const auto x = PauliSum::from_strings({{"X", 1.0}});
  const auto z = PauliSum::from_strings({{"Z", 1.0}});
  EXPECT_EQ(trace_inner_product(x, x), cplx(1.0));
  EXPECT_EQ(trace_inner_product(x, z), cplx(0.0));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_sum(rng, 3, 9, false);
    const auto b = random_sum(rng, 3, 9, false);
    const cplx dense = (to_dense_matrix(a) * to_dense_matrix(b)).trace() / 8.0;
    EXPECT_LT(std::abs(trace_inner_product(a, b) - dense), 1e-12);
    const auto h = random_sum(rng, 3, 9, true);
    const cplx hh = trace_inner_product(h, h);
    EXPECT_GE(hh.real(), 0.0);
    EXPECT_EQ(hh.imag(), 0.0);
  }
}

TEST(PauliSum, Simplify) {
  PauliSum s(1);
  s.add(PauliWord::from_string("X"), 1.0);
  s.add(PauliWord::from_string("X"), -1.0);
  EXPECT_TRUE(simplify(s).empty());
  EXPECT_TRUE(simplify(PauliSum::from_strings({{"Z", 1e-15}}), 1e-12).empty());
  PauliSum y(1);
  y.add(PauliWord::from_string("Y"), 2.0);
  y.add(PauliWord::from_string("Y"), 3.0);
  const auto r = simplify(y);
  EXPECT_EQ(r.size(), 1u);
  EXPECT_EQ(r.coefficient(PauliWord::from_string("Y")), cplx(5.0));
  EXPECT_THROW(simplify(s, -1.0), Error);
}

TEST(PauliSum, WeightFilter) {
  const auto s = PauliSum::from_strings({{"XZI", 1.0}, {"XYZ", 2.0}, {"III", 3.0}});
  const auto f = weight_filter(s, 2);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_TRUE(f.contains(PauliWord::from_string("XZI")));
  EXPECT_EQ(weight_filter(s, 3), s);
  const auto id = weight_filter(s, 0);
  ASSERT_EQ(id.size(), 1u);
  EXPECT_TRUE(id.contains(PauliWord::identity(3)));
  std::mt19937_64 rng(5);
  const auto r = random_sum(rng, 4, 30, true);
  for (int w1 = 0; w1 <= 4; ++w1)
    for (int w2 = 0; w2 <= w1; ++w2) EXPECT_EQ(weight_filter(weight_filter(r, w1), w2), weight_filter(r, w2));
  EXPECT_THROW(weight_filter(s, -1), Error);
}

TEST(PauliSum, DenseLowering) {
  const auto z = to_dense_matrix(PauliSum::from_strings({{"Z", 1.0}}));
  EXPECT_EQ(z(0, 0), cplx(1.0));
  EXPECT_EQ(z(1, 1), cplx(-1.0));
  const auto id = to_dense_matrix(PauliSum::identity(2, 2.5));
  EXPECT_EQ(max_abs(id - 2.5 * Eigen::MatrixXcd::Identity(4, 4)), 0.0);
  const auto xx = to_dense_matrix(PauliSum::from_strings({{"XX", 1.0}}));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(xx(r, c), cplx(r + c == 3 ? 1.0 : 0.0));
  std::mt19937_64 rng(9);
  const auto h = random_sum(rng, 4, 20, true);
  const auto m = to_dense_matrix(h);
  EXPECT_LT(max_abs(m - m.adjoint()), 1e-12);
  EXPECT_THROW(to_dense_matrix(PauliSum(13)), Error);
}

TEST(PauliSum, TextRoundTrip) {
  std::mt19937_64 rng(1);
  const auto s = simplify(random_sum(rng, 5, 25, false));
  const auto text = to_text(s);
  EXPECT_EQ(parse_pauli_text(text), s);
  EXPECT_EQ(to_text(parse_pauli_text(text)), text);
  EXPECT_THROW(parse_pauli_text("1.0 zz XX\n"), Error);
}

TEST(PauliSum, DeterministicOrder) {
  const auto s = PauliSum::from_strings({{"ZI", 1.0}, {"XI", 1.0}, {"IZ", 1.0}, {"IX", 1.0}});
  std::vector<std::string> order;
  for (const auto& [w, c] : s) order.push_back(w.to_string());
  EXPECT_EQ(order, (std::vector<std::string>{"IX", "XI", "IZ", "ZI"}));
}
