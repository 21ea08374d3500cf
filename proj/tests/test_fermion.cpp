#include <gtest/gtest.h>

#include <iostream>

#include "gaugekit/eigensolver.hpp"
#include "gaugekit/fermion.hpp"
#include "gaugekit/statevector.hpp"
#include "support.hpp"

using namespace gaugekit;
using testing_support::max_abs;

namespace {

const cplx I{0.0, 1.0};

Eigen::VectorXd sorted_spectrum(const PauliSum& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_dense_matrix(h));
  return es.eigenvalues();
}

class BothMappings : public ::testing::TestWithParam<Mapping> {};

}  // namespace

TEST(JordanWigner, LadderImages) {
  const auto a0 = ladder_image(ann(0), 1, Mapping::jordan_wigner);
  EXPECT_EQ(a0, PauliSum::from_strings({{"X", 0.5}, {"Y", 0.5 * I}}));
  const auto a1 = ladder_image(ann(1), 2, Mapping::jordan_wigner);
  EXPECT_EQ(a1, PauliSum::from_strings({{"XZ", 0.5}, {"YZ", 0.5 * I}}));
  FermionSum n0(1);
  n0.add({cre(0), ann(0)}, 1.0);
  EXPECT_EQ(jordan_wigner(n0), PauliSum::from_strings({{"I", 0.5}, {"Z", -0.5}}));
}

TEST(BravyiKitaev, SingleModeMatchesJordanWigner) {
  EXPECT_EQ(ladder_image(ann(0), 1, Mapping::bravyi_kitaev), ladder_image(ann(0), 1, Mapping::jordan_wigner));
  EXPECT_EQ(ladder_image(cre(0), 1, Mapping::bravyi_kitaev), ladder_image(cre(0), 1, Mapping::jordan_wigner));
}

TEST(BravyiKitaev, FenwickSets) {
  // 8 modes, textbook values
  const auto s7 = bk_sets(7, 8);
  EXPECT_EQ(s7.update, 0u);
  EXPECT_EQ(s7.parity, (1u << 6) | (1u << 5) | (1u << 3));
  EXPECT_EQ(s7.flip, (1u << 6) | (1u << 5) | (1u << 3));
  const auto s0 = bk_sets(0, 8);
  EXPECT_EQ(s0.update, (1u << 1) | (1u << 3) | (1u << 7));
  EXPECT_EQ(s0.parity, 0u);
  const auto s4 = bk_sets(4, 8);
  EXPECT_EQ(s4.update, (1u << 5) | (1u << 7));
  EXPECT_EQ(s4.parity, 1u << 3);
  EXPECT_EQ(s4.flip, 0u);
  EXPECT_EQ(s4.remainder, 1u << 3);
}

TEST(BravyiKitaev, MatrixTransformsOccupations) {
  const auto rows = bk_matrix(4);
  EXPECT_EQ(rows, (std::vector<std::uint64_t>{0b0001, 0b0011, 0b0100, 0b1111}));
  for (std::uint64_t occ = 0; occ < 16; ++occ) {
    std::uint64_t b = 0;
    for (int j = 0; j < 4; ++j)
      if (std::popcount(rows[j] & occ) & 1) b |= 1u << j;
    EXPECT_EQ(occupation_to_basis(occ, 4, Mapping::bravyi_kitaev), b);
    EXPECT_EQ(basis_to_occupation(b, 4, Mapping::bravyi_kitaev), occ);
  }
}

TEST_P(BothMappings, CanonicalAnticommutation) {
  const Mapping mapping = GetParam();
  for (int n = 1; n <= 6; ++n) {
    std::vector<Eigen::MatrixXcd> a, ad;
    for (int p = 0; p < n; ++p) {
      a.push_back(to_dense_matrix(ladder_image(ann(p), n, mapping)));
      ad.push_back(to_dense_matrix(ladder_image(cre(p), n, mapping)));
      ASSERT_LT(max_abs(ad.back() - a.back().adjoint()), 1e-15);
    }
    const auto id = Eigen::MatrixXcd::Identity(a[0].rows(), a[0].cols());
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        ASSERT_LT(max_abs(a[p] * a[q] + a[q] * a[p]), 1e-12) << n << ' ' << p << ' ' << q;
        const Eigen::MatrixXcd expected = p == q ? Eigen::MatrixXcd(id) : Eigen::MatrixXcd::Zero(id.rows(), id.cols());
        ASSERT_LT(max_abs(a[p] * ad[q] + ad[q] * a[p] - expected), 1e-12) << n << ' ' << p << ' ' << q;
      }
  }
}

TEST_P(BothMappings, OccupationMatchesNumberOperator) {
  const Mapping mapping = GetParam();
  const int n = 6;
  for (int p = 0; p < n; ++p) {
    FermionSum f(n);
    f.add({cre(p), ann(p)}, 1.0);
    const auto np = map_fermions(f, mapping);
    for (std::uint64_t occ = 0; occ < 64; ++occ) {
      const auto b = occupation_to_basis(occ, n, mapping);
      const double v = expectation(basis_state(b, n), np);
      EXPECT_NEAR(v, (occ >> p) & 1u, 1e-14);
    }
  }
}

TEST_P(BothMappings, HartreeFockEnergyMatchesSlaterCondon) {
  for (const char* mol : {"h2", "lih", "beh2"}) {
    const auto m = load_manifest(testing_support::data_dir() / mol / "manifest.json");
    for (const auto& p : m.points) {
      const auto ints = m.load(p);
      const auto h = adiabatic_split(ints, GetParam()).full();
      EXPECT_TRUE(h.is_hermitian());
      const auto idx = hartree_fock_index(ints.n_electrons(), h.n_qubits(), GetParam());
      EXPECT_NEAR(expectation(basis_state(idx, h.n_qubits()), h), hartree_fock_energy(ints), 1e-10) << p.path;
      const auto number = number_operator(h.n_qubits(), GetParam());
      EXPECT_NEAR(expectation(basis_state(idx, h.n_qubits()), number), ints.n_electrons(), 1e-12);
    }
  }
}

TEST_P(BothMappings, GroundStateMatchesExternalFci) {
  for (const char* mol : {"h2", "lih", "beh2"}) {
    const auto m = load_manifest(testing_support::data_dir() / mol / "manifest.json");
    for (const auto& p : m.points) {
      const auto ints = m.load(p);
      const auto h = adiabatic_split(ints, GetParam()).full();
      const auto sector = hartree_fock_sector(ints.n_electrons(), h.n_qubits(), GetParam());
      const auto gs = dense_ground_state(h, &sector);
      const double ref = m.active_space.empty() ? *p.fci_energy : *p.casci_energy;
      EXPECT_NEAR(gs.energy, ref, 1e-8) << p.path;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Mappings, BothMappings, ::testing::Values(Mapping::jordan_wigner, Mapping::bravyi_kitaev),
                         [](const auto& info) { return to_string(info.param); });

TEST(Hamiltonian, OneOrbitalDiagonal) {
  MolecularIntegrals ints(1, 1);
  ints.set_one_body(0, 0, -0.7);
  ints.core_energy = 0.3;
  const auto f = build_second_quantized(ints);
  EXPECT_EQ(f.size(), 3u);
  const auto h = jordan_wigner(f);
  // 0.3 + (-0.7)(n_0 + n_1) = 0.3 - 0.7 + 0.35 (Z0 + Z1)
  EXPECT_LT(h.max_abs_difference(PauliSum::from_strings({{"II", -0.4}, {"IZ", 0.35}, {"ZI", 0.35}})), 1e-15);
}

TEST(Hamiltonian, SecondQuantizedIsHermitian) {
  const auto ints = testing_support::h2_equilibrium();
  const auto f = build_second_quantized(ints);
  const auto h = jordan_wigner(f);
  const auto hd = jordan_wigner(f.adjoint());
  EXPECT_LT(h.max_abs_difference(hd), 1e-14);
  EXPECT_TRUE(h.is_hermitian());
}

TEST(Hamiltonian, SplitRecoversFullHamiltonian) {
  const auto ints = testing_support::h2_equilibrium();
  for (Mapping mapping : {Mapping::jordan_wigner, Mapping::bravyi_kitaev}) {
    const auto split = adiabatic_split(ints, mapping);
    EXPECT_LT(split.full().max_abs_difference(map_fermions(build_second_quantized(ints), mapping)), 1e-14);
    EXPECT_EQ(split.at(0.0), simplify(split.h_one));
    EXPECT_FALSE(split.h_two.empty());
    EXPECT_TRUE(split.h_two.is_hermitian());
  }
}

TEST(Hamiltonian, H2JordanWignerHasFifteenTerms) {
  const auto h = adiabatic_split(testing_support::h2_equilibrium(), Mapping::jordan_wigner).full();
  EXPECT_EQ(h.n_qubits(), 4);
  EXPECT_EQ(h.size(), 15u);
}

TEST(Hamiltonian, MappingsAreIsospectral) {
  const auto m = testing_support::h2_manifest();
  for (const auto& p : m.points) {
    const auto ints = m.load(p);
    const auto jw = sorted_spectrum(adiabatic_split(ints, Mapping::jordan_wigner).full());
    const auto bk = sorted_spectrum(adiabatic_split(ints, Mapping::bravyi_kitaev).full());
    EXPECT_LT((jw - bk).cwiseAbs().maxCoeff(), 1e-10);
  }
  const auto lih = load_manifest(testing_support::data_dir() / "lih" / "manifest.json");
  const auto ints = lih.load(lih.points.front());  // active space, 6 qubits
  const auto jw = sorted_spectrum(adiabatic_split(ints, Mapping::jordan_wigner).full());
  const auto bk = sorted_spectrum(adiabatic_split(ints, Mapping::bravyi_kitaev).full());
  EXPECT_LT((jw - bk).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Hamiltonian, LocalityDiagnostic) {
  // logged only; the comparison depends on the orbital basis
  const auto lih = load_manifest(testing_support::data_dir() / "lih" / "manifest.json");
  const auto full = parse_fcidump(read_file(lih.points.front().path));
  const double jw = mean_weight(adiabatic_split(full, Mapping::jordan_wigner).full());
  const double bk = mean_weight(adiabatic_split(full, Mapping::bravyi_kitaev).full());
  std::cout << "LiH (12 qubits) mean Pauli weight: jw " << jw << ", bk " << bk << '\n';
  SUCCEED();
}

TEST(HartreeFock, Indices) {
  EXPECT_EQ(hartree_fock_index(2, 4, Mapping::jordan_wigner), 0b0011u);
  EXPECT_EQ(hartree_fock_index(2, 4, Mapping::bravyi_kitaev), 0b0001u);
  EXPECT_EQ(hartree_fock_index(0, 4, Mapping::jordan_wigner), 0u);
  EXPECT_EQ(hartree_fock_index(0, 4, Mapping::bravyi_kitaev), 0u);
  EXPECT_THROW(hartree_fock_index(5, 4, Mapping::jordan_wigner), Error);
  // blocked ordering puts the two electrons of orbital 0 at modes 0 and M
  EXPECT_EQ(hartree_fock_occupation(2, 4, SpinOrdering::blocked), 0b0101u);
}

TEST(HartreeFock, SectorContainsReference) {
  for (Mapping mapping : {Mapping::jordan_wigner, Mapping::bravyi_kitaev}) {
    const auto mask = hartree_fock_sector(2, 4, mapping);
    EXPECT_TRUE(mask[hartree_fock_index(2, 4, mapping)]);
    EXPECT_EQ(std::count(mask.begin(), mask.end(), 1), 4);  // one alpha and one beta among two orbitals
  }
}
