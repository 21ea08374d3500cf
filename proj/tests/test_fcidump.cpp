#include <gtest/gtest.h>

#include "gaugekit/fcidump.hpp"
#include "gaugekit/fermion.hpp"
#include "gaugekit/manifest.hpp"
#include "support.hpp"

using namespace gaugekit;

namespace {

const char* kTiny = R"( &FCI NORB=2,NELEC=2,MS2=0,
  ORBSYM=1,1,
  ISYM=1,
 &END
  0.5 1 1 1 1
  0.25 1 1 2 2
  0.125D0 2 1 2 1
  -1.0 1 1 0 0
  0.1 2 1 0 0
  -0.5 2 2 0 0
  -0.9 1 0 0 0
  0.713776 0 0 0 0
)";

}  // namespace

TEST(Fcidump, HeaderAndEntries) {
  const auto ints = parse_fcidump(std::string(kTiny));
  EXPECT_EQ(ints.n_spatial_orbitals(), 2);
  EXPECT_EQ(ints.n_electrons(), 2);
  EXPECT_DOUBLE_EQ(ints.core_energy, 0.713776);
  EXPECT_DOUBLE_EQ(ints.one_body(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(ints.one_body(1, 0), 0.1);
  EXPECT_DOUBLE_EQ(ints.two_body(0, 0, 1, 1), 0.25);
  EXPECT_DOUBLE_EQ(ints.two_body(1, 1, 0, 0), 0.25);
  for (const auto& [a, b, c, d] : MolecularIntegrals::images(1, 0, 1, 0))
    EXPECT_DOUBLE_EQ(ints.two_body(a, b, c, d), 0.125);
  EXPECT_DOUBLE_EQ(ints.two_body(0, 1, 1, 0), 0.125);
}

TEST(Fcidump, WriteParseRoundTrip) {
  const auto ints = parse_fcidump(std::string(kTiny));
  const auto again = parse_fcidump(write_fcidump(ints));
  EXPECT_EQ(write_fcidump(again), write_fcidump(ints));
}

TEST(Fcidump, Errors) {
  EXPECT_THROW(parse_fcidump(std::string("no header here\n")), Error);
  EXPECT_THROW(parse_fcidump(std::string(" &FCI NELEC=2 &END\n")), Error);
  EXPECT_THROW(parse_fcidump(std::string(" &FCI NORB=2,NELEC=2 &END\n 1.0 3 1 0 0\n")), Error);
  EXPECT_THROW(parse_fcidump(std::string(" &FCI NORB=2,NELEC=2 &END\n 1.0 1 1 2 2\n 1.5 2 2 1 1\n")), Error);
  // consistent duplicate is accepted
  EXPECT_NO_THROW(parse_fcidump(std::string(" &FCI NORB=2,NELEC=2 &END\n 1.0 1 1 2 2\n 1.0 2 2 1 1\n")));
  try {
    parse_fcidump(std::string(" &FCI NORB=2,NELEC=2 &END\n 1.0 1 1 0 0\n garbage\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
  }
  EXPECT_THROW(load_fcidump("/nonexistent/file.fcidump"), Error);
}

TEST(Fcidump, BundledManifestsVerify) {
  for (const char* mol : {"h2", "lih", "beh2"}) {
    const auto m = load_manifest(testing_support::data_dir() / mol / "manifest.json");
    for (const auto& p : m.points) {
      const auto ints = m.load(p);
      ASSERT_TRUE(ints.bond_distance.has_value());
      EXPECT_DOUBLE_EQ(*ints.bond_distance, p.distance);
      ASSERT_TRUE(p.hf_energy.has_value());
      // HF energy survives the active-space fold exactly when only docc/virtual orbitals leave.
      EXPECT_NEAR(hartree_fock_energy(ints), *p.hf_energy, 1e-9) << p.path;
    }
  }
}

TEST(Fcidump, ChecksumMismatchIsRejected) {
  auto m = testing_support::h2_manifest();
  auto p = m.points.front();
  p.sha256 = std::string(64, '0');
  EXPECT_THROW(m.load(p), Error);
  EXPECT_NO_THROW(m.load(p, false));
}

TEST(ActiveSpace, FrozenCoreKeepsDeterminantEnergy) {
  const auto m = load_manifest(testing_support::data_dir() / "lih" / "manifest.json");
  const auto full = parse_fcidump(read_file(m.points.front().path));
  const auto frozen = apply_active_space(full, {{0}, {}});
  EXPECT_EQ(frozen.n_spatial_orbitals(), full.n_spatial_orbitals() - 1);
  EXPECT_EQ(frozen.n_electrons(), full.n_electrons() - 2);
  EXPECT_NEAR(hartree_fock_energy(frozen), hartree_fock_energy(full), 1e-10);
  EXPECT_THROW(apply_active_space(full, {{2}, {}}), Error);  // orbital 2 is empty
  EXPECT_THROW(apply_active_space(full, {{}, {0}}), Error);   // occupied orbital cannot be dropped
  EXPECT_THROW(apply_active_space(full, {{}, {99}}), Error);
}
