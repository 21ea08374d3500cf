#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaugekit/fermion.hpp"
#include "gaugekit/pauli.hpp"
#include "gaugekit/report.hpp"
#include "support.hpp"

using namespace gaugekit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(GAUGEKIT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Json parse(const Run& r) { return Json::parse(r.out); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gaugekit_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, MapH2JordanWigner) {
  const auto r = run("map --mapping jw --format text");
  ASSERT_EQ(r.code, 0);
  const auto h = parse_pauli_text(r.out);
  EXPECT_EQ(h.size(), 15u);
  const auto ref = adiabatic_split(testing_support::h2_equilibrium(), Mapping::jordan_wigner).full();
  EXPECT_LT(testing_support::max_abs(to_dense_matrix(h) - to_dense_matrix(ref)), 1e-12);
}

TEST(Cli, MapVerifyAndMissingFile) {
  EXPECT_EQ(run("map --verify --format json").code, 0);
  EXPECT_EQ(run("map --molecule lih --verify --format json").code, 0);
  const auto r = run("map --fcidump /no/such/file.fcidump");
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ConfigErrorsExitOne) {
  EXPECT_EQ(run("evolve --dt -0.1").code, 1);
  EXPECT_EQ(run("evolve --steps 0").code, 1);
  EXPECT_EQ(run("vqe --ansatz nonsense").code, 1);
  EXPECT_EQ(run("sweep --cd-order 9").code, 1);
  EXPECT_EQ(run("map --mapping xx").code, 1);
  EXPECT_EQ(run("map --format yaml").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("evolve --trajectory --format csv").code, 1);
}

TEST(Cli, SweepSingleCellMatchesEvolve) {
  const auto sw = run("sweep --dt-grid 0.1 --n-grid 20 --cd-order 1 --format json");
  ASSERT_EQ(sw.code, 0);
  const auto bare = run("evolve --dt 0.1 --steps 20 --format json");
  const auto cd = run("evolve --dt 0.1 --steps 20 --cd-order 1 --format json");
  ASSERT_EQ(bare.code, 0);
  ASSERT_EQ(cd.code, 0);
  const auto row = parse(sw)["result"]["rows"][0];
  EXPECT_EQ(row["eps_bare"].get<double>(), parse(bare)["result"]["eps"].get<double>());
  EXPECT_EQ(row["eps_cd"].get<double>(), parse(cd)["result"]["eps"].get<double>());
}

TEST(Cli, SweepCsvSchemaAndDeterminism) {
  const auto a = run("sweep --format csv --threads 3");
  const auto b = run("sweep --format csv --threads 1");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  EXPECT_EQ(l1, "# schema=1");
  EXPECT_EQ(l2.rfind("# config={", 0), 0u);
  EXPECT_EQ(l3, "dt,N,T,eps_bare,eps_cd,ratio");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 16);
}

TEST(Cli, JsonRoundTripsByteIdentically) {
  for (const char* args : {"map --format json", "ground-state --format json", "evolve --trajectory --format json",
                           "sweep --dt-grid 0.1,0.2 --n-grid 10 --format json", "vqe --ansatz aga --format json",
                           "adapt --format json", "agp-check --format json"}) {
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << args;
    EXPECT_EQ(parse(r).dump(2) + "\n", r.out) << args;
  }
}

TEST(Cli, VqeAgaReachesChemicalAccuracy) {
  const auto r = run("vqe --ansatz aga --format json --seed 7");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["config"]["seed"].get<int>(), 7);
  EXPECT_EQ(j["result"]["n_parameters"].get<int>(), 2);
  EXPECT_LT(j["result"]["eps"].get<double>(), 1.5936e-3);
  EXPECT_EQ(run("vqe --ansatz aga --format json --seed 7").out, r.out);
}

TEST(Cli, ScanOverFixtureDirectory) {
  const auto dir = (testing_support::data_dir() / "h2").string();
  const auto r = run("scan --dir " + dir + " --ansatze aga,uccsd --format csv");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#' && line.rfind("distance", 0) != 0) ++rows;
  EXPECT_EQ(rows, 12);
}

TEST(Cli, AgpCheckReport) {
  const auto r = run("agp-check --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_TRUE(j["result"]["pass"].get<bool>());
  EXPECT_LT(j["result"]["landau_zener"]["max_residual_action"].get<double>(), 1e-24);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = scratch("outdir");
  fs::remove_all(dir);
  const auto r = run("ground-state --format json", "GAUGEKIT_OUTPUT_DIR=" + dir.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(fs::exists(dir / "ground-state.json"));
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = scratch("run.toml");
  std::ofstream(cfg) << "format = \"json\"\n[evolve]\ndt = 0.2\nsteps = 10\n";
  const auto r = run("--config " + cfg.string() + " evolve --steps 5");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_DOUBLE_EQ(j["result"]["dt"].get<double>(), 0.2);
  EXPECT_EQ(j["result"]["N"].get<int>(), 5);
}
