#include "cli.hpp"

#include "hygronet/io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace hygronet;
using hygronet::testing::TempDir;
using hygronet::testing::make_fibre;
using hygronet::testing::make_network;
using hygronet::testing::slurp;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, GenerateRealisticNetwork) {
  TempDir dir;
  const auto r = run_cli({"generate", "-s", "fibre.length=0.5", "-s", "fibre.width=0.02", "-s",
                          "network.coverage=10", "-s", "network.q=0", "-o", dir.path().string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Network net = read_network(dir / "network.json");
  EXPECT_EQ(net.fibres.size(), 1000u);
  EXPECT_NE(r.out.find("1000 fibres"), std::string::npos);
}

TEST(Cli, InvalidAnisotropyIsAConfigError) {
  TempDir dir;
  const auto r = run_cli({"generate", "-s", "network.q=1", "-o", dir.path().string()});
  EXPECT_EQ(r.code, cli::kConfigError);
  EXPECT_NE(r.err.find("network.q"), std::string::npos) << r.err;
}

TEST(Cli, BadUsage) {
  EXPECT_EQ(run_cli({}).code, cli::kConfigError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kConfigError);
  EXPECT_EQ(run_cli({"validate", "--criterion", "11"}).code, cli::kConfigError);
  EXPECT_EQ(run_cli({"homogenize", "-c", "/nonexistent/run.ini"}).code, cli::kConfigError);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
}

TEST(Cli, HomogenizeFullCover) {
  TempDir dir;
  write_network(dir / "full.json", make_network({make_fibre(0.5, 0.5, 0.0, 3.0, 3.0)}));
  const auto r = run_cli({"homogenize", "-n", (dir / "full.json").string(), "-s", "mesh.n_div=6",
                          "-s", "output.matrix_market=true", "-o", (dir / "out").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = read_json(dir / "out" / "results.json");
  const auto& b = j["effective_expansion"]["beta_normalized"];
  EXPECT_NEAR(b[0].get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(b[1].get<double>(), 20.0, 1e-9);
  EXPECT_NEAR(b[2].get<double>(), 0.0, 1e-10);
  for (const char* f : {"timings.json", "fields.vtk", "deformed.vtk", "K.mtx", "f.mtx"})
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / f)) << f;
}

TEST(Cli, ZeroMoistureChangeGivesZeroTensor) {
  TempDir dir;
  const auto r = run_cli({"homogenize", "-s", "mesh.n_div=20", "-s", "load.delta_chi=0", "-s",
                          "output.vtk=false", "-o", dir.path().string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = read_json(dir / "results.json");
  for (const auto& v : j["effective_expansion"]["beta_normalized"]) EXPECT_EQ(v.get<double>(), 0.0);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  TempDir dir;
  const std::vector<std::string> common{"homogenize", "-s", "mesh.n_div=24", "-s",
                                        "network.seed=5", "-s", "network.q=0.5", "-s",
                                        "output.vtk=false", "-o"};
  auto a = common;
  a.push_back((dir / "a").string());
  auto b = common;
  b.push_back((dir / "b").string());
  ASSERT_EQ(run_cli(a).code, cli::kOk);
  ASSERT_EQ(run_cli(b).code, cli::kOk);
  EXPECT_EQ(slurp(dir / "a" / "results.json"), slurp(dir / "b" / "results.json"));
}

TEST(Cli, DisconnectedNetworkIsASolverError) {
  TempDir dir;
  write_network(dir / "lone.json", make_network({make_fibre(0.5, 0.5, 0.2, 0.3, 0.05)}));
  const auto r = run_cli({"homogenize", "-n", (dir / "lone.json").string(), "-s", "mesh.n_div=20",
                          "-o", dir.path().string()});
  EXPECT_EQ(r.code, cli::kSolverError);
  EXPECT_FALSE(std::filesystem::exists(dir / "results.json"));
}

TEST(Cli, UniaxialWritesProfile) {
  TempDir dir;
  const auto r = run_cli({"uniaxial", "-p", "orthogonal_cross", "-s", "mesh.n_div=20", "-s",
                          "output.profile_samples=40", "-o", dir.path().string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = read_json(dir / "results.json");
  EXPECT_EQ(j["preset"], "orthogonal_cross");
  EXPECT_GT(j["area_ratio"].get<double>(), 0.9);
  const std::string csv = slurp(dir / "profile_A-A.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);

  const auto ref = run_cli({"uniaxial", "--reference", "-s", "mesh.n_div=20", "-o",
                            (dir / "ref").string()});
  ASSERT_EQ(ref.code, cli::kOk) << ref.err;
  const Json k = read_json(dir / "ref" / "results.json");
  EXPECT_EQ(k["solver"], "conforming_reference");
  EXPECT_NEAR(k["area_ratio"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, SweepOverSeeds) {
  TempDir dir;
  const auto r = run_cli({"sweep", "-s", "network.seeds=1,2,3", "-s", "mesh.n_div=20", "-o",
                          dir.path().string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const std::string csv = slurp(dir / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  const Json j = read_json(dir / "sweep.json");
  EXPECT_EQ(j["runs"].size(), 3u);
}

TEST(Cli, ValidateSingleCriterion) {
  const auto r = run_cli({"validate", "--criterion", "10"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out.rfind("PASS", 0), 0u) << r.out;
}
