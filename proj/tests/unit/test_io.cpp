#include "hygronet/io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace hygronet;
using hygronet::testing::TempDir;
using hygronet::testing::slurp;

namespace {

Network sample_network() {
  GenerationParams p;
  p.q = 0.5;
  p.seed = 99;
  p.material.beta_t = 15.0;
  return generate_network(p);
}

int count_lines_equal(const std::string& text, const std::string& value) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += line == value;
  return n;
}

}  // namespace

TEST(Json, NetworkRoundTripIsExact) {
  TempDir dir;
  const Network net = sample_network();
  write_network(dir / "net.json", net);
  const Network back = read_network(dir / "net.json");
  EXPECT_EQ(back, net);
}

TEST(Json, RejectsMalformedNetworks) {
  Json j = to_json(sample_network());
  j["q"] = 1.5;
  EXPECT_THROW(network_from_json(j), InputDomainError);
  Json k = to_json(sample_network());
  k.erase("fibres");
  EXPECT_THROW(network_from_json(k), InputDomainError);
  Json m = to_json(sample_network());
  m["fibres"][0]["length"] = "long";
  EXPECT_THROW(network_from_json(m), InputDomainError);
  TempDir dir;
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(read_network(dir / "bad.json"), InputDomainError);
  EXPECT_THROW(read_network(dir / "missing.json"), InputDomainError);
}

TEST(Json, MaterialRoundTrip) {
  Material m;
  m.E_l = 3.0;
  m.E_t = 0.6;
  m.nu_tl = 0.04;
  EXPECT_EQ(material_from_json(to_json(m)), m);
}

TEST(Json, ExpansionRecordIsDeterministic) {
  const Network net = sample_network();
  const auto a = effective_expansion(net, {.n_div = 20});
  const auto b = effective_expansion(net, {.n_div = 20});
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  const Json j = to_json(a);
  EXPECT_FALSE(j.contains("timings"));
  EXPECT_DOUBLE_EQ(j["beta"]["xx"].get<double>(), a.beta[0]);
}

TEST(Vtk, WritesCoveredCellsOnly) {
  TempDir dir;
  const auto snap = uniaxial_case(Preset::ParallelStrip, 1.0, {.n_div = 10});
  write_vtk(dir / "f.vtk", snap);
  const std::string text = slurp(dir / "f.vtk");
  const std::size_t covered = snap.run.coverage.covered_elements();
  EXPECT_NE(text.find("CELLS " + std::to_string(covered) + " " + std::to_string(4 * covered)),
            std::string::npos);
  EXPECT_NE(text.find("SCALARS stress_xx"), std::string::npos);
  EXPECT_NE(text.find("VECTORS displacement"), std::string::npos);
  EXPECT_EQ(count_lines_equal(text, "5"), static_cast<int>(covered));

  write_vtk(dir / "d.vtk", snap, true);
  EXPECT_NE(slurp(dir / "d.vtk"), text);
}

TEST(MatrixMarket, CoordinateAndArray) {
  TempDir dir;
  SparseMatrix K(3, 3);
  K.insert(0, 0) = 2.0;
  K.insert(1, 2) = -1.5;
  K.insert(2, 1) = -1.5;
  write_matrix_market(dir / "K.mtx", K);
  const std::string k = slurp(dir / "K.mtx");
  EXPECT_EQ(k.rfind("%%MatrixMarket matrix coordinate real general\n3 3 3\n", 0), 0u);
  EXPECT_NE(k.find("2 3 -1.5"), std::string::npos);

  Eigen::VectorXd f(2);
  f << 1.0, 0.25;
  write_matrix_market(dir / "f.mtx", f);
  EXPECT_EQ(slurp(dir / "f.mtx"), "%%MatrixMarket matrix array real general\n2 1\n1\n0.25\n");
}

TEST(Csv, ProfileMarksVoid) {
  TempDir dir;
  std::vector<ProfilePoint> prof(2);
  prof[0] = {0.25, Vec2(0.25, 0.1), 1.5};
  prof[1] = {0.75, Vec2(0.75, 0.1), std::nullopt};
  write_profile_csv(dir / "p.csv", prof);
  EXPECT_EQ(slurp(dir / "p.csv"), "s,x,y,value\n0.25,0.25,0.10000000000000001,1.5\n"
                                  "0.75,0.75,0.10000000000000001,nan\n");
}

TEST(Csv, ConvergenceRows) {
  TempDir dir;
  ConvergenceRow r;
  r.n_div = 10;
  r.h = 0.1;
  r.result.beta = Vec3(1.0, 2.0, 0.0);
  r.result.nodes = 121;
  r.result.elements = 200;
  write_convergence_csv(dir / "c.csv", {r});
  const std::string text = slurp(dir / "c.csv");
  EXPECT_EQ(text.rfind("n_div,h,beta_xx,beta_yy,beta_xy,nodes,elements\n10,", 0), 0u);
}
