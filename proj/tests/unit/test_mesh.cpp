#include "hygronet/mesh.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace hygronet;
using hygronet::testing::make_fibre;
using hygronet::testing::make_network;

namespace {

// Fan of four triangles r0..r3 around the origin with spokes of growing
// length, so the longest edge of r_i is the spoke shared with r_{i+1} and
// the last spoke lies on the boundary.
Mesh lepp_fan() {
  std::vector<Vec2> nodes{{0.0, 0.0}};
  for (int i = 0; i < 5; ++i) {
    const double r = 1.0 + 0.1 * i;
    const double a = (20.0 * i) * std::numbers::pi / 180.0;
    nodes.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return Mesh::from_triangles(nodes, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}});
}

std::set<std::pair<long, long>> node_keys(const Mesh& m, double scale) {
  std::set<std::pair<long, long>> out;
  for (const Vec2& x : m.nodes())
    out.emplace(std::lround(x.x() * scale), std::lround(x.y() * scale));
  return out;
}

double total_area(const Mesh& m) {
  double a = 0.0;
  for (std::size_t e = 0; e < m.element_count(); ++e) a += m.area(static_cast<int>(e));
  return a;
}

void expect_pairs_match(const Mesh& m) {
  const double l = m.cell_size();
  for (const auto& p : m.periodic_pairs()) {
    const Vec2 d = m.nodes()[p.image] - m.nodes()[p.master];
    const bool ok_x = std::abs(d.x()) < 1e-12 * l || std::abs(d.x() - l) < 1e-12 * l;
    const bool ok_y = std::abs(d.y()) < 1e-12 * l || std::abs(d.y() - l) < 1e-12 * l;
    EXPECT_TRUE(ok_x && ok_y) << "pair " << p.master << " -> " << p.image;
    EXPECT_GT(d.norm(), 0.5 * l);
  }
}

}  // namespace

TEST(StructuredMesh, Counts) {
  EXPECT_EQ(build_structured_mesh(1.0, 20).element_count(), 800u);
  EXPECT_EQ(build_structured_mesh(1.0, 50).element_count(), 5000u);
  const Mesh m = build_structured_mesh(1.0, 2);
  EXPECT_EQ(m.element_count(), 8u);
  EXPECT_EQ(m.node_count(), 9u);
  EXPECT_EQ(m.canonical_node_count(), 4u);
  EXPECT_EQ(m.periodic_pairs().size(), 5u);
  EXPECT_THROW(build_structured_mesh(1.0, 1), InputDomainError);
}

TEST(StructuredMesh, InvariantsAndPeriodicPairs) {
  const Mesh m = build_structured_mesh(2.5, 7);
  EXPECT_TRUE(m.periodic());
  EXPECT_NO_THROW(m.check_invariants());
  EXPECT_NEAR(total_area(m), 2.5 * 2.5, 1e-12);
  EXPECT_NEAR(m.min_angle(), std::numbers::pi / 4.0, 1e-12);
  EXPECT_EQ(m.periodic_pairs().size(), 15u);
  expect_pairs_match(m);
  // Every element has three neighbours once the seams are glued.
  for (std::size_t e = 0; e < m.element_count(); ++e)
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(m.neighbour(static_cast<int>(e), k).has_value());
}

TEST(Lepp, FanPathAndBisectionSequence) {
  Mesh m = lepp_fan();
  EXPECT_EQ(m.lepp(0), (std::vector<int>{0, 1, 2, 3}));
  m.refine_element(0);
  const auto& h = m.history();
  ASSERT_EQ(h.size(), 4u);
  EXPECT_EQ(h[0].roots, (std::vector<int>{3}));
  EXPECT_EQ(h[1].roots, (std::vector<int>{3, 2}));
  EXPECT_EQ(h[2].roots, (std::vector<int>{2, 1}));
  EXPECT_EQ(h[3].roots, (std::vector<int>{1, 0}));
  EXPECT_EQ(m.element_count(), 11u);
  EXPECT_EQ(m.elements()[0].generation, 1);
  EXPECT_NO_THROW(m.check_invariants());
}

TEST(Lepp, SingleBoundaryTriangle) {
  Mesh m = Mesh::from_triangles({{0, 0}, {2, 0}, {0.5, 1}}, {{0, 1, 2}});
  EXPECT_EQ(m.refine_element(0), 1u);
  EXPECT_EQ(m.element_count(), 2u);
  EXPECT_EQ(m.node_count(), 4u);
  EXPECT_TRUE(m.nodes()[3].isApprox(Vec2(1.0, 0.0)));
  EXPECT_NO_THROW(m.check_invariants());
}

TEST(Lepp, ReorientsClockwiseInput) {
  const Mesh m = Mesh::from_triangles({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}});
  EXPECT_GT(m.area(0), 0.0);
  EXPECT_THROW(Mesh::from_triangles({{0, 0}, {1, 1}, {2, 2}}, {{0, 1, 2}}), InputDomainError);
}

TEST(Lepp, LongestEdgeTieGoesToLowestOppositeVertex) {
  const Mesh m =
      Mesh::from_triangles({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}}, {{0, 1, 2}});
  // Edge 1 joins v1 and v2 and is opposite node 0.
  EXPECT_EQ(m.longest_edge(0), 1);
}

TEST(Lepp, UniformRefinementDoublesAndMatchesFinerGrid) {
  Mesh m = build_structured_mesh(1.0, 6);
  const auto all = [](const Mesh& mesh) {
    std::vector<int> ids(mesh.element_count());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    return ids;
  };
  refine_lepp(m, all(m));
  EXPECT_EQ(m.element_count(), 144u);
  m.check_invariants();
  refine_lepp(m, all(m));
  EXPECT_EQ(m.element_count(), 288u);
  m.check_invariants();
  // Two passes put a node at every point of the grid with half the pitch.
  const Mesh fine = build_structured_mesh(1.0, 12);
  EXPECT_EQ(node_keys(m, 1e9), node_keys(fine, 1e9));
  EXPECT_EQ(m.canonical_node_count(), fine.canonical_node_count());
  for (std::size_t e = 0; e < m.element_count(); ++e)
    EXPECT_NEAR(m.area(static_cast<int>(e)), 1.0 / 288.0, 1e-15);
  EXPECT_NEAR(m.min_angle(), std::numbers::pi / 4.0, 1e-12);
  expect_pairs_match(m);
}

TEST(Lepp, RandomRefinementKeepsQualityAndPeriodicity) {
  Mesh m = build_structured_mesh(1.0, 8);
  const double initial = m.min_angle();
  std::mt19937 rng(4);
  for (int pass = 0; pass < 6; ++pass) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(m.element_count()) - 1);
    std::vector<int> marked;
    for (int i = 0; i < 25; ++i) marked.push_back(pick(rng));
    refine_lepp(m, marked);
    ASSERT_NO_THROW(m.check_invariants());
    EXPECT_GE(m.min_angle(), 0.5 * initial - 1e-12);
    EXPECT_NEAR(total_area(m), 1.0, 1e-12);
    expect_pairs_match(m);
  }
}

TEST(Lepp, SeamElementRefinesBothSides) {
  Mesh m = build_structured_mesh(1.0, 4);
  // Element 0 sits in the corner cell; its neighbours cross both seams.
  for (int i = 0; i < 5; ++i) {
    refine_lepp(m, std::vector<int>{0});
    m.check_invariants();
  }
  expect_pairs_match(m);
}

TEST(CheckInvariants, DetectsHangingNode) {
  const Mesh m = Mesh::from_triangles({{0, 0}, {2, 0}, {0, 2}, {1, 1}, {2, 2}},
                                      {{0, 1, 2}, {1, 4, 3}, {3, 4, 2}});
  EXPECT_THROW(m.check_invariants(), InternalConsistencyError);
}

TEST(CheckInvariants, DetectsOverusedEdge) {
  // Three triangles on the edge from node 0 to node 1.
  const auto build = [] {
    const Mesh m = Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}, {0.2, 0.3}, {0.5, -0.5}},
                                        {{0, 1, 2}, {0, 1, 3}, {1, 0, 4}});
    m.check_invariants();
  };
  EXPECT_THROW(build(), InternalConsistencyError);
}

TEST(Classify, InteriorVoidAndInterface) {
  const Network net = make_network({make_fibre(0.5, 0.5, 0.0, 3.0, 0.3)});
  const FibreIndex index(net);
  const Mesh m = build_structured_mesh(1.0, 10);
  const auto cls = classify_elements(m, index);
  int counts[3] = {0, 0, 0};
  for (std::size_t e = 0; e < m.element_count(); ++e) {
    const Triangle t = m.triangle(static_cast<int>(e));
    const double ylo = std::min({t[0].y(), t[1].y(), t[2].y()});
    const double yhi = std::max({t[0].y(), t[1].y(), t[2].y()});
    ElementKind expected = ElementKind::Void;
    if (ylo >= 0.35 - 1e-12 && yhi <= 0.65 + 1e-12) expected = ElementKind::Interior;
    if ((ylo < 0.35 && yhi > 0.35) || (ylo < 0.65 && yhi > 0.65)) expected = ElementKind::Interface;
    EXPECT_EQ(cls[e].kind, expected) << "element " << e;
    counts[static_cast<int>(cls[e].kind)]++;
  }
  EXPECT_EQ(counts[static_cast<int>(ElementKind::Interface)], 40);
}

TEST(Classify, ThinFibreBetweenVerticesIsInterface) {
  // Fibre narrower than the element, passing through the centroid of one
  // element without touching its vertices.
  const Mesh m = build_structured_mesh(1.0, 4);
  const Triangle t = m.triangle(0);
  const Vec2 g = centroid(t);
  const Network net = make_network({make_fibre(g.x(), g.y(), 0.0, 0.05, 0.01)});
  const FibreIndex index(net);
  const auto cls = classify_elements(m, index);
  EXPECT_EQ(cls[0].kind, ElementKind::Interface);
  EXPECT_EQ(cls[0].candidates, (std::vector<int>{0}));
}

TEST(RefineToInterface, ZeroLevelsLeavesMeshUnchanged) {
  const Network net = make_network({make_fibre(0.5, 0.5, 0.3, 0.6, 0.06)});
  const FibreIndex index(net);
  Mesh m = build_structured_mesh(1.0, 10);
  refine_to_interface(m, index, 0);
  EXPECT_EQ(m.element_count(), 200u);
  EXPECT_TRUE(m.history().empty());
  EXPECT_THROW(refine_to_interface(m, index, -1), InputDomainError);
}

TEST(RefineToInterface, TwoLevelsRefineAlongAxisAlignedEdge) {
  const Network net = make_network({make_fibre(0.5, 0.5, 0.0, 3.0, 0.3)});
  const FibreIndex index(net);
  Mesh m = build_structured_mesh(1.0, 10);
  refine_to_interface(m, index, 2);
  m.check_invariants();
  expect_pairs_match(m);
  for (std::size_t e = 0; e < m.element_count(); ++e) {
    const Triangle t = m.triangle(static_cast<int>(e));
    int pos = 0;
    int neg = 0;
    double dmin = 1e9;
    for (const Vec2& x : t) {
      const double phi = periodic_signed_distance(net.fibres[0], x, 1.0);
      pos += phi > 0.0;
      neg += phi < 0.0;
      dmin = std::min(dmin, std::abs(phi));
    }
    if (pos > 0 && neg > 0) {
      EXPECT_GE(m.elements()[e].generation, 2) << "element " << e;
    }
    if (dmin > 0.25) {
      EXPECT_EQ(m.elements()[e].generation, 0) << "element " << e;
    }
  }
}

TEST(RefineToInterface, GenerationCapStopsRefinement) {
  const Network net = make_network({make_fibre(0.5, 0.5, 0.3, 0.6, 0.06)});
  const FibreIndex index(net);
  Mesh m = build_structured_mesh(1.0, 10);
  refine_to_interface(m, index, 5, 2);
  int max_gen = 0;
  for (const auto& el : m.elements()) max_gen = std::max(max_gen, el.generation);
  // Propagation may push a neighbour one step past the cap.
  EXPECT_LE(max_gen, 3);
  m.check_invariants();
}

TEST(RefineToInterface, MediumNetworkNodeCount) {
  GenerationParams p;
  p.q = 0.5;
  p.seed = 42;
  const Network net = generate_network(p);
  const FibreIndex index(net);
  Mesh m = build_structured_mesh(1.0, 100);
  refine_to_interface(m, index, 4);
  m.check_invariants();
  EXPECT_GE(m.min_angle(), std::numbers::pi / 8.0 - 1e-12);
  const double nodes = static_cast<double>(m.node_count());
  EXPECT_NEAR(nodes / 48475.0, 1.0, 0.10) << "nodes " << nodes;
}
