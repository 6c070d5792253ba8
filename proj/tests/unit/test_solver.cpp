#include "hygronet/assembly.hpp"
#include "hygronet/homog.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace hygronet;
using hygronet::testing::make_fibre;
using hygronet::testing::make_network;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Two layers stacked in y: a theta = 0 layer of thickness t_a at the bottom
// and a theta = pi/2 layer of another material filling the rest.
Network laminate(double t_a, const Material& top) {
  Network net = make_network({make_fibre(0.5, 0.5 * t_a, 0.0, 3.0, t_a),
                              make_fibre(0.5, 0.5 * (1.0 + t_a), kHalfPi, 1.0 - t_a, 1.0)});
  net.materials.push_back(top);
  net.fibres[1].material = 1;
  return net;
}

Material top_material() {
  Material m;
  m.E_l = 2.0;
  m.E_t = 0.4;
  m.G_lt = 0.15;
  m.nu_lt = 0.25;
  m.nu_tl = 0.05;
  m.beta_l = 0.5;
  m.beta_t = 8.0;
  return m;
}

// Classical laminate solution: eps_xx shared, sigma_yy and sigma_xy zero in
// each layer, mean sigma_xx zero.
Vec3 laminate_oracle(double f_a, const Material& bottom, const Material& top) {
  const auto A = constitutive_global(bottom, 0.0);
  const auto B = constitutive_global(top, kHalfPi);
  // Unknowns: eps_xx, eps_yy_a, gamma_a, eps_yy_b, gamma_b.
  Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 1> r;
  const auto row = [](const ConstitutiveGlobal& law, int i, int offset) {
    Eigen::Matrix<double, 1, 5> out = Eigen::Matrix<double, 1, 5>::Zero();
    out(0) = law.D(i, 0);
    out(offset) = law.D(i, 1);
    out(offset + 1) = law.D(i, 2);
    return out;
  };
  M.row(0) = row(A, 1, 1);
  r(0) = A.D.row(1).dot(A.beta);
  M.row(1) = row(A, 2, 1);
  r(1) = A.D.row(2).dot(A.beta);
  M.row(2) = row(B, 1, 3);
  r(2) = B.D.row(1).dot(B.beta);
  M.row(3) = row(B, 2, 3);
  r(3) = B.D.row(2).dot(B.beta);
  M.row(4) = f_a * row(A, 0, 1) + (1.0 - f_a) * row(B, 0, 3);
  r(4) = f_a * A.D.row(0).dot(A.beta) + (1.0 - f_a) * B.D.row(0).dot(B.beta);
  const Eigen::Matrix<double, 5, 1> x = M.partialPivLu().solve(r);
  return {x(0), f_a * x(1) + (1.0 - f_a) * x(3), f_a * x(2) + (1.0 - f_a) * x(4)};
}

Network full_cover(double theta) { return make_network({make_fibre(0.5, 0.5, theta, 3.0, 3.0)}); }

Network medium(std::uint64_t seed) {
  GenerationParams p;
  p.q = 0.5;
  p.seed = seed;
  return generate_network(p);
}

}  // namespace

TEST(Laminate, OracleReproducesKnownHalfAndHalf) {
  const Vec3 b = laminate_oracle(0.5, default_material(), default_material());
  EXPECT_NEAR(b[0], 4.8, 1e-12);
  EXPECT_NEAR(b[1], 10.5, 1e-12);
  EXPECT_NEAR(b[2], 0.0, 1e-12);
}

TEST(Laminate, ConformingInterfaceIsExact) {
  for (double t_a : {0.3, 0.5, 0.8}) {
    const Network net = laminate(t_a, top_material());
    const auto run = run_pipeline(net, {.n_div = 10}, 1.0, LoadCase::free_swelling());
    const Vec3 exact = laminate_oracle(t_a, net.materials[0], net.materials[1]);
    EXPECT_LT((run.solution.eps_bar - exact).norm(), 1e-9 * exact.norm()) << "t_a " << t_a;
    EXPECT_EQ(run.solution.macro_rank, 3);
    EXPECT_FALSE(run.solution.regularized);
  }
}

TEST(Laminate, NonConformingInterfaceIsClose) {
  const double t_a = 0.5013;
  const Network net = laminate(t_a, default_material());
  const Vec3 exact = laminate_oracle(t_a, default_material(), default_material());
  for (int n : {10, 40}) {
    const auto run = run_pipeline(net, {.n_div = n}, 1.0, LoadCase::free_swelling());
    EXPECT_NEAR(run.solution.eps_bar[0], exact[0], 0.01 * exact[0]) << "n " << n;
    EXPECT_NEAR(run.solution.eps_bar[1], exact[1], 0.01 * exact[1]) << "n " << n;
    EXPECT_NEAR(run.solution.eps_bar[2], 0.0, 1e-10);
  }
}

TEST(Solve, FullCoverSwellsFreely) {
  const double theta = 0.7;
  const Network net = full_cover(theta);
  const auto run = run_pipeline(net, {.n_div = 8}, 0.02, LoadCase::free_swelling());
  const Vec3 expected = constitutive_global(default_material(), theta).beta * 0.02;
  EXPECT_LT((run.solution.eps_bar - expected).norm(), 1e-10 * expected.norm());
  for (const auto& per : run.solution.fibre_stress)
    for (const auto& fs : per) EXPECT_LT(fs.stress.norm(), 1e-12);
  for (const Vec2& w : run.solution.fluctuation) EXPECT_LT(w.norm(), 1e-12);
}

TEST(Solve, FullCoverUnderMacroStress) {
  const Network net = full_cover(-0.4);
  const Vec3 sigma(0.3, -0.1, 0.05);
  const auto run = run_pipeline(net, {.n_div = 6}, 0.0, LoadCase::macro_stress(sigma));
  const Mat3 D = constitutive_global(default_material(), -0.4).D;
  EXPECT_TRUE(run.solution.eps_bar.isApprox(D.inverse() * sigma, 1e-10));
  for (const auto& per : run.solution.fibre_stress)
    for (const auto& fs : per) EXPECT_TRUE(fs.stress.isApprox(sigma, 1e-10));
}

TEST(Solve, PatchTestUnderPrescribedStrain) {
  const Network net = full_cover(0.3);
  const Vec3 eps(1e-3, -2e-3, 5e-4);
  const auto run = run_pipeline(net, {.n_div = 8, .levels = 1}, 0.0, LoadCase::macro_strain(eps));
  const Vec3 exact = constitutive_global(default_material(), 0.3).D * eps;
  for (std::size_t e = 0; e < run.solution.element_strain.size(); ++e) {
    EXPECT_TRUE(run.solution.element_strain[e].isApprox(eps, 1e-10));
    for (const auto& fs : run.solution.fibre_stress[e]) EXPECT_TRUE(fs.stress.isApprox(exact, 1e-10));
  }
  EXPECT_TRUE(run.solution.eps_bar.isApprox(eps));
}

TEST(Solve, LinearInMoistureChange) {
  const Network net = medium(3);
  const auto a = run_pipeline(net, {.n_div = 30}, 1.0, LoadCase::free_swelling());
  const auto b = run_pipeline(net, {.n_div = 30}, -2.5, LoadCase::free_swelling());
  EXPECT_TRUE(b.solution.eps_bar.isApprox(-2.5 * a.solution.eps_bar, 1e-9));
  const auto z = run_pipeline(net, {.n_div = 30}, 0.0, LoadCase::free_swelling());
  EXPECT_LT(z.solution.eps_bar.norm(), 1e-14);
}

TEST(Solve, SuperposesMacroStresses) {
  const Network net = medium(4);
  const Vec3 s1(1.0, 0.0, 0.0);
  const Vec3 s2(0.0, 0.5, 0.2);
  const auto r1 = run_pipeline(net, {.n_div = 24}, 0.0, LoadCase::macro_stress(s1));
  const auto r2 = run_pipeline(net, {.n_div = 24}, 0.0, LoadCase::macro_stress(s2));
  const auto r12 = run_pipeline(net, {.n_div = 24}, 0.0, LoadCase::macro_stress(s1 + s2));
  EXPECT_TRUE(r12.solution.eps_bar.isApprox(r1.solution.eps_bar + r2.solution.eps_bar, 1e-9));
}

TEST(Solve, SolutionSatisfiesSystemAndMinimizesEnergy) {
  const Network net = medium(5);
  const auto run = run_pipeline(net, {.n_div = 20}, 1.0, LoadCase::free_swelling());
  const auto& sys = run.system;
  const Eigen::VectorXd u = dof_vector(sys, run.solution, run.mesh);
  EXPECT_LT((sys.K * u - sys.f).norm(), 1e-9 * sys.f.norm());
  EXPECT_LT(run.solution.residual, 1e-10);

  const double e0 = potential_energy(sys, run.solution, run.mesh);
  EXPECT_NEAR(e0, 0.5 * u.dot(sys.K * u) - u.dot(sys.f), 1e-12 * std::abs(e0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N(0.0, 1e-3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v = u;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!sys.pinned[i]) v[i] += N(rng);
    EXPECT_GE(0.5 * v.dot(sys.K * v) - v.dot(sys.f), e0);
  }
}

TEST(Solve, TotalDisplacementAddsAffinePart) {
  const Network net = medium(6);
  const auto run = run_pipeline(net, {.n_div = 12}, 1.0, LoadCase::free_swelling());
  const Vec3 e = run.solution.eps_bar;
  for (int n : {0, 5, 77}) {
    const Vec2 x = run.mesh.nodes()[n];
    const Vec2 affine(e[0] * x.x() + 0.5 * e[2] * x.y(), 0.5 * e[2] * x.x() + e[1] * x.y());
    EXPECT_TRUE(run.solution.displacement(run.mesh, n)
                    .isApprox(affine + run.solution.fluctuation[n], 1e-14));
  }
  // Images carry the fluctuation of their master.
  for (const auto& p : run.mesh.periodic_pairs())
    EXPECT_EQ(run.solution.fluctuation[p.image], run.solution.fluctuation[p.master]);
}

TEST(Solve, StripResistsOnlyAxialStrain) {
  const Network strip = preset_network(Preset::ParallelStrip);
  const auto run = run_pipeline(strip, {.n_div = 10}, 1.0, LoadCase::free_swelling());
  EXPECT_EQ(run.solution.macro_rank, 1);
  EXPECT_NEAR(run.solution.eps_bar[0], 1.0, 1e-10);
}

TEST(Solve, UncarriedStressIsSingular) {
  const Network strip = preset_network(Preset::ParallelStrip);
  EXPECT_THROW(run_pipeline(strip, {.n_div = 10}, 0.0, LoadCase::macro_stress({0.0, 1.0, 0.0})),
               SingularSystemError);
  // The axial direction is carried.
  EXPECT_NO_THROW(run_pipeline(strip, {.n_div = 10}, 0.0, LoadCase::macro_stress({1.0, 0.0, 0.0})));
}

TEST(Solve, FloatingFibresDoNotDisturbTheSpanningPart) {
  // Full cover plus nothing else versus strip cross plus an isolated fibre.
  Network cross = preset_network(Preset::OrthogonalCross, 0.3);
  const auto base = run_pipeline(cross, {.n_div = 20}, 1.0, LoadCase::free_swelling());
  cross.fibres.push_back(make_fibre(0.55, 0.55, 0.5, 0.1, 0.05));
  const auto with = run_pipeline(cross, {.n_div = 20}, 1.0, LoadCase::free_swelling());
  ASSERT_EQ(with.system.components.size(), 2u);
  // The lone fibre holds the node nearest the centre, so it is the anchor.
  EXPECT_EQ(with.system.floating_components, 0u);
  EXPECT_EQ(with.system.components[0].wrap_rank + with.system.components[1].wrap_rank, 2);
  EXPECT_TRUE(with.solution.eps_bar.isApprox(base.solution.eps_bar, 1e-10));
}
