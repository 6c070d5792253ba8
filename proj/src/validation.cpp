#include "hygronet/validation.hpp"

#include "hygronet/reference.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace hygronet {
namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false>;  // counter-clockwise

using Clock = std::chrono::steady_clock;

std::string fmt(double v, int prec = 5) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::string pct(double v) { return fmt(100.0 * v, 3) + "%"; }

CriterionResult named(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Network random_network(double coverage_target, double q, std::uint64_t seed, double lf,
                       double wf) {
  GenerationParams p;
  p.cell_size = 1.0;
  p.fibre_length = lf;
  p.fibre_width = wf;
  p.target_coverage = coverage_target;
  p.q = q;
  p.seed = seed;
  return generate_network(p);
}

Network medium_network(std::uint64_t seed) { return random_network(0.9, 0.5, seed, 0.6, 0.06); }

Network full_cover(double theta) {
  Network net;
  Fibre f;
  f.centroid = Vec2(0.5, 0.5);
  f.theta = theta;
  f.length = 3.0;
  f.width = 3.0;
  net.fibres.push_back(f);
  return net;
}

// ---------------------------------------------------------------- criteria

CriterionResult c1() {
  CriterionResult r = named(1, "Parallel strip, LS-XFEM");
  bool ok = true;
  std::ostringstream d;
  const struct {
    int n;
    double stress;
    double area;
  } rows[] = {{10, 1.0043, 0.9957}, {20, 0.9998, 1.0}, {40, 0.9998, 1.0}};
  for (const auto& row : rows) {
    const auto t = checks::strip_row(row.n, false);
    const bool s_ok = rel(t.stress_ratio, row.stress) <= 0.005;
    const bool a_ok = std::abs(t.area_ratio - row.area) <= 0.001;
    const bool time_ok = t.seconds < 10.0;
    ok = ok && s_ok && a_ok && time_ok;
    d << "l/h=" << row.n << " s/s0=" << fmt(t.stress_ratio, 6) << (s_ok ? "" : "(x)")
      << " A/A0=" << fmt(t.area_ratio, 6) << (a_ok ? "" : "(x)") << " " << fmt(t.seconds, 2)
      << "s" << (time_ok ? "" : "(x)") << "; ";
  }
  r.passed = ok;
  r.detail = d.str();
  return r;
}

CriterionResult c2() {
  CriterionResult r = named(2, "Parallel strip, centroid-membership FEM");
  const auto t = checks::strip_row(10, true);
  const bool a_ok = std::abs(t.area_ratio - 0.9302) <= 0.005;
  const bool s_ok = rel(t.stress_ratio, 1.0 / t.area_ratio) <= 0.01;
  r.passed = a_ok && s_ok;
  r.detail = "l/h=10 A/A0=" + fmt(t.area_ratio, 6) + " (0.9302) s/s0=" + fmt(t.stress_ratio, 6) +
             " 1/(A/A0)=" + fmt(1.0 / t.area_ratio, 6);
  return r;
}

CriterionResult c3() {
  CriterionResult r = named(3, "Cross network section A-A vs conforming reference");
  const auto t0 = Clock::now();
  const auto cmp = checks::cross_section_comparison(50, 400, 500);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  r.passed = cmp.max_dev_bond <= 0.20 && cmp.max_dev_other <= 0.05 && cmp.missing == 0 &&
             secs < 120.0;
  r.detail = "max deviation near bond edges " + pct(cmp.max_dev_bond) + " (<=20%), elsewhere " +
             pct(cmp.max_dev_other) + " (<=5%), " + std::to_string(cmp.samples) + " samples, " +
             std::to_string(cmp.missing) + " without value";
  return r;
}

CriterionResult c4() {
  CriterionResult r = named(4, "Cross network effective expansivity vs conforming reference");
  MeshOptions opt;
  opt.n_div = 50;
  const Network net = preset_network(Preset::OrthogonalCross);
  const Vec3 x = effective_expansion(net, opt).normalized();
  const Vec3 ref = reference_expansion(Preset::OrthogonalCross, 400).normalized();
  const double scale = std::max(std::abs(ref[0]), std::abs(ref[1]));
  const double exx = rel(x[0], ref[0]);
  const double eyy = rel(x[1], ref[1]);
  const double exy = std::abs(x[2] - ref[2]) / scale;
  r.passed = exx <= 0.065 && eyy <= 0.065 && exy <= 0.065;
  r.detail = "LS-XFEM (" + fmt(x[0]) + ", " + fmt(x[1]) + ", " + fmt(x[2]) + ") reference (" +
             fmt(ref[0]) + ", " + fmt(ref[1]) + ", " + fmt(ref[2]) + "); deviations " + pct(exx) +
             ", " + pct(eyy) + ", " + pct(exy) + " of max diagonal";
  return r;
}

CriterionResult c5() {
  CriterionResult r = named(5, "Mesh convergence l/50 vs l/200, c=0.9 q=0.5");
  const auto t0 = Clock::now();
  const Network net = medium_network(42);
  // Sizes refer to the base grid; the interface is refined four more times.
  MeshOptions opt;
  opt.levels = 4;
  const auto rows = convergence_study(net, {50, 200}, opt);
  const Vec3 coarse = rows[0].result.normalized();
  const Vec3 fine = rows[1].result.normalized();
  const double scale = std::max(std::abs(fine[0]), std::abs(fine[1]));
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    // Shear is compared on the diagonal scale once it is small.
    const double denom = std::max(std::abs(fine[c]), c == 2 ? 0.1 * scale : 0.0);
    worst = std::max(worst, std::abs(coarse[c] - fine[c]) / denom);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  r.passed = worst <= 0.10 && secs < 600.0;
  r.detail = "l/50 (" + fmt(coarse[0]) + ", " + fmt(coarse[1]) + ", " + fmt(coarse[2]) +
             ") l/200 (" + fmt(fine[0]) + ", " + fmt(fine[1]) + ", " + fmt(fine[2]) +
             "); worst deviation " + pct(worst);
  return r;
}

CriterionResult c6() {
  CriterionResult r = named(6, "Anisotropy over a seed ensemble, c=0.9 q=0.5");
  MeshOptions opt;
  opt.n_div = 100;
  std::vector<double> ratios;
  int skipped = 0;
  for (std::uint64_t seed = 1; ratios.size() < 5 && seed <= 20; ++seed) {
    try {
      const Vec3 b = effective_expansion(medium_network(seed), opt).normalized();
      ratios.push_back(b[1] / b[0]);
    } catch (const DisconnectedStructureError&) {
      ++skipped;
    }
  }
  double mean = 0.0;
  for (double v : ratios) mean += v;
  mean /= std::max<std::size_t>(ratios.size(), 1);
  r.passed = ratios.size() >= 5 && mean > 3.0;
  std::ostringstream d;
  d << "mean byy/bxx = " << fmt(mean) << " over " << ratios.size() << " seeds (";
  for (std::size_t i = 0; i < ratios.size(); ++i) d << (i ? ", " : "") << fmt(ratios[i], 4);
  d << "), " << skipped << " non-percolating realizations skipped";
  r.detail = d.str();
  return r;
}

CriterionResult c7() {
  CriterionResult r = named(7, "Isotropy at scale, c=10 q=0, 200x200");
  const auto t0 = Clock::now();
  const Network net = random_network(10.0, 0.0, 2024, 0.5, 0.02);
  MeshOptions opt;
  opt.n_div = 200;
  const auto e = effective_expansion(net, opt);
  const Vec3 b = e.normalized();
  const double mean = 0.5 * (b[0] + b[1]);
  const double aniso = std::abs(b[0] - b[1]) / mean;
  const double shear = std::abs(b[2]) / mean;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  r.passed = aniso <= 0.10 && shear <= 0.05 && secs < 1800.0;
  r.detail = std::to_string(net.fibres.size()) + " fibres, " + std::to_string(e.nodes) +
             " nodes, beta (" + fmt(b[0]) + ", " + fmt(b[1]) + ", " + fmt(b[2]) +
             "); |xx-yy|/mean " + pct(aniso) + ", |xy|/mean " + pct(shear);
  return r;
}

CriterionResult c8() {
  CriterionResult r = named(8, "Quadrature vs exact polygon clipping");
  const auto q = checks::quadrature_oracle(100, 1.0 / 1024.0, 8);
  const bool max_ok = q.max_error <= 0.002;
  const bool halving_ok = q.max_error_half <= 0.5 * q.max_error;
  r.passed = max_ok && halving_ok;
  r.detail = "max error " + pct(q.max_error) + " (<=0.2%)" + (max_ok ? "" : "(x)") +
             ", at tol/2 " + pct(q.max_error_half) + " (<= half)" + (halving_ok ? "" : "(x)") +
             "; mean " + pct(q.mean_error) + " -> " + pct(q.mean_error_half);
  return r;
}

// Invariant checks: each returns an empty string on success.
std::string inv_symmetry_and_nullspace() {
  const Network net = medium_network(7);
  const PipelineResult run = run_pipeline(net, {.n_div = 30}, 1.0, LoadCase::free_swelling());
  const SparseMatrix& K = run.system.K;
  const SparseMatrix Kt = SparseMatrix(K.transpose());
  const double kmax =
      Eigen::Map<const Eigen::VectorXd>(K.valuePtr(), K.nonZeros()).cwiseAbs().maxCoeff();
  const SparseMatrix diff = K - Kt;
  const double asym =
      diff.nonZeros() > 0
          ? Eigen::Map<const Eigen::VectorXd>(diff.valuePtr(), diff.nonZeros()).cwiseAbs().maxCoeff()
          : 0.0;
  if (asym > 1e-10 * kmax) return "K asymmetry " + fmt(asym / kmax);
  for (const auto& comp : run.system.components)
    for (int dir = 0; dir < 2; ++dir) {
      Eigen::VectorXd t = Eigen::VectorXd::Zero(run.system.size());
      for (int n : comp.nodes) t[run.system.node_dof[n] + dir] = 1.0;
      const double res = (K * t).norm();
      if (res > 1e-9 * kmax * t.norm()) return "translation not in the nullspace: " + fmt(res);
    }
  return {};
}

std::string inv_patch() {
  const Network net = full_cover(0.3);
  const Vec3 eps(1e-3, -2e-3, 5e-4);
  const PipelineResult run = run_pipeline(net, {.n_div = 8}, 0.0, LoadCase::macro_strain(eps));
  const Vec3 exact = constitutive_global(net.materials[0], 0.3).D * eps;
  for (const auto& per : run.solution.fibre_stress)
    for (const auto& fs : per)
      if ((fs.stress - exact).norm() > 1e-10 * exact.norm()) return "patch test stress mismatch";
  return {};
}

std::string inv_linearity() {
  const Network net = medium_network(3);
  const MeshOptions opt{.n_div = 30};
  const PipelineResult a = run_pipeline(net, opt, 1.0, LoadCase::free_swelling());
  const PipelineResult b = run_pipeline(net, opt, 2.0, LoadCase::free_swelling());
  const Eigen::VectorXd ua = dof_vector(a.system, a.solution, a.mesh);
  const Eigen::VectorXd ub = dof_vector(b.system, b.solution, b.mesh);
  if ((ub - 2.0 * ua).norm() > 1e-9 * ub.norm()) return "solution not linear in moisture change";
  return {};
}

std::string inv_rotation() {
  Network net = medium_network(11);
  Network rot = net;
  const double l = net.cell_size;
  for (auto& f : rot.fibres) {
    Vec2 c(l - f.centroid.y(), f.centroid.x());
    if (c.x() >= l) c.x() -= l;
    f.centroid = c;
    f.theta += 0.5 * std::numbers::pi;
  }
  auto solve_union_jack = [](const Network& n) {
    Mesh mesh = build_structured_mesh(n.cell_size, 20);
    std::vector<int> all(mesh.element_count());
    for (std::size_t e = 0; e < all.size(); ++e) all[e] = static_cast<int>(e);
    refine_lepp(mesh, all);
    const FibreIndex index(n);
    ElementCoverage cov = element_coverage(mesh, index);
    const PipelineResult run =
        solve_on(std::move(mesh), std::move(cov), n, 1.0, LoadCase::free_swelling());
    return run.solution.eps_bar;
  };
  const Vec3 a = solve_union_jack(net);
  const Vec3 b = solve_union_jack(rot);
  const Vec3 expect(a[1], a[0], -a[2]);
  if ((b - expect).norm() > 1e-8 * a.norm())
    return "rotated network gives (" + fmt(b[0]) + ", " + fmt(b[1]) + ", " + fmt(b[2]) +
           ") instead of (" + fmt(expect[0]) + ", " + fmt(expect[1]) + ", " + fmt(expect[2]) + ")";
  return {};
}

std::string inv_refinement() {
  const Network net = medium_network(5);
  Mesh mesh = build_structured_mesh(1.0, 20);
  const double angle0 = mesh.min_angle();
  const FibreIndex index(net);
  refine_to_interface(mesh, index, 3);
  mesh.check_invariants();
  if (mesh.min_angle() < 0.5 * angle0 - 1e-12) return "minimum angle dropped below half";
  if (mesh.element_count() <= 800) return "refinement did not add elements";
  return {};
}

std::string inv_energy() {
  // Fibre edges on dyadic grid lines keep the quadrature exact on every
  // level, so the discrete spaces are nested for the same functional.
  const Network net = preset_network(Preset::OrthogonalCross, 0.5);
  double previous = std::numeric_limits<double>::infinity();
  for (int levels = 0; levels <= 3; ++levels) {
    const PipelineResult run =
        run_pipeline(net, {.n_div = 8, .levels = levels}, 1.0, LoadCase::free_swelling());
    const double e = potential_energy(run.system, run.solution, run.mesh);
    if (e > previous + 1e-12 * std::abs(previous))
      return "energy increased at level " + std::to_string(levels);
    previous = e;
  }
  return {};
}

CriterionResult c9() {
  CriterionResult r = named(9, "Invariant suite");
  const std::pair<const char*, std::string (*)()> parts[] = {
      {"symmetry/nullspace", inv_symmetry_and_nullspace},
      {"patch", inv_patch},
      {"linearity", inv_linearity},
      {"rotation", inv_rotation},
      {"refinement", inv_refinement},
      {"energy", inv_energy},
  };
  bool ok = true;
  std::ostringstream d;
  for (const auto& [name, fn] : parts) {
    const auto t0 = Clock::now();
    std::string err;
    try {
      err = fn();
    } catch (const std::exception& e) {
      err = e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (err.empty() && secs >= 60.0) err = "took " + fmt(secs, 3) + " s";
    ok = ok && err.empty();
    d << name << (err.empty() ? " ok" : " FAILED (" + err + ")") << "; ";
  }
  r.passed = ok;
  r.detail = d.str();
  return r;
}

CriterionResult c10() {
  CriterionResult r = named(10, "Fully covered cell");
  const Network net = full_cover(0.0);
  const Vec3 b = effective_expansion(net, {.n_div = 10}).beta;
  const Material& m = net.materials[0];
  const double err = std::max({rel(b[0], m.beta_l), rel(b[1], m.beta_t), std::abs(b[2]) / m.beta_t});
  r.passed = err <= 1e-10;
  r.detail = "beta (" + fmt(b[0], 16) + ", " + fmt(b[1], 16) + ", " + fmt(b[2], 3) +
             "), relative error " + fmt(err, 3);
  return r;
}

}  // namespace

namespace checks {

StripRow strip_row(int n_div, bool centroid_fem) {
  const auto t0 = Clock::now();
  MeshOptions opt;
  opt.n_div = n_div;
  opt.disc = centroid_fem ? Discretization::CentroidFem : Discretization::LsXfem;
  const FieldSnapshot s = uniaxial_case(Preset::ParallelStrip, 1.0, opt);
  StripRow row;
  row.n_div = n_div;
  row.stress_ratio = s.mean_fibre_stress()[0];
  row.area_ratio = s.area_ratio();
  row.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return row;
}

ProfileComparison cross_section_comparison(int coarse_div, int reference_div, int samples) {
  MeshOptions opt;
  opt.n_div = coarse_div;
  const FieldSnapshot coarse = uniaxial_case(Preset::OrthogonalCross, 1.0, opt);
  const FieldSnapshot ref = reference_uniaxial(Preset::OrthogonalCross, reference_div, 1.0);
  // Inside the horizontal fibre, off every grid line of both meshes.
  const double y = 0.10125;
  const Vec2 a(0.0, y);
  const Vec2 b(1.0, y);
  FieldSelector sel;
  sel.fibre = 0;
  const auto pc = sample_cross_section(coarse, a, b, samples, sel);
  const auto pr = sample_cross_section(ref, a, b, samples, sel);
  const double h = 1.0 / coarse_div;
  const double half = 0.5 * 0.43;
  ProfileComparison out;
  out.samples = samples;
  for (int k = 0; k < samples; ++k) {
    if (!pc[k].value || !pr[k].value) {
      ++out.missing;
      continue;
    }
    const double dev = std::abs(*pc[k].value - *pr[k].value) / std::abs(*pr[k].value);
    const double x = pc[k].x.x();
    const bool near_bond = std::abs(x - half) <= h || std::abs(x - (1.0 - half)) <= h;
    double& slot = near_bond ? out.max_dev_bond : out.max_dev_other;
    slot = std::max(slot, dev);
  }
  return out;
}

double clipped_area(const Fibre& f, const Triangle& tri) {
  const double c = std::cos(f.theta);
  const double s = std::sin(f.theta);
  const Vec2 el = 0.5 * f.length * Vec2(c, s);
  const Vec2 et = 0.5 * f.width * Vec2(-s, c);
  const Vec2 corners[4] = {f.centroid - el - et, f.centroid + el - et, f.centroid + el + et,
                           f.centroid - el + et};
  BgPolygon rect;
  BgPolygon t;
  for (const auto& p : corners) bg::append(rect.outer(), BgPoint(p.x(), p.y()));
  bg::append(rect.outer(), BgPoint(corners[0].x(), corners[0].y()));
  for (const auto& p : tri) bg::append(t.outer(), BgPoint(p.x(), p.y()));
  bg::append(t.outer(), BgPoint(tri[0].x(), tri[0].y()));
  bg::correct(rect);
  bg::correct(t);
  std::vector<BgPolygon> parts;
  bg::intersection(rect, t, parts);
  double area = 0.0;
  for (const auto& p : parts) area += bg::area(p);
  return area;
}

QuadratureOracle quadrature_oracle(int pairs, double tol_frac, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  QuadratureOracle out;
  while (out.pairs < pairs) {
    // Triangle of mesh-element size with angles kept away from degeneracy.
    const Vec2 centre(U(rng), U(rng));
    const double radius = 0.01 + 0.04 * U(rng);
    const double base = 2.0 * std::numbers::pi * U(rng);
    Triangle tri;
    for (int k = 0; k < 3; ++k) {
      const double a = base + 2.0 * std::numbers::pi * k / 3.0 + 0.6 * (U(rng) - 0.5);
      tri[k] = centre + radius * Vec2(std::cos(a), std::sin(a));
    }
    // Fibre with default proportions whose edge passes near the triangle.
    Fibre f;
    f.theta = std::numbers::pi * (U(rng) - 0.5);
    f.length = 0.6;
    f.width = 0.06;
    const Vec2 normal(-std::sin(f.theta), std::cos(f.theta));
    const Vec2 axis(std::cos(f.theta), std::sin(f.theta));
    const double offset = 0.5 * f.width + radius * (2.0 * U(rng) - 1.0);
    const double along = f.length * (U(rng) - 0.5);
    f.centroid = centre - offset * normal - along * axis;

    const double exact = clipped_area(f, tri);
    const double area = signed_area(tri);
    if (exact < 0.05 * area || exact > 0.95 * area) continue;
    const double e1 = std::abs(fibre_area_in_triangle(f, tri, tol_frac) - exact) / exact;
    const double e2 = std::abs(fibre_area_in_triangle(f, tri, 0.5 * tol_frac) - exact) / exact;
    out.max_error = std::max(out.max_error, e1);
    out.max_error_half = std::max(out.max_error_half, e2);
    out.mean_error += e1;
    out.mean_error_half += e2;
    ++out.pairs;
  }
  out.mean_error /= pairs;
  out.mean_error_half /= pairs;
  return out;
}

}  // namespace checks

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << r.id << "  " << r.name
     << ": " << r.detail << " (" << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

std::vector<int> quick_criteria() { return {1, 2, 4, 8, 9, 10}; }

CriterionResult run_criterion(int id) {
  static CriterionResult (*const table[])() = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  if (id < 1 || id > 10) throw InputDomainError("unknown criterion " + std::to_string(id));
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = table[id - 1]();
  } catch (const std::exception& e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids,
                                          const std::function<void(const CriterionResult&)>& report) {
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id));
    if (report) report(out.back());
  }
  return out;
}

}  // namespace hygronet
