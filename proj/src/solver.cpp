#include "hygronet/assembly.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace hygronet {
namespace {

constexpr double kPivotFloor = 1e-11;
constexpr double kRegularization = 1e-10;
constexpr double kRankTol = 1e-9;
constexpr double kResidualTol = 1e-10;

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

SparseMatrix submatrix(const SparseMatrix& K, const std::vector<int>& rows,
                       const std::vector<int>& map_cols, Eigen::Index ncols) {
  // rows: new row -> old row is implied through map_cols of the transpose;
  // K is symmetric, so columns are walked and rows are filtered.
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(K.nonZeros()));
  for (Eigen::Index j = 0; j < K.outerSize(); ++j) {
    const int nj = map_cols[j];
    if (nj < 0) continue;
    for (SparseMatrix::InnerIterator it(K, j); it; ++it) {
      const int ni = rows[it.row()];
      if (ni >= 0) t.emplace_back(ni, nj, it.value());
    }
  }
  SparseMatrix out(ncols, ncols);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

// Pseudo-inverse of a small symmetric matrix; returns the numerical rank.
// Eigenvalues are compared with scale, the size of the uncondensed block, so
// a Schur complement made only of cancellation noise has rank zero.
int pseudo_inverse(const Mat3& S, double scale, Mat3& Sinv) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(S);
  const Vec3 lam = es.eigenvalues();
  Vec3 inv = Vec3::Zero();
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (scale > 0.0 && std::abs(lam[i]) > kRankTol * scale) {
      inv[i] = 1.0 / lam[i];
      ++rank;
    }
  Sinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return rank;
}

// Block solver for [K_FF K_Fm; K_mF K_mm] with static condensation. With
// macro_free = false the macro block is absent.
struct CondensedSolver {
  Ldlt ldlt;
  Eigen::Index nf = 0;
  Eigen::MatrixXd X;  // K_FF^-1 K_Fm
  Mat3 Sinv = Mat3::Zero();
  int rank = 0;
  bool macro_free = true;

  bool factor(const SparseMatrix& KFF, const Eigen::MatrixXd& KFm, bool with_macro,
              const Mat3& Kmm) {
    macro_free = with_macro;
    nf = KFF.rows();
    X.resize(nf, 3);
    if (nf > 0) {
      ldlt.compute(KFF);
      if (ldlt.info() != Eigen::Success) return false;
    }
    if (!with_macro) return true;
    if (nf > 0) X = ldlt.solve(KFm);
    const Mat3 S = nf > 0 ? Mat3(Kmm - KFm.transpose() * X) : Kmm;
    const double scale = Eigen::SelfAdjointEigenSolver<Mat3>(Kmm, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .cwiseAbs()
                             .maxCoeff();
    rank = pseudo_inverse(0.5 * (S + S.transpose()), scale, Sinv);
    return true;
  }

  // x = M^-1 b with b = [b_F; b_m] (b_F alone without the macro block).
  Eigen::VectorXd apply(const Eigen::VectorXd& b, const Eigen::MatrixXd& KFm) const {
    Eigen::VectorXd y = nf > 0 ? Eigen::VectorXd(ldlt.solve(b.head(nf))) : Eigen::VectorXd(0);
    if (!macro_free) return y;
    const Vec3 g = b.tail<3>() - KFm.transpose() * y;
    const Vec3 eps = Sinv * g;
    Eigen::VectorXd x(nf + 3);
    x.head(nf) = y - X * eps;
    x.tail<3>() = eps;
    return x;
  }
};

Eigen::VectorXd mult(const SparseMatrix& KFF, const Eigen::MatrixXd& KFm, const Mat3& Kmm,
                     bool with_macro, const Eigen::VectorXd& x) {
  const Eigen::Index n = KFF.rows();
  Eigen::VectorXd y(x.size());
  if (!with_macro) {
    y = KFF * x;
    return y;
  }
  y.head(n) = KFF * x.head(n) + KFm * x.tail<3>();
  y.tail<3>() = KFm.transpose() * x.head(n) + Kmm * x.tail<3>();
  return y;
}

}  // namespace

SolveResult solve(const LinearSystem& sys, const Mesh& mesh) {
  const Eigen::Index nd = sys.nodal_dofs();
  const Eigen::Index m0 = sys.macro_dof;
  const bool macro_free = sys.load.kind != LoadKind::MacroStrain;

  // Free nodal DOFs after pinning.
  std::vector<int> to_free(static_cast<std::size_t>(sys.size()), -1);
  std::vector<int> free_dofs;
  for (Eigen::Index i = 0; i < nd; ++i)
    if (!sys.pinned[i]) {
      to_free[i] = static_cast<int>(free_dofs.size());
      free_dofs.push_back(static_cast<int>(i));
    }
  const Eigen::Index nf = static_cast<Eigen::Index>(free_dofs.size());

  const SparseMatrix KFF = submatrix(sys.K, to_free, to_free, nf);
  Eigen::MatrixXd KFm(nf, 3);
  for (int j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < nf; ++i) KFm(i, j) = 0.0;
  for (int j = 0; j < 3; ++j)
    for (SparseMatrix::InnerIterator it(sys.K, m0 + j); it; ++it)
      if (it.row() < nd && to_free[it.row()] >= 0) KFm(to_free[it.row()], j) = it.value();
  Mat3 Kmm;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Kmm(i, j) = sys.K.coeff(m0 + i, m0 + j);

  Eigen::VectorXd fF(nf);
  for (Eigen::Index i = 0; i < nf; ++i) fF[i] = sys.f[free_dofs[i]];
  const Vec3 fm = sys.f.segment<3>(m0);

  // Right-hand side of the reduced system.
  Eigen::VectorXd b;
  if (macro_free) {
    b.resize(nf + 3);
    b.head(nf) = fF;
    b.tail<3>() = fm;
  } else {
    b = fF - KFm * sys.load.value;
  }

  SolveResult res;
  res.pinned_dofs = sys.pinned_count();
  Eigen::VectorXd x;

  CondensedSolver direct;
  bool ok = direct.factor(KFF, KFm, macro_free, Kmm);
  if (ok && nf > 0) {
    const Eigen::VectorXd D = direct.ldlt.vectorD();
    const double dmax = D.cwiseAbs().maxCoeff();
    if (!(D.cwiseAbs().minCoeff() > kPivotFloor * dmax)) ok = false;
  }

  if (ok) {
    x = direct.apply(b, KFm);
    res.macro_rank = macro_free ? direct.rank : 3;
  } else {
    // Mechanisms inside a component (fibres joined at a single node). The
    // system is singular but consistent: precondition CG with a slightly
    // stiffened factorization.
    SparseMatrix Kreg = KFF;
    for (Eigen::Index i = 0; i < nf; ++i)
      Kreg.coeffRef(i, i) += kRegularization * std::max(KFF.coeff(i, i), 1e-300);
    CondensedSolver pre;
    if (!pre.factor(Kreg, KFm, macro_free, Kmm)) {
      long dof = -1;
      if (nf > 0) {
        const Eigen::VectorXd D = direct.ldlt.vectorD();
        Eigen::Index i_min = 0;
        D.cwiseAbs().minCoeff(&i_min);
        dof = free_dofs[direct.ldlt.permutationPinv().indices()[i_min]];
      }
      throw SingularSystemError("solve: stiffness could not be factorized", dof);
    }
    res.regularized = true;
    res.macro_rank = macro_free ? pre.rank : 3;
    const double bnorm = b.norm();
    x = pre.apply(b, KFm);
    if (bnorm > 0.0) {
      Eigen::VectorXd r = b - mult(KFF, KFm, Kmm, macro_free, x);
      Eigen::VectorXd z = pre.apply(r, KFm);
      Eigen::VectorXd p = z;
      double rz = r.dot(z);
      for (int it = 0; it < 500 && r.norm() > 1e-14 * bnorm; ++it) {
        const Eigen::VectorXd Ap = mult(KFF, KFm, Kmm, macro_free, p);
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) break;
        const double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        z = pre.apply(r, KFm);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
      }
    }
  }

  // Scatter into the full DOF vector and check the whole active system,
  // pinned rows included.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.size());
  for (Eigen::Index i = 0; i < nf; ++i) u[free_dofs[i]] = x[i];
  u.segment<3>(m0) = macro_free ? Vec3(x.tail<3>()) : sys.load.value;

  const Eigen::VectorXd Ku = sys.K * u;
  Eigen::VectorXd r = Ku - sys.f;
  // Under prescribed strain the macro rows hold the reactions.
  if (!macro_free) r.segment<3>(m0).setZero();
  const double fnorm = std::max(sys.f.norm(), Ku.norm());
  res.residual = fnorm > 0.0 ? r.norm() / fnorm : r.norm();
  if (!(res.residual < kResidualTol)) {
    Eigen::Index worst = 0;
    r.cwiseAbs().maxCoeff(&worst);
    std::ostringstream os;
    os << "solve: relative residual " << res.residual << " exceeds " << kResidualTol
       << " (largest at DOF " << worst << ")";
    throw SingularSystemError(os.str(), static_cast<long>(worst));
  }

  res.eps_bar = u.segment<3>(m0);
  res.fluctuation.assign(mesh.node_count(), Vec2::Zero());
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    const int dof = sys.node_dof[mesh.master(static_cast<int>(n))];
    if (dof >= 0) res.fluctuation[n] = Vec2(u[dof], u[dof + 1]);
  }

  const std::size_t ne = sys.elements.size();
  res.element_strain.assign(ne, Vec3::Zero());
  res.fibre_stress.assign(ne, {});
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& d = sys.elements[e];
    if (d.terms.empty()) continue;
    Vec6 we;
    for (int a = 0; a < 3; ++a) we.segment<2>(2 * a) = res.fluctuation[d.nodes[a]];
    const Vec3 eps = d.B * we + res.eps_bar;
    res.element_strain[e] = eps;
    for (const auto& term : d.terms)
      res.fibre_stress[e].push_back(
          {term.fibre, term.law.D * (eps - term.law.beta * sys.delta_chi)});
  }
  return res;
}

Vec2 SolveResult::displacement(const Mesh& mesh, int node) const {
  const Vec2& x = mesh.nodes()[node];
  const Vec2 affine(eps_bar[0] * x.x() + 0.5 * eps_bar[2] * x.y(),
                    0.5 * eps_bar[2] * x.x() + eps_bar[1] * x.y());
  return affine + fluctuation[node];
}

Eigen::VectorXd dof_vector(const LinearSystem& sys, const SolveResult& res, const Mesh& mesh) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.size());
  for (std::size_t k = 0; k < sys.dof_node.size(); ++k) {
    const int n = sys.dof_node[k];
    u.segment<2>(2 * static_cast<Eigen::Index>(k)) = res.fluctuation[n];
  }
  (void)mesh;
  u.segment<3>(sys.macro_dof) = res.eps_bar;
  return u;
}

double potential_energy(const LinearSystem& sys, const SolveResult& res, const Mesh& mesh) {
  const Eigen::VectorXd u = dof_vector(sys, res, mesh);
  return 0.5 * u.dot(sys.K * u) - u.dot(sys.f);
}

}  // namespace hygronet
