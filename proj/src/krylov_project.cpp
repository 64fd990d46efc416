#include "rominv/krylov_project.hpp"

#include <cmath>
#include <string>

namespace rominv {

ResolventSet::ResolventSet(const SpMat& A, const NodeFamily& family) {
  SpMat I(A.rows(), A.cols());
  I.setIdentity();
  for (double s : family.nodes) {
    if (s < 0) throw InputError("interpolation nodes must be nonnegative");
    SpMat M = s * I - A;
    M.makeCompressed();
    auto f = std::make_unique<Eigen::SimplicialLDLT<SpMat>>(M);
    if (f->info() != Eigen::Success)
      throw SolverError("factorization of (sI - A) failed at s = " + std::to_string(s));
    factors_.push_back(std::move(f));
  }
}

Vec ResolventSet::solve(int node, const Vec& x) const { return factors_.at(node)->solve(x); }

Mat ResolventSet::solve(int node, const Mat& X) const { return factors_.at(node)->solve(X); }

std::vector<SnapshotColumn> snapshot_layout(const NodeFamily& family) {
  std::vector<SnapshotColumn> cols;
  for (int j = 0; j < static_cast<int>(family.nodes.size()); ++j)
    for (int p = 1; p <= family.multiplicity[j]; ++p) cols.push_back({j, p, 1.0});
  return cols;
}

namespace {

[[noreturn]] void collapse(int m) {
  throw SolverError("Krylov basis collapsed (snapshots numerically dependent); use a smaller m than " +
                    std::to_string(m) + " or Gram-Schmidt orthogonalization");
}

// Upper-triangular U with M = U^T U; throws on a small pivot.
Mat chol_upper(const Mat& M, int m) {
  Eigen::LLT<Mat> llt(M);
  if (llt.info() != Eigen::Success) collapse(m);
  Mat L = llt.matrixL();
  const double tr = M.trace();
  for (int i = 0; i < L.rows(); ++i)
    if (!(L(i, i) * L(i, i) > 1e-13 * tr)) collapse(m);
  return L.transpose();
}

KrylovBasis cholesky_basis(const Vec& b, const std::vector<SnapshotColumn>& layout, const ResolventSet& R) {
  const int m = static_cast<int>(layout.size());
  KrylovBasis kb;
  kb.method = Orthogonalization::cholesky;
  kb.columns = layout;
  kb.K.resize(b.size(), m);
  Vec prev;
  for (int c = 0; c < m; ++c) {
    auto& col = kb.columns[c];
    Vec x = R.solve(col.node, col.power == 1 ? b : prev);
    prev = x;
    const double nrm = x.norm();
    if (!(nrm > 0) || !x.allFinite()) collapse(m);
    col.scale = 1.0 / nrm;
    kb.K.col(c) = x * col.scale;
  }
  // Two Cholesky-QR passes; the second restores orthogonality lost to
  // the squared conditioning of K^T K. The product is the same QR factor.
  const Mat U1 = chol_upper(kb.K.transpose() * kb.K, m);
  const Mat V1 = U1.transpose().triangularView<Eigen::Lower>().solve(kb.K.transpose()).transpose();
  const Mat U2 = chol_upper(V1.transpose() * V1, m);
  kb.V = U2.transpose().triangularView<Eigen::Lower>().solve(V1.transpose()).transpose();
  kb.U = (U2 * U1).triangularView<Eigen::Upper>();
  return kb;
}

KrylovBasis gram_schmidt_basis(const Vec& b, const std::vector<SnapshotColumn>& layout, const ResolventSet& R) {
  const int m = static_cast<int>(layout.size());
  const int n = static_cast<int>(b.size());
  KrylovBasis kb;
  kb.method = Orthogonalization::gram_schmidt;
  kb.columns = layout;
  kb.K.resize(n, m);
  kb.V.resize(n, m);
  kb.U = Mat::Zero(m, m);
  for (int c = 0; c < m; ++c) {
    const auto& col = kb.columns[c];
    const Vec w = R.solve(col.node, col.power == 1 ? b : Vec(kb.V.col(c - 1)));
    kb.K.col(c) = w;
    Vec u = w;
    for (int pass = 0; pass < 2; ++pass) {
      const auto Q = kb.V.leftCols(c);
      u -= Q * (Q.transpose() * u);
    }
    const double nrm = u.norm();
    if (!(nrm > 1e-13 * w.norm())) collapse(m);
    kb.V.col(c) = u / nrm;
    kb.U.col(c).head(c + 1) = kb.V.leftCols(c + 1).transpose() * w;
  }
  return kb;
}

}  // namespace

KrylovBasis build_krylov(const SpMat& A, const Vec& b, const NodeFamily& family, Orthogonalization method,
                         const ResolventSet* resolvents) {
  if (family.order() < 1) throw InputError("empty node family");
  if (family.order() > b.size()) throw InputError("model order exceeds the grid size");
  std::unique_ptr<ResolventSet> own;
  if (!resolvents) {
    own = std::make_unique<ResolventSet>(A, family);
    resolvents = own.get();
  }
  const auto layout = snapshot_layout(family);
  // A power-p column is generated from the previous column of the same node.
  switch (method) {
    case Orthogonalization::cholesky:
      return cholesky_basis(b, layout, *resolvents);
    case Orthogonalization::gram_schmidt:
      return gram_schmidt_basis(b, layout, *resolvents);
    case Orthogonalization::automatic:
      try {
        return cholesky_basis(b, layout, *resolvents);
      } catch (const SolverError&) {
        return gram_schmidt_basis(b, layout, *resolvents);
      }
  }
  throw InputError("unknown orthogonalization");
}

ReducedModel project(const SpMat& A, const Vec& b, const KrylovBasis& basis) {
  ReducedModel rm;
  const Mat AV = A * basis.V;
  rm.Am = basis.V.transpose() * AV;
  rm.Am = 0.5 * (rm.Am + rm.Am.transpose()).eval();
  rm.bm = basis.V.transpose() * b;
  return rm;
}

ReducedSpectrum reduced_spectral(const ReducedModel& model) {
  const int m = static_cast<int>(model.Am.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(model.Am);
  if (es.info() != Eigen::Success) throw SolverError("reduced eigenvalue problem failed");
  ReducedSpectrum out;
  out.pr.theta.resize(m);
  out.pr.c.resize(m);
  out.Z.resize(m, m);
  for (int j = 0; j < m; ++j) {
    const int src = m - 1 - j;  // eigenvalues ascending -> theta ascending
    out.pr.theta[j] = -es.eigenvalues()[src];
    Vec z = es.eigenvectors().col(src);
    if (z[0] < 0) z = -z;
    out.Z.col(j) = z;
    const double bz = model.bm.dot(z);
    out.pr.c[j] = bz * bz;
    if (!(out.pr.theta[j] > 0))
      throw InadmissibleModel("reduced operator is not negative definite",
                              InadmissibleModel::Kind::nonnegative_pole, j);
  }
  return out;
}

RomChain rom_chain(const SpMat& A, const Vec& b, const NodeFamily& family, Orthogonalization method,
                   const ResolventSet* resolvents) {
  RomChain ch;
  ch.basis = build_krylov(A, b, family, method, resolvents);
  ch.rom = project(A, b, ch.basis);
  ch.spectrum = reduced_spectral(ch.rom);
  const PoleResidue& pr = ch.spectrum.pr;
  const double csum = pr.c.sum();
  const Vec eta = (pr.c / csum).array().sqrt();
  ch.lanczos = lanczos_tridiag(Mat((-pr.theta).asDiagonal()), eta);
  ch.cf = cfrac_from_tridiag(ch.lanczos.T, csum);
  require_admissible(ch.cf);
  return ch;
}

Vec preconditioner_R(const SpMat& A, const Vec& b, const NodeFamily& family, Orthogonalization method) {
  return rom_chain(A, b, family, method).cf.logs();
}

Vec preconditioner_R(const Vec& r, const NodeFamily& family, const Grid1D& grid, Orthogonalization method) {
  const auto op = assemble_operator(r, build_difference_1d(grid));
  return preconditioner_R(op.A, source_vector(grid), family, method);
}

}  // namespace rominv
