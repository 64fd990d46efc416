#pragma once

#include "rominv/core.hpp"
#include "rominv/fine_grid.hpp"
#include "rominv/rational_fit.hpp"
#include "rominv/stieltjes.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

namespace rominv {

/// cholesky: QR of the snapshot matrix through chol(K^T K), differentiated
/// analytically. gram_schmidt: same subspace built by orthogonalizing each new
/// resolvent application, stable for strongly collinear snapshots.
/// automatic: cholesky, falling back to gram_schmidt on basis collapse.
enum class Orthogonalization { cholesky, gram_schmidt, automatic };

/// Factorizations of (s_j I - A) for the distinct nodes of a family.
class ResolventSet {
 public:
  ResolventSet(const SpMat& A, const NodeFamily& family);
  Vec solve(int node, const Vec& x) const;
  Mat solve(int node, const Mat& X) const;
  int size() const { return static_cast<int>(factors_.size()); }

 private:
  std::vector<std::unique_ptr<Eigen::SimplicialLDLT<SpMat>>> factors_;
};

/// Snapshot column c is (s_node I - A)^{-power} b scaled by 1/norm.
struct SnapshotColumn {
  int node = 0;
  int power = 1;
  double scale = 1.0;
};

struct KrylovBasis {
  Mat K;  // normalized snapshots (cholesky) or generated vectors (gram_schmidt)
  Mat V;  // orthonormal, K = V U
  Mat U;  // upper triangular
  std::vector<SnapshotColumn> columns;
  Orthogonalization method = Orthogonalization::cholesky;
};

std::vector<SnapshotColumn> snapshot_layout(const NodeFamily& family);

KrylovBasis build_krylov(const SpMat& A, const Vec& b, const NodeFamily& family,
                         Orthogonalization method = Orthogonalization::cholesky,
                         const ResolventSet* resolvents = nullptr);

struct ReducedModel {
  Mat Am;
  Vec bm;
};

ReducedModel project(const SpMat& A, const Vec& b, const KrylovBasis& basis);

/// Eigen-decomposition of the reduced model, sorted by ascending theta.
struct ReducedSpectrum {
  PoleResidue pr;
  Mat Z;  // eigenvectors of A_m, column j belongs to theta_j
};

ReducedSpectrum reduced_spectral(const ReducedModel& model);

/// Everything computed on the way from A to the log coefficients.
struct RomChain {
  KrylovBasis basis;
  ReducedModel rom;
  ReducedSpectrum spectrum;
  LanczosResult lanczos;
  ContinuedFraction cf;
};

RomChain rom_chain(const SpMat& A, const Vec& b, const NodeFamily& family,
                   Orthogonalization method = Orthogonalization::cholesky,
                   const ResolventSet* resolvents = nullptr);

/// Log continued-fraction coefficients (log kappa_1..m, log kappa_hat_1..m).
Vec preconditioner_R(const SpMat& A, const Vec& b, const NodeFamily& family,
                     Orthogonalization method = Orthogonalization::cholesky);
Vec preconditioner_R(const Vec& r, const NodeFamily& family, const Grid1D& grid,
                     Orthogonalization method = Orthogonalization::cholesky);

}  // namespace rominv
