#pragma once

#include "rominv/core.hpp"
#include "rominv/fine_grid.hpp"
#include "rominv/krylov_project.hpp"

#include <functional>
#include <vector>

namespace rominv {

// Building blocks of the Jacobian chain. Every derivative is with respect to a
// scalar parameter that perturbs A by -d d^T.

/// dK for the normalized snapshot layout of `basis` (dense N x m).
Mat diff_snapshots(const ResolventSet& R, const Vec& b, const KrylovBasis& basis, const Vec& d);

/// Perturbation of the Cholesky factor L of M for a symmetric perturbation dM.
Mat diff_cholesky(const Mat& L, const Mat& dM);

/// (dK - V dU) U^{-1}. Also valid with every N-row argument premultiplied by
/// the same matrix Y^T (returns Y^T dV).
Mat diff_basis(const Mat& dK, const Mat& V, const Mat& dU, const Mat& U);

struct ReducedDerivative {
  Mat dAm;
  Vec dbm;
};

ReducedDerivative diff_reduced(const SpMat& A, const Mat& V, const Mat& dV, const Vec& d, const Vec& b);

struct SpectralDerivative {
  Vec dtheta;
  Vec dc;
};

SpectralDerivative diff_spectral(const ReducedModel& rom, const ReducedSpectrum& spec, const ReducedDerivative& dr);

/// Tangent derivative of eta_i = sqrt(c_i / sum c).
Vec diff_eta(const Vec& c, const Vec& dc);

struct LanczosDerivative {
  Vec dalpha;  // m
  Vec dbeta;   // m-1
};

/// Perturbation of the tridiagonal entries for E = -diag(theta) and start eta.
/// Q holds the Lanczos vectors as rows in the eigenbasis of E (Q = X^T).
LanczosDerivative diff_lanczos(const Vec& theta, const Tridiagonal& T, const Mat& Q, const Vec& dtheta,
                               const Vec& deta);

struct CfracDerivative {
  Vec dkappa;
  Vec dkappa_hat;
};

CfracDerivative diff_cfrac_recursion(const Tridiagonal& T, const ContinuedFraction& cf, const LanczosDerivative& dl,
                                     double residue_sum, double d_residue_sum);

/// Rows of the Jacobian: continued-fraction logs (default), the logs of the
/// poles and residues (log theta_1..m, log c_1..m), or the raw poles and
/// residues (theta_1..m, c_1..m).
enum class Coordinates { continued_fraction, spectral, spectral_raw };

struct JacobianResult {
  Vec value;  // the mapped vector at r
  Mat J;      // rows: outputs, columns: unknowns of the operator
};

/// Analytic Jacobian with respect to the unknowns r of `op` (1D samples or 2D cells).
JacobianResult assemble_jacobian(const SystemOperator& op, const Vec& b, const NodeFamily& family,
                                 Orthogonalization method = Orthogonalization::cholesky,
                                 Coordinates coords = Coordinates::continued_fraction);

/// Output of the chain at r without derivatives, in the requested coordinates.
Vec chain_value(const RomChain& chain, Coordinates coords);

/// Central finite differences of the same map (testing and diagnostics).
Mat finite_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& r, double rel_step = 1e-6);

}  // namespace rominv
