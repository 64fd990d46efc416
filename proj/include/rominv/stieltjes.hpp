#pragma once

#include "rominv/core.hpp"
#include "rominv/rational_fit.hpp"

namespace rominv {

/// Symmetric tridiagonal matrix; beta[i] couples rows i and i+1.
struct Tridiagonal {
  Vec alpha;
  Vec beta;

  int order() const { return static_cast<int>(alpha.size()); }
  Mat dense() const;
};

struct LanczosResult {
  Tridiagonal T;
  Mat X;  // columns are the Lanczos vectors, X.col(0) = eta
};

/// Lanczos with full reorthogonalization; T = X^T E X, X^T X = I.
LanczosResult lanczos_tridiag(const Mat& E, const Vec& eta);

/// Stieltjes continued fraction 1/(kh_1 s + 1/(k_1 + 1/(kh_2 s + ...))).
struct ContinuedFraction {
  Vec kappa;
  Vec kappa_hat;

  int order() const { return static_cast<int>(kappa.size()); }
  /// (log kappa_1..m, log kappa_hat_1..m)
  Vec logs() const;
  static ContinuedFraction from_logs(const Vec& l);
};

/// Coefficient recursion from the tridiagonal matrix and the residue sum.
ContinuedFraction cfrac_from_tridiag(const Tridiagonal& T, double residue_sum);

/// Spectral path: E = -diag(theta), eta_i = sqrt(c_i / sum c).
ContinuedFraction pole_residue_to_cfrac(const PoleResidue& pr);

/// Throws InadmissibleModel unless every coefficient exceeds 1e-14 of the largest.
void require_admissible(const ContinuedFraction& cf);

double eval_cfrac(const ContinuedFraction& cf, double s);

/// Solution w_1..w_m of the three-point scheme with unit boundary flux.
Vec solve_fd_scheme(const ContinuedFraction& cf, double s);

}  // namespace rominv
