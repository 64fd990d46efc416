#include "rominv/stieltjes.hpp"

#include <cmath>
#include <string>

namespace rominv {

Mat Tridiagonal::dense() const {
  const int m = order();
  Mat T = alpha.asDiagonal();
  for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
  return T;
}

LanczosResult lanczos_tridiag(const Mat& E, const Vec& eta) {
  const int m = static_cast<int>(eta.size());
  if (m < 1 || E.rows() != m || E.cols() != m) throw InputError("lanczos: size mismatch");
  if (std::abs(eta.norm() - 1.0) > 1e-10) throw InputError("lanczos: start vector must have unit norm");
  const double scale = E.norm();
  LanczosResult out;
  out.X = Mat::Zero(m, m);
  out.T.alpha = Vec::Zero(m);
  out.T.beta = Vec::Zero(std::max(m - 1, 0));
  out.X.col(0) = eta;
  for (int j = 0; j < m; ++j) {
    const Vec Ex = E * out.X.col(j);
    out.T.alpha[j] = out.X.col(j).dot(Ex);
    if (j == m - 1) break;
    Vec u = Ex - out.T.alpha[j] * out.X.col(j);
    if (j > 0) u -= out.T.beta[j - 1] * out.X.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const auto Xj = out.X.leftCols(j + 1);
      u -= Xj * (Xj.transpose() * u);
    }
    const double b = u.norm();
    if (!(b > 1e-14 * scale))
      throw InadmissibleModel("Lanczos breakdown at step " + std::to_string(j + 1),
                              InadmissibleModel::Kind::breakdown, j);
    out.T.beta[j] = b;
    out.X.col(j + 1) = u / b;
  }
  return out;
}

Vec ContinuedFraction::logs() const {
  const int m = order();
  Vec l(2 * m);
  l.head(m) = kappa.array().log();
  l.tail(m) = kappa_hat.array().log();
  return l;
}

ContinuedFraction ContinuedFraction::from_logs(const Vec& l) {
  const int m = static_cast<int>(l.size()) / 2;
  return {l.head(m).array().exp(), l.tail(m).array().exp()};
}

ContinuedFraction cfrac_from_tridiag(const Tridiagonal& T, double residue_sum) {
  const int m = T.order();
  ContinuedFraction cf{Vec(m), Vec(m)};
  cf.kappa_hat[0] = 1.0 / residue_sum;
  cf.kappa[0] = -1.0 / (cf.kappa_hat[0] * T.alpha[0]);
  for (int j = 1; j < m; ++j) {
    const double kp = cf.kappa[j - 1], b = T.beta[j - 1];
    cf.kappa_hat[j] = 1.0 / (kp * kp * b * b * cf.kappa_hat[j - 1]);
    cf.kappa[j] = -1.0 / (T.alpha[j] * cf.kappa_hat[j] + 1.0 / kp);
  }
  return cf;
}

void require_admissible(const ContinuedFraction& cf) {
  const double big = std::max(cf.kappa.cwiseAbs().maxCoeff(), cf.kappa_hat.cwiseAbs().maxCoeff());
  const double floor = 1e-14 * big;
  for (int j = 0; j < cf.order(); ++j) {
    if (!(cf.kappa[j] > floor) || !std::isfinite(cf.kappa[j]))
      throw InadmissibleModel("nonpositive kappa", InadmissibleModel::Kind::coefficient, j);
    if (!(cf.kappa_hat[j] > floor) || !std::isfinite(cf.kappa_hat[j]))
      throw InadmissibleModel("nonpositive kappa_hat", InadmissibleModel::Kind::coefficient, cf.order() + j);
  }
}

ContinuedFraction pole_residue_to_cfrac(const PoleResidue& pr) {
  const int m = pr.order();
  for (int j = 0; j < m; ++j)
    if (!(pr.c[j] > 0)) throw InadmissibleModel("nonpositive residue", InadmissibleModel::Kind::residue, j);
  const double csum = pr.c.sum();
  const Vec eta = (pr.c / csum).array().sqrt();
  const Mat E = (-pr.theta).asDiagonal();
  const LanczosResult lz = lanczos_tridiag(E, eta);
  ContinuedFraction cf = cfrac_from_tridiag(lz.T, csum);
  require_admissible(cf);
  return cf;
}

double eval_cfrac(const ContinuedFraction& cf, double s) {
  const int m = cf.order();
  double v = 1.0 / (cf.kappa_hat[m - 1] * s + 1.0 / cf.kappa[m - 1]);
  for (int j = m - 2; j >= 0; --j) v = 1.0 / (cf.kappa_hat[j] * s + 1.0 / (cf.kappa[j] + v));
  return v;
}

Vec solve_fd_scheme(const ContinuedFraction& cf, double s) {
  const int m = cf.order();
  // Rows scaled by kappa_hat_j: symmetric negative definite tridiagonal system.
  Vec diag(m), off(std::max(m - 1, 0)), rhs = Vec::Zero(m);
  for (int j = 0; j < m; ++j) {
    diag[j] = -1.0 / cf.kappa[j] - s * cf.kappa_hat[j];
    if (j > 0) diag[j] -= 1.0 / cf.kappa[j - 1];
    if (j + 1 < m) off[j] = 1.0 / cf.kappa[j];
  }
  rhs[0] = -1.0;
  // Thomas elimination.
  Vec c(m), d(m);
  for (int j = 0; j < m; ++j) {
    double den = diag[j] - (j > 0 ? off[j - 1] * c[j - 1] : 0.0);
    if (den == 0.0) throw SolverError("singular three-point scheme");
    c[j] = j + 1 < m ? off[j] / den : 0.0;
    d[j] = (rhs[j] - (j > 0 ? off[j - 1] * d[j - 1] : 0.0)) / den;
  }
  Vec w(m);
  w[m - 1] = d[m - 1];
  for (int j = m - 2; j >= 0; --j) w[j] = d[j] - c[j] * w[j + 1];
  return w;
}

}  // namespace rominv
