#include "rominv/sensitivity.hpp"

#include <cmath>
#include <string>

namespace rominv {

Mat diff_snapshots(const ResolventSet& R, const Vec& b, const KrylovBasis& basis, const Vec& d) {
  if (basis.method != Orthogonalization::cholesky)
    throw InputError("diff_snapshots applies to the Cholesky snapshot layout");
  const int m = static_cast<int>(basis.columns.size());
  Mat dK(b.size(), m);
  for (int c = 0; c < m; ++c) {
    const auto& col = basis.columns[c];
    // d(R^p b) = -sum_{l=1}^{p} R^l d (d^T R^{p-l+1} b)
    std::vector<Vec> Rd{d}, Rb{b};
    for (int l = 1; l <= col.power; ++l) {
      Rd.push_back(R.solve(col.node, Rd.back()));
      Rb.push_back(R.solve(col.node, Rb.back()));
    }
    Vec acc = Vec::Zero(b.size());
    for (int l = 1; l <= col.power; ++l) acc -= Rd[l] * d.dot(Rb[col.power - l + 1]);
    dK.col(c) = col.scale * acc;
  }
  return dK;
}

Mat diff_cholesky(const Mat& L, const Mat& dM) {
  const int m = static_cast<int>(L.rows());
  Mat dL = Mat::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    if (L(k, k) == 0.0) throw SolverError("zero pivot in Cholesky derivative");
    double s = 0.5 * dM(k, k);
    for (int j = 0; j < k; ++j) s -= dL(k, j) * L(k, j);
    dL(k, k) = s / L(k, k);
    for (int i = k + 1; i < m; ++i) {
      double t = dM(i, k);
      for (int j = 0; j <= k; ++j) t -= dL(k, j) * L(i, j);
      for (int j = 0; j < k; ++j) t -= dL(i, j) * L(k, j);
      dL(i, k) = t / L(k, k);
    }
  }
  return dL;
}

Mat diff_basis(const Mat& dK, const Mat& V, const Mat& dU, const Mat& U) {
  const Mat rhs = dK - V * dU;
  // X U = rhs  <=>  U^T X^T = rhs^T
  return U.transpose().triangularView<Eigen::Lower>().solve(rhs.transpose()).transpose();
}

ReducedDerivative diff_reduced(const SpMat& A, const Mat& V, const Mat& dV, const Vec& d, const Vec& b) {
  const Vec vd = V.transpose() * d;
  const Mat W = (A * V).transpose() * dV;  // V^T A dV
  ReducedDerivative r;
  r.dAm = -vd * vd.transpose() + W + W.transpose();
  r.dbm = dV.transpose() * b;
  return r;
}

SpectralDerivative diff_spectral(const ReducedModel& rom, const ReducedSpectrum& spec, const ReducedDerivative& dr) {
  const int m = static_cast<int>(spec.pr.theta.size());
  const Vec& th = spec.pr.theta;
  const double gap_floor = 1e-10 * rom.Am.norm();
  SpectralDerivative out{Vec(m), Vec(m)};
  const Mat dAZ = dr.dAm * spec.Z;
  const Vec bz = spec.Z.transpose() * rom.bm;
  const Vec dbz = spec.Z.transpose() * dr.dbm;
  for (int j = 0; j < m; ++j) {
    out.dtheta[j] = -spec.Z.col(j).dot(dAZ.col(j));
    // b_m^T dz_j with dz_j = -(A_m + theta_j I)^+ dA z_j
    double bdz = 0.0;
    for (int k = 0; k < m; ++k) {
      if (k == j) continue;
      const double gap = th[j] - th[k];
      if (std::abs(gap) < gap_floor) throw SolverError("reduced eigenvalues too close to differentiate");
      bdz -= bz[k] * spec.Z.col(k).dot(dAZ.col(j)) / gap;
    }
    out.dc[j] = 2.0 * bz[j] * (dbz[j] + bdz);
  }
  return out;
}

Vec diff_eta(const Vec& c, const Vec& dc) {
  const double cs = c.sum(), dcs = dc.sum();
  Vec deta(c.size());
  for (int i = 0; i < c.size(); ++i) {
    const double eta = std::sqrt(c[i] / cs);
    deta[i] = 0.5 * eta * (dc[i] / c[i] - dcs / cs);
  }
  return deta;
}

LanczosDerivative diff_lanczos(const Vec& theta, const Tridiagonal& T, const Mat& Q, const Vec& dtheta,
                               const Vec& deta) {
  const int m = static_cast<int>(theta.size());
  Mat Ath = Mat::Ones(m, m), Aeta = Mat::Zero(m, m);
  Mat Bth = Mat::Zero(std::max(m - 1, 0), m), Beta = Mat::Zero(std::max(m - 1, 0), m);
  for (int i = 0; i + 1 < m; ++i) {
    const double bi = T.beta[i];
    if (!(bi > 0)) throw InadmissibleModel("Lanczos breakdown in derivative", InadmissibleModel::Kind::breakdown, i);
    for (int j = 0; j < m; ++j) {
      const double q0j = Q(0, j);
      double sa = 0.0, sb = 0.0;
      for (int p = 0; p < m; ++p) {
        if (p == j) continue;
        const double inv = 1.0 / (theta[p] - theta[j]);
        const double r = Q(0, p) / q0j;
        sa += inv * (2.0 * Q(i, p) * Q(i + 1, p) - r * (Q(i, p) * Q(i + 1, j) + Q(i + 1, p) * Q(i, j)));
        sb += inv * (Q(i + 1, p) * Q(i + 1, p) - r * Q(i + 1, p) * Q(i + 1, j));
      }
      Ath(i, j) = 1.0 + bi * sa;
      Aeta(i, j) = 2.0 * bi * Q(i + 1, j) * Q(i, j) / q0j;
      Bth(i, j) = sb;
      Beta(i, j) = Q(i + 1, j) * Q(i + 1, j) / q0j;
    }
  }
  const Vec cum_a = -Ath * dtheta + Aeta * deta;
  LanczosDerivative out{Vec(m), Vec(std::max(m - 1, 0))};
  for (int i = 0; i < m; ++i) out.dalpha[i] = cum_a[i] - (i > 0 ? cum_a[i - 1] : 0.0);
  if (m > 1) {
    const Vec cum_b = -Bth * dtheta + Beta * deta;
    for (int i = 0; i + 1 < m; ++i) out.dbeta[i] = T.beta[i] * (cum_b[i] - (i > 0 ? cum_b[i - 1] : 0.0));
  }
  return out;
}

CfracDerivative diff_cfrac_recursion(const Tridiagonal& T, const ContinuedFraction& cf, const LanczosDerivative& dl,
                                     double residue_sum, double d_residue_sum) {
  const int m = cf.order();
  CfracDerivative out{Vec(m), Vec(m)};
  const Vec& k = cf.kappa;
  const Vec& kh = cf.kappa_hat;
  out.dkappa_hat[0] = -d_residue_sum / (residue_sum * residue_sum);
  {
    const double p = kh[0] * T.alpha[0];  // kappa_1 = -1/p
    out.dkappa[0] = (out.dkappa_hat[0] * T.alpha[0] + kh[0] * dl.dalpha[0]) / (p * p);
  }
  for (int j = 1; j < m; ++j) {
    const double b = T.beta[j - 1];
    // kappa_hat_j = 1/(k_{j-1}^2 b^2 kh_{j-1})
    const double dlog = 2.0 * out.dkappa[j - 1] / k[j - 1] + 2.0 * dl.dbeta[j - 1] / b +
                        out.dkappa_hat[j - 1] / kh[j - 1];
    out.dkappa_hat[j] = -kh[j] * dlog;
    // kappa_j = -1/E, E = alpha_j kh_j + 1/k_{j-1}
    const double E = T.alpha[j] * kh[j] + 1.0 / k[j - 1];
    const double dE = dl.dalpha[j] * kh[j] + T.alpha[j] * out.dkappa_hat[j] -
                      out.dkappa[j - 1] / (k[j - 1] * k[j - 1]);
    out.dkappa[j] = dE / (E * E);
  }
  return out;
}

Vec chain_value(const RomChain& chain, Coordinates coords) {
  if (coords == Coordinates::continued_fraction) return chain.cf.logs();
  const int m = chain.spectrum.pr.order();
  Vec l(2 * m);
  l << chain.spectrum.pr.theta, chain.spectrum.pr.c;
  if (coords == Coordinates::spectral) l = l.array().log();
  return l;
}

namespace {

// Derivative of the output coordinates from (dA_m, db_m).
Vec output_derivative(const RomChain& ch, const ReducedDerivative& dr, Coordinates coords) {
  const int m = ch.spectrum.pr.order();
  const SpectralDerivative sd = diff_spectral(ch.rom, ch.spectrum, dr);
  const Vec& th = ch.spectrum.pr.theta;
  const Vec& c = ch.spectrum.pr.c;
  Vec g(2 * m);
  if (coords == Coordinates::spectral_raw) {
    g << sd.dtheta, sd.dc;
    return g;
  }
  if (coords == Coordinates::spectral) {
    g.head(m) = sd.dtheta.cwiseQuotient(th);
    g.tail(m) = sd.dc.cwiseQuotient(c);
    return g;
  }
  const Vec deta = diff_eta(c, sd.dc);
  const Mat Q = ch.lanczos.X.transpose();
  const LanczosDerivative dl = diff_lanczos(th, ch.lanczos.T, Q, sd.dtheta, deta);
  const CfracDerivative cd = diff_cfrac_recursion(ch.lanczos.T, ch.cf, dl, c.sum(), sd.dc.sum());
  g.head(m) = cd.dkappa.cwiseQuotient(ch.cf.kappa);
  g.tail(m) = cd.dkappa_hat.cwiseQuotient(ch.cf.kappa_hat);
  return g;
}

double row_dot(const std::vector<std::pair<int, double>>& d, const Mat& X, int col) {
  double s = 0.0;
  for (auto [i, v] : d) s += v * X(i, col);
  return s;
}

// Cholesky chain: every product Y^T dK needs (R^l Y)^T d, precomputed once.
Mat jacobian_cholesky(const SystemOperator& op, const Vec& b, const NodeFamily& family, const RomChain& ch,
                      const ResolventSet& R, Coordinates coords) {
  const KrylovBasis& kb = ch.basis;
  const int m = static_cast<int>(kb.columns.size());
  const int n = static_cast<int>(b.size());
  const int nodes = static_cast<int>(family.nodes.size());
  const Mat AV = op.A * kb.V;
  Mat G(n, 2 * m + 1);
  G << kb.K, AV, b;
  std::vector<std::vector<Mat>> Zp(nodes), Xp(nodes);  // Zp[j][l] = R_j^l G, Xp[j][l] = R_j^l b
  for (int j = 0; j < nodes; ++j) {
    Zp[j].push_back(G);
    Xp[j].push_back(b);
    for (int l = 1; l <= family.multiplicity[j]; ++l) {
      Zp[j].push_back(R.solve(j, Zp[j].back()));
      Xp[j].push_back(R.solve(j, Xp[j].back()));
    }
  }
  const Mat L = kb.U.transpose();
  const Mat& Am = ch.rom.Am;
  const Mat bmT = ch.rom.bm.transpose();
  const int faces = op.factor.n_rows();
  Mat Jf(2 * m, faces);
  for (int e = 0; e < faces; ++e) {
    const auto& d = op.factor.rows[e];
    Mat GdK = Mat::Zero(2 * m + 1, m);
    for (int c = 0; c < m; ++c) {
      const auto& col = kb.columns[c];
      for (int l = 1; l <= col.power; ++l) {
        const double xs = row_dot(d, Xp[col.node][col.power - l + 1], 0);
        const Mat& Z = Zp[col.node][l];
        for (int r = 0; r < 2 * m + 1; ++r) GdK(r, c) -= col.scale * row_dot(d, Z, r) * xs;
      }
    }
    // row_dot(d, Z, r) reads column r of Z: (Z^T d)_r
    const Mat KdK = GdK.topRows(m);
    const Mat dM = KdK + KdK.transpose();
    const Mat dU = diff_cholesky(L, dM).transpose();
    const Mat WA = diff_basis(GdK.middleRows(m, m), Am, dU, kb.U);
    const Mat wb = diff_basis(GdK.bottomRows(1), bmT, dU, kb.U);
    Vec vd = Vec::Zero(m);
    for (auto [i, v] : d) vd += v * kb.V.row(i).transpose();
    ReducedDerivative dr{-vd * vd.transpose() + WA + WA.transpose(), wb.transpose()};
    Jf.col(e) = output_derivative(ch, dr, coords);
  }
  return Jf;
}

// Gram-Schmidt chain: forward-mode through the orthogonalization, one resolvent
// solve per node (R d) plus one per higher-power column and parameter.
Mat jacobian_gram_schmidt(const SystemOperator& op, const Vec& b, const NodeFamily& family, const RomChain& ch,
                          const ResolventSet& R, Coordinates coords) {
  const KrylovBasis& kb = ch.basis;
  const int m = static_cast<int>(kb.columns.size());
  const int n = static_cast<int>(b.size());
  const int nodes = static_cast<int>(family.nodes.size());
  const int faces = op.factor.n_rows();
  Mat Jf(2 * m, faces);
  for (int e = 0; e < faces; ++e) {
    Vec d = Vec::Zero(n);
    for (auto [i, v] : op.factor.rows[e]) d[i] = v;
    std::vector<Vec> y(nodes);
    for (int j = 0; j < nodes; ++j) y[j] = R.solve(j, d);
    Mat dV(n, m);
    for (int c = 0; c < m; ++c) {
      const auto& col = kb.columns[c];
      const auto w = kb.K.col(c);
      Vec dw = -y[col.node] * d.dot(w);
      if (col.power > 1) dw += R.solve(col.node, Vec(dV.col(c - 1)));
      const auto Q = kb.V.leftCols(c);
      const auto dQ = dV.leftCols(c);
      const Vec a = kb.U.col(c).head(c);
      Vec du = dw - dQ * a - Q * (dQ.transpose() * w + Q.transpose() * dw);
      const auto q = kb.V.col(c);
      dV.col(c) = (du - q * q.dot(du)) / kb.U(c, c);
    }
    ReducedDerivative dr = diff_reduced(op.A, kb.V, dV, d, b);
    Jf.col(e) = output_derivative(ch, dr, coords);
  }
  return Jf;
}

}  // namespace

JacobianResult assemble_jacobian(const SystemOperator& op, const Vec& b, const NodeFamily& family,
                                 Orthogonalization method, Coordinates coords) {
  const ResolventSet R(op.A, family);
  const RomChain ch = rom_chain(op.A, b, family, method, &R);
  JacobianResult out;
  out.value = chain_value(ch, coords);
  const Mat Jf = ch.basis.method == Orthogonalization::cholesky ? jacobian_cholesky(op, b, family, ch, R, coords)
                                                                 : jacobian_gram_schmidt(op, b, family, ch, R, coords);
  out.J = Jf * op.to_rows;
  return out;
}

Mat finite_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& r, double rel_step) {
  const Vec f0 = f(r);
  Mat J(f0.size(), r.size());
  for (int k = 0; k < r.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(r[k]));
    Vec rp = r, rm = r;
    rp[k] += h;
    rm[k] -= h;
    J.col(k) = (f(rp) - f(rm)) / (2.0 * h);
  }
  return J;
}

}  // namespace rominv
