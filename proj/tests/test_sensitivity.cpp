#include "rominv/fine_grid.hpp"
#include "rominv/inversion.hpp"
#include "rominv/optgrid.hpp"
#include "rominv/phantoms.hpp"
#include "rominv/sensitivity.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rominv;

namespace {

Vec random_positive(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Vec r(n);
  for (int i = 0; i < n; ++i) r[i] = u(gen);
  return r;
}

double rel_frobenius(const Mat& a, const Mat& b) { return (a - b).norm() / a.norm(); }

struct Fixture {
  Grid1D grid;
  DifferenceFactor factor;
  Vec r, b;
  SystemOperator op;
  explicit Fixture(int n, unsigned seed = 1)
      : grid(Grid1D::make(n)), factor(build_difference_1d(grid)), r(random_positive(n, seed)),
        b(source_vector(grid)), op(assemble_operator(r, factor)) {}
  SpMat perturbed(int k, double eps) const {
    Vec rp = r;
    rp[k] += eps;
    return assemble_operator(rp, factor).A;
  }
};

}  // namespace

TEST_CASE("basis derivative: orthogonality identity and finite differences") {
  const Fixture fx(30, 3);
  const NodeFamily fam = NodeFamily::zolotarev(3);
  const ResolventSet R(fx.op.A, fam);
  const KrylovBasis kb = build_krylov(fx.op.A, fx.b, fam, Orthogonalization::cholesky, &R);
  const int k = 11;
  const Vec d = operator_derivative(fx.factor, k);
  const Mat dK = diff_snapshots(R, fx.b, kb, d);
  const Mat dU = diff_cholesky(kb.U.transpose(), dK.transpose() * kb.K + kb.K.transpose() * dK).transpose();
  const Mat dV = diff_basis(dK, kb.V, dU, kb.U);
  const Mat S = kb.V.transpose() * dV;
  CHECK((S + S.transpose()).norm() < 1e-8);

  const double h = 1e-6 * fx.r[k];
  const KrylovBasis plus = build_krylov(fx.perturbed(k, h), fx.b, fam);
  const KrylovBasis minus = build_krylov(fx.perturbed(k, -h), fx.b, fam);
  // snapshot derivative keeps the column scales fixed
  Mat fd(plus.K.rows(), 3);
  for (int c = 0; c < 3; ++c) {
    const double s = kb.columns[c].scale;
    fd.col(c) = (plus.K.col(c) * s / plus.columns[c].scale - minus.K.col(c) * s / minus.columns[c].scale) / (2 * h);
  }
  CHECK(rel_frobenius(dK, fd) < 1e-6);
  CHECK(rel_frobenius(dV, (plus.V - minus.V) / (2 * h)) < 1e-6);
}

TEST_CASE("one-column basis derivative is the normalized-vector formula") {
  const Fixture fx(20, 4);
  const NodeFamily fam = NodeFamily::zolotarev(1);
  const ResolventSet R(fx.op.A, fam);
  const KrylovBasis kb = build_krylov(fx.op.A, fx.b, fam, Orthogonalization::cholesky, &R);
  const Vec d = operator_derivative(fx.factor, 5);
  const Mat dK = diff_snapshots(R, fx.b, kb, d);
  const Mat dU = diff_cholesky(kb.U.transpose(), dK.transpose() * kb.K + kb.K.transpose() * dK).transpose();
  const Vec dV = diff_basis(dK, kb.V, dU, kb.U).col(0);
  const Vec K = kb.K.col(0), dk = dK.col(0);
  const double nk = K.norm();
  const Vec expect = dk / nk - K * K.dot(dk) / (nk * nk * nk);
  CHECK((dV - expect).norm() < 1e-10 * expect.norm());
}

TEST_CASE("spectral derivative on a diagonal reduced operator") {
  ReducedModel rom;
  rom.Am = Mat(Vec((Vec(3) << -1.0, -4.0, -9.0).finished()).asDiagonal());
  rom.bm = (Vec(3) << 0.5, 1.0, 2.0).finished();
  const ReducedSpectrum spec = reduced_spectral(rom);
  ReducedDerivative dr;
  dr.dAm = (Mat(3, 3) << 0.3, 0.1, -0.2, 0.1, -0.5, 0.4, -0.2, 0.4, 0.7).finished();
  dr.dbm = (Vec(3) << 0.2, -0.1, 0.3).finished();
  const SpectralDerivative sd = diff_spectral(rom, spec, dr);
  // theta sorted ascending: 1, 4, 9 come from diagonal entries 0, 1, 2
  CHECK(sd.dtheta[0] == doctest::Approx(-0.3));
  CHECK(sd.dtheta[1] == doctest::Approx(0.5));
  CHECK(sd.dtheta[2] == doctest::Approx(-0.7));
  CHECK(sd.dc.sum() == doctest::Approx(2.0 * rom.bm.dot(dr.dbm)).epsilon(1e-12));

  const double h = 1e-7;
  ReducedModel p = rom, q = rom;
  p.Am += h * dr.dAm;
  p.bm += h * dr.dbm;
  q.Am -= h * dr.dAm;
  q.bm -= h * dr.dbm;
  const PoleResidue a = reduced_spectral(p).pr, b = reduced_spectral(q).pr;
  CHECK(((a.theta - b.theta) / (2 * h) - sd.dtheta).norm() < 1e-6);
  CHECK(((a.c - b.c) / (2 * h) - sd.dc).norm() < 1e-6);
}

TEST_CASE("Lanczos perturbation against rerunning Lanczos") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int m = 1; m <= 5; ++m) {
    Vec theta(m), c(m), dtheta(m), dc(m);
    double t = 0.7;
    for (int j = 0; j < m; ++j) {
      t *= 2.5 + u(gen);
      theta[j] = t;
      c[j] = 0.2 + u(gen);
      dtheta[j] = u(gen) - 0.5;
      dc[j] = u(gen) - 0.5;
    }
    auto eta_of = [](const Vec& cc) { return Vec(cc.cwiseSqrt() / std::sqrt(cc.sum())); };
    const LanczosResult lr = lanczos_tridiag(Mat((-theta).asDiagonal()), eta_of(c));
    const Vec deta = diff_eta(c, dc);
    CHECK(std::abs(eta_of(c).dot(deta)) < 1e-14);
    const LanczosDerivative dl = diff_lanczos(theta, lr.T, lr.X.transpose(), dtheta, deta);
    if (m == 1) CHECK(dl.dalpha[0] == doctest::Approx(-dtheta[0]));

    const double h = 1e-6;
    const Tridiagonal Tp = lanczos_tridiag(Mat((-(theta + h * dtheta)).asDiagonal()), eta_of(c + h * dc)).T;
    const Tridiagonal Tm = lanczos_tridiag(Mat((-(theta - h * dtheta)).asDiagonal()), eta_of(c - h * dc)).T;
    const Vec fa = (Tp.alpha - Tm.alpha) / (2 * h);
    CHECK((fa - dl.dalpha).norm() <= 1e-5 * std::max(1.0, fa.norm()));
    if (m > 1) {
      const Vec fb = (Tp.beta - Tm.beta) / (2 * h);
      CHECK((fb - dl.dbeta).norm() <= 1e-5 * std::max(1.0, fb.norm()));
    }
    const LanczosDerivative zero = diff_lanczos(theta, lr.T, lr.X.transpose(), Vec::Zero(m), Vec::Zero(m));
    CHECK(zero.dalpha.norm() == 0.0);
  }
}

TEST_CASE("full-chain Jacobian matches finite differences (1D)") {
  for (int m = 1; m <= 5; ++m) {
    const Fixture fx(50, 20 + m);
    const NodeFamily fam = NodeFamily::zolotarev(m);
    auto f = [&](const Vec& r) { return preconditioner_R(r, fam, fx.grid); };
    for (auto coords : {Coordinates::continued_fraction, Coordinates::spectral}) {
      const JacobianResult jr = assemble_jacobian(fx.op, fx.b, fam, Orthogonalization::cholesky, coords);
      if (coords == Coordinates::continued_fraction) {
        CHECK(rel_frobenius(jr.J, finite_difference_jacobian(f, fx.r)) < 1e-5);
        CHECK((jr.value - f(fx.r)).norm() < 1e-12 * jr.value.norm());
      }
    }
    const JacobianResult gs = assemble_jacobian(fx.op, fx.b, fam, Orthogonalization::gram_schmidt);
    CHECK(rel_frobenius(gs.J, finite_difference_jacobian(f, fx.r)) < 1e-5);
  }
}

TEST_CASE("spectral coordinates Jacobian matches finite differences") {
  const Fixture fx(40, 9);
  const NodeFamily fam = NodeFamily::zolotarev(4);
  for (auto coords : {Coordinates::spectral, Coordinates::spectral_raw}) {
    auto f = [&](const Vec& r) {
      return chain_value(rom_chain(assemble_operator(r, fx.factor).A, fx.b, fam), coords);
    };
    const JacobianResult jr = assemble_jacobian(fx.op, fx.b, fam, Orthogonalization::cholesky, coords);
    CHECK(rel_frobenius(jr.J, finite_difference_jacobian(f, fx.r)) < 1e-5);
  }
}

TEST_CASE("single-node Jacobian of one 2D source") {
  const Grid2D g = Grid2D::make(12, 6, 3.0, 1.0, 1.0, 2.0, 2);
  const Vec cells = random_positive(g.cells(), 17);
  const Vec b = source_vector(g, g.segments[1]);
  const NodeFamily fam = NodeFamily::single_node(60.0, 3);
  auto f = [&](const Vec& r) { return preconditioner_R(assemble_operator_2d(r, g).A, b, fam); };
  const JacobianResult jr = assemble_jacobian(assemble_operator_2d(cells, g), b, fam);
  CHECK(rel_frobenius(jr.J, finite_difference_jacobian(f, cells)) < 1e-5);
}

TEST_CASE("sensitivity rows are localized near the optimal grid cells") {
  const int n = 1999, m = 5;
  const Grid1D g = Grid1D::make(n);
  const SystemOperator op = assemble_operator(Vec::Ones(n), build_difference_1d(g));
  const NodeFamily fam = NodeFamily::zolotarev(m);
  const JacobianResult jr = assemble_jacobian(op, source_vector(g), fam, Orthogonalization::automatic);
  const OptimalGrid og = reference_grid(fam, n);
  const Vec x = g.coordinates();
  for (int j = 0; j < m; ++j) {
    Eigen::Index k;
    jr.J.row(j).cwiseAbs().maxCoeff(&k);
    const double lo = og.dual[j], hi = j + 1 < m ? og.dual[j + 1] : 1.0;
    CHECK(x[k] > lo);
    CHECK(x[k] < hi);
  }
}
