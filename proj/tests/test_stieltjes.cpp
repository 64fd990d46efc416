#include "rominv/fine_grid.hpp"
#include "rominv/krylov_project.hpp"
#include "rominv/stieltjes.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace rominv;

namespace {

PoleResidue random_model(int m, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PoleResidue pr;
  pr.theta.resize(m);
  pr.c.resize(m);
  double t = 0.3;
  for (int j = 0; j < m; ++j) {
    t *= 2.0 + 3.0 * u(gen);
    pr.theta[j] = t;
    pr.c[j] = 0.1 + u(gen);
  }
  return pr;
}

}  // namespace

TEST_CASE("Lanczos on small problems") {
  Mat E = Mat::Constant(1, 1, -4.0);
  const LanczosResult one = lanczos_tridiag(E, Vec::Ones(1));
  CHECK(one.T.alpha[0] == doctest::Approx(-4.0));

  const Vec theta = (Vec(3) << 1.0, 2.0, 3.0).finished();
  const LanczosResult r = lanczos_tridiag(Mat((-theta).asDiagonal()), Vec::Ones(3) / std::sqrt(3.0));
  Eigen::SelfAdjointEigenSolver<Mat> es(r.T.dense());
  CHECK(es.eigenvalues()[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(es.eigenvalues()[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(es.eigenvalues()[2] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK((r.X.transpose() * r.X - Mat::Identity(3, 3)).norm() < 1e-13);
  for (int j = 0; j < 2; ++j) CHECK(r.T.beta[j] >= 0.0);

  const Vec dup = (Vec(3) << 1.0, 1.0, 3.0).finished();
  CHECK_THROWS_AS(lanczos_tridiag(Mat((-dup).asDiagonal()), Vec::Ones(3) / std::sqrt(3.0)), InadmissibleModel);
}

TEST_CASE("single pole continued fraction") {
  PoleResidue pr;
  pr.theta = Vec::Constant(1, 1.0);
  pr.c = Vec::Constant(1, 2.0);
  const ContinuedFraction cf = pole_residue_to_cfrac(pr);
  CHECK(cf.kappa_hat[0] == doctest::Approx(0.5));
  CHECK(cf.kappa[0] == doctest::Approx(2.0));
  CHECK(eval_cfrac(cf, 1.0) == doctest::Approx(1.0));
  CHECK(solve_fd_scheme(cf, 1.0)[0] == doctest::Approx(1.0));
  CHECK(eval_cfrac(cf, 1e8) * 1e8 * cf.kappa_hat[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("three evaluations of the same model agree") {
  for (int m = 1; m <= 8; ++m) {
    const PoleResidue pr = random_model(m, 100 + m);
    const ContinuedFraction cf = pole_residue_to_cfrac(pr);
    for (int k = 0; k <= 25; ++k) {
      const double s = std::pow(10.0, -2.0 + 5.0 * k / 25.0);
      const double pf = pr.value(s);
      CHECK(std::abs(eval_cfrac(cf, s) / pf - 1.0) < 1e-10);
      CHECK(std::abs(solve_fd_scheme(cf, s)[0] / pf - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("eigenvalues of T are minus the poles") {
  const PoleResidue pr = random_model(6, 7);
  Vec eta = pr.c.cwiseSqrt();
  eta /= eta.norm();
  const LanczosResult lr = lanczos_tridiag(Mat((-pr.theta).asDiagonal()), eta);
  Eigen::SelfAdjointEigenSolver<Mat> es(lr.T.dense());
  Vec neg = -es.eigenvalues();
  std::sort(neg.data(), neg.data() + neg.size());
  CHECK(((neg - pr.theta).array() / pr.theta.array()).abs().maxCoeff() < 1e-10);
}

TEST_CASE("sign flips of Lanczos vectors leave the coefficients unchanged") {
  const PoleResidue pr = random_model(5, 8);
  const ContinuedFraction cf = pole_residue_to_cfrac(pr);
  Vec eta = pr.c.cwiseSqrt();
  eta /= eta.norm();
  Tridiagonal T = lanczos_tridiag(Mat((-pr.theta).asDiagonal()), eta).T;
  std::mt19937 gen(3);
  for (int trial = 0; trial < 5; ++trial) {
    // flipping vector j flips beta_{j-1} and beta_j
    Tridiagonal F = T;
    for (int j = 1; j < 5; ++j)
      if (gen() % 2) {
        F.beta[j - 1] = -F.beta[j - 1];
        if (j < 4) F.beta[j] = -F.beta[j];
      }
    const ContinuedFraction g = cfrac_from_tridiag(F, pr.c.sum());
    CHECK((g.kappa - cf.kappa).cwiseAbs().maxCoeff() < 1e-12 * cf.kappa.maxCoeff());
    CHECK((g.kappa_hat - cf.kappa_hat).cwiseAbs().maxCoeff() < 1e-12 * cf.kappa_hat.maxCoeff());
  }
}

TEST_CASE("direct and spectral paths agree on a projected model") {
  const Grid1D g = Grid1D::make(199);
  const SystemOperator op = assemble_operator(Vec::Ones(199), build_difference_1d(g));
  const RomChain chain = rom_chain(op.A, source_vector(g), NodeFamily::zolotarev(5));
  const ReducedModel& rom = chain.rom;
  const double bn = rom.bm.norm();
  const LanczosResult direct = lanczos_tridiag(rom.Am, rom.bm / bn);
  const ContinuedFraction a = cfrac_from_tridiag(direct.T, bn * bn);
  const ContinuedFraction& b = chain.cf;
  CHECK(((a.kappa - b.kappa).array() / b.kappa.array()).abs().maxCoeff() < 1e-8);
  CHECK(((a.kappa_hat - b.kappa_hat).array() / b.kappa_hat.array()).abs().maxCoeff() < 1e-8);
  // reference medium: positive steps summing inside the unit interval
  CHECK(b.kappa.minCoeff() > 0.0);
  CHECK(b.kappa_hat.minCoeff() > 0.0);
  CHECK(b.kappa.sum() <= 1.0 + 1e-6);
  CHECK(b.kappa_hat.sum() <= 1.0 + 1e-6);
}

TEST_CASE("log coordinates round trip and admissibility") {
  const ContinuedFraction cf = pole_residue_to_cfrac(random_model(4, 9));
  const ContinuedFraction back = ContinuedFraction::from_logs(cf.logs());
  CHECK((back.kappa - cf.kappa).norm() < 1e-12 * cf.kappa.norm());
  ContinuedFraction bad = cf;
  bad.kappa_hat[2] = 0.0;
  try {
    require_admissible(bad);
    FAIL("expected InadmissibleModel");
  } catch (const InadmissibleModel& e) {
    CHECK(e.index == 4 + 2);
  }
  PoleResidue neg = random_model(3, 1);
  neg.c[1] = -0.1;
  CHECK_THROWS_AS(pole_residue_to_cfrac(neg), InadmissibleModel);
}
