#include "rominv/fine_grid.hpp"
#include "rominv/forward_sim.hpp"
#include "rominv/krylov_project.hpp"
#include "rominv/phantoms.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>

using namespace rominv;

namespace {

SpMat reduced_sparse(const Mat& Am) { return Am.sparseView(); }

SystemOperator medium_1d(const std::string& phantom, int n) {
  const Grid1D g = Grid1D::make(n);
  return assemble_operator(phantom_1d(phantom, g), build_difference_1d(g));
}

}  // namespace

TEST_CASE("one-column basis is the normalized resolvent") {
  const Grid1D g = Grid1D::make(40);
  const SystemOperator op = medium_1d("rQ", 40);
  const Vec b = source_vector(g);
  const KrylovBasis kb = build_krylov(op.A, b, NodeFamily::zolotarev(1));
  Eigen::SimplicialLDLT<SpMat> f(SpMat(2.0 * Mat::Identity(40, 40).sparseView()) - op.A);
  const Vec k = f.solve(b);
  CHECK((kb.V.col(0) - k / k.norm()).norm() < 1e-12);
}

TEST_CASE("pade0 snapshots are powers of the inverse") {
  const Grid1D g = Grid1D::make(30);
  const SystemOperator op = medium_1d("rL", 30);
  const Vec b = source_vector(g);
  const KrylovBasis kb = build_krylov(op.A, b, NodeFamily::pade0(3), Orthogonalization::cholesky);
  Eigen::SimplicialLDLT<SpMat> f(-op.A);
  Vec x = b;
  for (int j = 0; j < 3; ++j) {
    x = f.solve(x);
    CHECK((kb.K.col(j) - x / x.norm()).norm() < 1e-10);
  }
}

TEST_CASE("basis is orthonormal and factors the snapshots") {
  const Grid1D g = Grid1D::make(199);
  const SystemOperator op = medium_1d("rJ", 199);
  for (auto method : {Orthogonalization::cholesky, Orthogonalization::gram_schmidt}) {
    const KrylovBasis kb = build_krylov(op.A, source_vector(g), NodeFamily::zolotarev(5), method);
    CHECK((kb.V.transpose() * kb.V - Mat::Identity(5, 5)).norm() < 1e-12);
    CHECK((kb.K - kb.V * kb.U).norm() < 1e-10 * kb.K.norm());
  }
}

TEST_CASE("projection interpolates Y and Y' at every node") {
  const Grid1D g = Grid1D::make(199);
  for (const std::string ph : {"const", "rQ", "rH"}) {
    const SystemOperator op = medium_1d(ph, 199);
    const Vec b = source_vector(g);
    for (int m = 1; m <= 5; ++m) {
      const NodeFamily fam = NodeFamily::zolotarev(m);
      const RomChain chain = rom_chain(op.A, b, fam, Orthogonalization::automatic);
      const SpMat Am = reduced_sparse(chain.rom.Am);
      for (double s : fam.nodes) {
        const TransferValue full = transfer_eval(op.A, b, b, s);
        const TransferValue red = transfer_eval(Am, chain.rom.bm, chain.rom.bm, s);
        CHECK(std::abs(red.value / full.value - 1.0) < 1e-8);
        CHECK(std::abs(red.derivative / full.derivative - 1.0) < 1e-8);
      }
    }
  }
}

TEST_CASE("single node matches the Taylor coefficients") {
  const Grid2D g = Grid2D::make(90, 30, 3.0, 1.0, 1.0, 2.0, 8);
  const SystemOperator op = assemble_operator_2d(phantom_2d("2d-tilted", g), g);
  const Vec b = source_vector(g, g.segments[2]);
  const RomChain chain = rom_chain(op.A, b, NodeFamily::single_node(60.0, 5), Orthogonalization::automatic);
  const Vec full = transfer_moments(op.A, b, 60.0, 4);
  const Vec red = transfer_moments(reduced_sparse(chain.rom.Am), chain.rom.bm, 60.0, 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(red[k] / full[k] - 1.0) < 1e-6);
}

TEST_CASE("full basis reproduces the transfer function") {
  const Grid1D g = Grid1D::make(6);
  const SystemOperator op = medium_1d("rQ", 6);
  const Vec b = source_vector(g);
  const RomChain chain = rom_chain(op.A, b, NodeFamily::zolotarev(6), Orthogonalization::gram_schmidt);
  for (double s : {0.1, 3.0, 50.0})
    CHECK(transfer_eval(reduced_sparse(chain.rom.Am), chain.rom.bm, chain.rom.bm, s).value ==
          doctest::Approx(transfer_eval(op.A, b, b, s).value).epsilon(1e-10));
}

TEST_CASE("reduced spectrum") {
  const Grid1D g = Grid1D::make(120);
  const SystemOperator op = medium_1d("rL", 120);
  const Vec b = source_vector(g);
  const RomChain chain = rom_chain(op.A, b, NodeFamily::zolotarev(4));
  const PoleResidue& pr = chain.spectrum.pr;
  CHECK(pr.c.sum() == doctest::Approx(chain.rom.bm.squaredNorm()).epsilon(1e-12));
  CHECK(chain.rom.bm.squaredNorm() == doctest::Approx((chain.basis.V.transpose() * b).squaredNorm()).epsilon(1e-12));

  Eigen::SelfAdjointEigenSolver<Mat> es{Mat(op.A)};
  for (int j = 0; j < 4; ++j) {
    CHECK(-pr.theta[j] >= es.eigenvalues().minCoeff() * (1 + 1e-12));
    CHECK(-pr.theta[j] <= es.eigenvalues().maxCoeff() * (1 - 1e-12));
  }

  // same model as the rational fit through the data at the nodes
  const NodeFamily fam = NodeFamily::zolotarev(4);
  Vec v(4), dv(4);
  for (int j = 0; j < 4; ++j) {
    const TransferValue t = transfer_eval(op.A, b, b, fam.nodes[j]);
    v[j] = t.value;
    dv[j] = t.derivative;
  }
  const PoleResidue fit = to_pole_residue(fit_multipoint(v, dv, fam.nodes));
  CHECK(((fit.theta - pr.theta).array() / pr.theta.array()).abs().maxCoeff() < 1e-6);
  CHECK(((fit.c - pr.c).array() / pr.c.array()).abs().maxCoeff() < 1e-6);

  const RomChain one = rom_chain(op.A, b, NodeFamily::zolotarev(1));
  CHECK(one.spectrum.pr.theta[0] == doctest::Approx(-one.rom.Am(0, 0)));
  CHECK(one.spectrum.pr.c[0] == doctest::Approx(one.rom.bm[0] * one.rom.bm[0]));
}

TEST_CASE("preconditioner on scaled constant media") {
  const Grid1D g = Grid1D::make(199);
  const int n = 199;
  // Y_gamma(s) = Y(s/gamma)/gamma, and nodes at s = 0 do not move: kappa
  // scales by 1/gamma, kappa_hat stays, zeta_tilde = gamma

  const Vec l1 = preconditioner_R(Vec::Ones(n), NodeFamily::pade0(4), g, Orthogonalization::gram_schmidt);
  const double gamma = 2.5;
  const Vec lg = preconditioner_R(Vec::Constant(n, gamma), NodeFamily::pade0(4), g, Orthogonalization::gram_schmidt);
  Vec expect = l1;
  expect.head(4).array() -= std::log(gamma);
  CHECK((lg - expect).cwiseAbs().maxCoeff() < 1e-8);

  // high contrast stays finite
  const Vec lh = preconditioner_R(phantom_1d("rH", g), NodeFamily::zolotarev(5), g);
  CHECK(lh.allFinite());
}

TEST_CASE("basis collapse is reported and the automatic path recovers") {
  const Grid1D g = Grid1D::make(59);
  const SystemOperator op = medium_1d("const", 59);
  const Vec b = source_vector(g);
  CHECK_THROWS_AS(build_krylov(op.A, b, NodeFamily::pade0(8), Orthogonalization::cholesky), SolverError);
  const KrylovBasis kb = build_krylov(op.A, b, NodeFamily::pade0(8), Orthogonalization::automatic);
  CHECK(kb.method == Orthogonalization::gram_schmidt);
  CHECK((kb.V.transpose() * kb.V - Mat::Identity(8, 8)).norm() < 1e-10);
  CHECK_THROWS_AS(build_krylov(op.A, b, NodeFamily::zolotarev(60)), InputError);
}
