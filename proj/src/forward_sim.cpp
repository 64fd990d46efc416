#include "rominv/forward_sim.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <string>

namespace rominv {

namespace {

SpMat shifted(const SpMat& A, double s) {
  SpMat I(A.rows(), A.cols());
  I.setIdentity();
  SpMat M = s * I - A;
  M.makeCompressed();
  return M;
}

struct Resolvent {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Resolvent(const SpMat& A, double s) {
    ldlt.compute(shifted(A, s));
    if (ldlt.info() != Eigen::Success)
      throw SolverError("factorization of (sI - A) failed at s = " + std::to_string(s));
  }
  Vec solve(const Vec& x) const {
    Vec y = ldlt.solve(x);
    if (!y.allFinite()) throw SolverError("resolvent solve produced non-finite values");
    return y;
  }
};

}  // namespace

ModalResponse modal_response(const SpMat& A, const Vec& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es{Mat(A)};
  if (es.info() != Eigen::Success) throw SolverError("eigendecomposition of A failed");
  ModalResponse m;
  m.lambda = es.eigenvalues();
  m.weight = (es.eigenvectors().transpose() * b).array().square();
  return m;
}

TimeSeries synthesize(const ModalResponse& modes, double horizon, double step) {
  if (!(step > 0) || !(horizon >= step)) throw InputError("invalid time grid");
  const auto n = static_cast<std::size_t>(std::llround(horizon / step));
  TimeSeries y;
  y.step = step;
  y.values.assign(n, 0.0);
  const int nm = static_cast<int>(modes.lambda.size());
  if (nm == 0) return y;
  // Slowest mode is the last one (eigenvalues ascending). A mode is dropped
  // once it falls below 1e-17 of the slowest one.
  const double lam0 = modes.lambda[nm - 1];
  double w0 = 0.0;
  for (int i = nm - 1; i >= 0 && w0 <= 0.0; --i) w0 = modes.weight[i];
  const double log_cut = std::log(1e-17) + std::log(std::max(w0, 1e-300));
  for (int i = 0; i < nm; ++i) {
    const double w = modes.weight[i];
    if (!(w > 0)) continue;
    const double lam = modes.lambda[i];
    const double lw = std::log(w);
    std::size_t kmax = n;
    if (lam < lam0) {
      // lw + lam t < log_cut + lam0 t  <=>  t > (lw - log_cut) / (lam0 - lam)
      const double t_stop = (lw - log_cut) / (lam0 - lam);
      if (t_stop <= 0) continue;
      kmax = std::min<std::size_t>(n, static_cast<std::size_t>(t_stop / step) + 2);
    }
    const double q = std::exp(lam * step);
    double v = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) {
      if (k % 1024 == 0)
        v = w * std::exp(lam * static_cast<double>(k + 1) * step);
      else
        v *= q;
      y.values[k] += v;
    }
  }
  return y;
}

double spectral_radius_bound(const SpMat& A) {
  Vec rowsum = Vec::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) rowsum[it.row()] += std::abs(it.value());
  return rowsum.maxCoeff();
}

TimeSeries simulate_response(const SpMat& A, const Vec& b, double horizon, double step,
                             TimeStepping method) {
  if (!(step > 0)) throw InputError("time step must be positive");
  if (method == TimeStepping::spectral) return synthesize(modal_response(A, b), horizon, step);

  const double bound = 2.0 / spectral_radius_bound(A);
  if (step > bound)
    throw StabilityError("explicit Euler step " + std::to_string(step) +
                             " exceeds the stability bound " + std::to_string(bound),
                         bound);
  const auto n = static_cast<std::size_t>(std::llround(horizon / step));
  TimeSeries y;
  y.step = step;
  y.values.resize(n);
  Vec u = b;
  for (std::size_t k = 0; k < n; ++k) {
    u += step * (A * u);
    y.values[k] = b.dot(u);
  }
  return y;
}

TimeSeries add_noise(const TimeSeries& y, const NoiseModel& noise) {
  if (noise.level < 0) throw InputError("noise level must be nonnegative");
  TimeSeries d = y;
  if (noise.level == 0.0) return d;
  std::mt19937_64 gen(noise.seed);
  std::normal_distribution<double> chi(0.0, 1.0);
  for (auto& v : d.values) v *= 1.0 + noise.level * chi(gen);
  return d;
}

TransferValue transfer_eval(const SpMat& A, const Vec& b_left, const Vec& b_right, double s) {
  Resolvent R(A, s);
  const Vec x = R.solve(b_right);
  const Vec xl = R.solve(b_left);
  return {b_left.dot(x), -xl.dot(x)};
}

Vec transfer_moments(const SpMat& A, const Vec& b, double shift, int count) {
  if (count < 1) throw InputError("moment count must be positive");
  if (count > A.rows())
    std::cerr << "warning: " << count << " moments exceed the model dimension " << A.rows()
              << "; higher moments are linearly dependent\n";
  Resolvent R(A, shift);
  // tau_k = (-1)^k b^T R^{k+1} b = (-1)^k x_a^T x_b with a + b = k + 1, x_j = R^j b.
  const int half = (count + 1) / 2;
  std::vector<Vec> x{b};
  for (int j = 1; j <= half; ++j) x.push_back(R.solve(x.back()));
  Vec tau(count);
  for (int k = 0; k < count; ++k) {
    const int a = (k + 2) / 2, c = (k + 1) - a;
    tau[k] = ((k % 2) ? -1.0 : 1.0) * x[a].dot(x[c]);
  }
  return tau;
}

}  // namespace rominv
