#include "rominv/data_transform.hpp"
#include "rominv/fine_grid.hpp"
#include "rominv/forward_sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace rominv;

namespace {

SpMat scalar_operator() {
  SpMat A(1, 1);
  A.insert(0, 0) = -1.0;
  return A;
}

SystemOperator unit_medium(int n) {
  const Grid1D g = Grid1D::make(n);
  return assemble_operator(Vec::Ones(n), build_difference_1d(g));
}

}  // namespace

TEST_CASE("scalar system decays as exp(-t)") {
  const TimeSeries y = simulate_response(scalar_operator(), Vec::Ones(1), 2.0, 0.5);
  REQUIRE(y.size() == 4);
  CHECK(y.time(1) == doctest::Approx(1.0));
  CHECK(y.values[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("paper time axis has ten million samples") {
  const TimeSeries y = simulate_response(scalar_operator(), Vec::Ones(1), 100.0, 1e-5);
  CHECK(y.size() == 10000000);
  CHECK(y.time(0) == doctest::Approx(1e-5));
}

TEST_CASE("spectral response is positive and decreasing") {
  const SystemOperator op = unit_medium(40);
  const TimeSeries y = simulate_response(op.A, source_vector(Grid1D::make(40)), 5.0, 1e-3);
  for (std::size_t k = 0; k < y.size(); ++k) {
    CHECK(y.values[k] > 0.0);
    if (k) CHECK(y.values[k] < y.values[k - 1]);
  }
}

TEST_CASE("explicit Euler converges to the spectral response at first order") {
  const Grid1D g = Grid1D::make(20);
  const SystemOperator op = unit_medium(20);
  const Vec b = source_vector(g);
  const double bound = 2.0 / spectral_radius_bound(op.A);
  CHECK_THROWS_AS(simulate_response(op.A, b, 10.0, 1.5 * bound, TimeStepping::euler), StabilityError);

  std::vector<double> steps{bound / 4, bound / 8, bound / 16}, errors;
  for (double h : steps) {
    const double hh = 10.0 / std::ceil(10.0 / h);
    const TimeSeries e = simulate_response(op.A, b, 10.0, hh, TimeStepping::euler);
    const TimeSeries s = simulate_response(op.A, b, 10.0, hh, TimeStepping::spectral);
    double err = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) err = std::max(err, std::abs(e.values[k] - s.values[k]) / s.values[k]);
    errors.push_back(err);
  }
  const double slope = std::log(errors[0] / errors[2]) / std::log(4.0);
  CHECK(slope >= 0.9);
}

TEST_CASE("noise model") {
  const SystemOperator op = unit_medium(30);
  const TimeSeries y = simulate_response(op.A, source_vector(Grid1D::make(30)), 2.0, 1e-4);

  const TimeSeries clean = add_noise(y, NoiseModel{0.0, 7});
  CHECK(clean.values == y.values);

  const TimeSeries a = add_noise(y, NoiseModel{5e-2, 11}), b = add_noise(y, NoiseModel{5e-2, 11});
  CHECK(a.values == b.values);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TimeSeries d = add_noise(y, NoiseModel{5e-2, seed});
    double dn = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      dn += d.values[k] * d.values[k];
      nn += (d.values[k] - y.values[k]) * (d.values[k] - y.values[k]);
    }
    CHECK(std::sqrt(dn / nn) == doctest::Approx(20.0).epsilon(0.2));
  }
  CHECK_THROWS_AS(add_noise(y, NoiseModel{-1.0, 0}), InputError);
}

TEST_CASE("transfer function of the scalar system") {
  const TransferValue v = transfer_eval(scalar_operator(), Vec::Ones(1), Vec::Ones(1), 1.0);
  CHECK(v.value == doctest::Approx(0.5));
  CHECK(v.derivative == doctest::Approx(-0.25));
  const Vec tau = transfer_moments(scalar_operator(), Vec::Ones(1), 0.0, 4);
  for (int k = 0; k < 4; ++k) CHECK(tau[k] == doctest::Approx(k % 2 ? -1.0 : 1.0));
}

TEST_CASE("transfer function is a Stieltjes function and matches the modal sum") {
  const Grid1D g = Grid1D::make(50);
  const SystemOperator op = unit_medium(50);
  const Vec b = source_vector(g);
  const ModalResponse modes = modal_response(op.A, b);
  for (double s : {0.1, 1.0, 10.0, 300.0}) {
    const TransferValue v = transfer_eval(op.A, b, b, s);
    CHECK(v.value > 0.0);
    CHECK(v.derivative < 0.0);
    const double modal = (modes.weight.array() / (s - modes.lambda.array())).sum();
    CHECK(std::abs(v.value - modal) < 1e-12 * modal);
  }
}

TEST_CASE("moments at the 2D node") {
  const Grid2D g = Grid2D::make(90, 30, 3.0, 1.0, 1.0, 2.0, 8);
  const SystemOperator op = assemble_operator_2d(Vec::Ones(g.cells()), g);
  const Vec b = source_vector(g, g.segments[3]);
  const Vec tau = transfer_moments(op.A, b, 60.0, 10);
  CHECK(tau.allFinite());
  CHECK(tau[0] > 0.0);
  CHECK(tau[0] == doctest::Approx(transfer_eval(op.A, b, b, 60.0).value).epsilon(1e-12));
}

TEST_CASE("Laplace transform of synthesized data against the resolvent") {
  const Grid1D g = Grid1D::make(299);
  const SystemOperator op = unit_medium(299);
  const Vec b = source_vector(g);
  const TimeSeries y = simulate_response(op.A, b, 100.0, 1e-5);
  const ModalResponse modes = modal_response(op.A, b);
  const double s = 2.0, h = y.step;
  // exact value of the right-endpoint sum for each mode (geometric series)
  double sum = 0.0, dsum = 0.0;
  const double n = static_cast<double>(y.size());
  for (int i = 0; i < modes.lambda.size(); ++i) {
    const double q = std::exp((modes.lambda[i] - s) * h);
    sum += modes.weight[i] * h * q * (1.0 - std::pow(q, n)) / (1.0 - q);
    dsum -= modes.weight[i] * h * h * q * (1.0 - (n + 1) * std::pow(q, n) + n * std::pow(q, n + 1)) /
            ((1.0 - q) * (1.0 - q));
  }
  CHECK(laplace_transform(y, s) == doctest::Approx(sum).epsilon(1e-10));
  CHECK(laplace_derivative(y, s) == doctest::Approx(dsum).epsilon(1e-10));
  // against the continuum transform the rule is first order: y decreases, so
  // the gap is below h_T y(0) = h_T |b|^2
  const TransferValue v = transfer_eval(op.A, b, b, s);
  const double gap = v.value - laplace_transform(y, s);
  CHECK(gap > 0.0);
  CHECK(gap <= h * b.squaredNorm());
  CHECK(std::abs(laplace_derivative(y, s) / v.derivative - 1.0) < 1e-3);
}
