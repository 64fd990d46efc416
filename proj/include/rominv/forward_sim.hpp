#pragma once

#include "rominv/core.hpp"

#include <cstdint>
#include <vector>

namespace rominv {

/// Samples y_k at t_k = (k+1)*step, k = 0..size()-1.
struct TimeSeries {
  double step = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return static_cast<double>(k + 1) * step; }
  double horizon() const { return static_cast<double>(values.size()) * step; }
};

/// Multiplicative noise d_k = y_k (1 + level * chi_k).
struct NoiseModel {
  double level = 0.0;
  std::uint64_t seed = 0;
};

enum class TimeStepping { spectral, euler };

/// Eigen-pairs of A seen from b: y(t) = sum_i weight_i exp(lambda_i t).
struct ModalResponse {
  Vec lambda;  // ascending (most negative first)
  Vec weight;  // (b^T q_i)^2
};

ModalResponse modal_response(const SpMat& A, const Vec& b);
TimeSeries synthesize(const ModalResponse& modes, double horizon, double step);

/// Largest |eigenvalue| bound used for the explicit Euler guard (Gershgorin).
double spectral_radius_bound(const SpMat& A);

TimeSeries simulate_response(const SpMat& A, const Vec& b, double horizon, double step,
                             TimeStepping method = TimeStepping::spectral);

TimeSeries add_noise(const TimeSeries& y, const NoiseModel& noise);

struct TransferValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// b_left^T (sI-A)^{-1} b_right and its s-derivative.
TransferValue transfer_eval(const SpMat& A, const Vec& b_left, const Vec& b_right, double s);

/// Taylor coefficients of Y at `shift`: Y(s) = sum_k tau_k (s-shift)^k.
Vec transfer_moments(const SpMat& A, const Vec& b, double shift, int count);

}  // namespace rominv
