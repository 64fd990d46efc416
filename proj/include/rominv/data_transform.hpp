#pragma once

#include "rominv/core.hpp"
#include "rominv/forward_sim.hpp"

#include <span>

namespace rominv {

/// h_T sum_k d_k exp(-s t_k).
double laplace_transform(const TimeSeries& d, double s);

/// -h_T sum_k d_k t_k exp(-s t_k).
double laplace_derivative(const TimeSeries& d, double s);

/// Values and derivatives at several nodes in one pass over the series.
struct LaplaceData {
  Vec value;
  Vec derivative;
};
LaplaceData laplace_at(const TimeSeries& d, std::span<const double> nodes);

/// tau_k = ((-1)^k / k!) h_T sum_j d_j t_j^k exp(-shift t_j), k < count.
Vec laplace_moments(const TimeSeries& d, double shift, int count);

}  // namespace rominv
