#include "rominv/data_transform.hpp"

#include <cmath>
#include <vector>

namespace rominv {

namespace {

void require_data(const TimeSeries& d) {
  if (d.values.empty()) throw InputError("empty time series");
  if (!(d.step > 0)) throw InputError("time series step must be positive");
}

// Accumulates sum_k d_k e^{-s t_k} and sum_k d_k t_k e^{-s t_k}.
void kernel_sums(const TimeSeries& d, double s, long double& s0, long double& s1) {
  const double h = d.step;
  const double q = std::exp(-s * h);
  double e = 0.0;
  s0 = 0.0L;
  s1 = 0.0L;
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k % 1024 == 0)
      e = std::exp(-s * d.time(k));
    else
      e *= q;
    const double v = d.values[k] * e;
    s0 += v;
    s1 += v * d.time(k);
  }
}

}  // namespace

double laplace_transform(const TimeSeries& d, double s) {
  require_data(d);
  if (!(s > 0)) throw InputError("Laplace variable must be positive");
  long double s0, s1;
  kernel_sums(d, s, s0, s1);
  return static_cast<double>(s0 * d.step);
}

double laplace_derivative(const TimeSeries& d, double s) {
  require_data(d);
  if (!(s > 0)) throw InputError("Laplace variable must be positive");
  long double s0, s1;
  kernel_sums(d, s, s0, s1);
  return -static_cast<double>(s1 * d.step);
}

LaplaceData laplace_at(const TimeSeries& d, std::span<const double> nodes) {
  require_data(d);
  LaplaceData out{Vec(nodes.size()), Vec(nodes.size())};
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (!(nodes[j] > 0)) throw InputError("Laplace variable must be positive");
    long double s0, s1;
    kernel_sums(d, nodes[j], s0, s1);
    out.value[j] = static_cast<double>(s0 * d.step);
    out.derivative[j] = -static_cast<double>(s1 * d.step);
  }
  return out;
}

Vec laplace_moments(const TimeSeries& d, double shift, int count) {
  require_data(d);
  if (count < 1) throw InputError("moment count must be positive");
  if (shift < 0) throw InputError("moment shift must be nonnegative");
  // Weight t^k e^{-shift t} / k! is built as exp(k log t - shift t - log k!)
  // by multiplying t/k onto e^{-shift t}; each factor stays representable.
  std::vector<long double> acc(count, 0.0L);
  const double q = std::exp(-shift * d.step);
  double e = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double t = d.time(j);
    if (j % 1024 == 0)
      e = std::exp(-shift * t);
    else
      e *= q;
    double w = d.values[j] * e;
    acc[0] += w;
    for (int k = 1; k < count; ++k) {
      w *= t / k;
      acc[k] += w;
    }
  }
  Vec tau(count);
  for (int k = 0; k < count; ++k) {
    tau[k] = ((k % 2) ? -1.0 : 1.0) * static_cast<double>(acc[k] * d.step);
    if (!std::isfinite(tau[k]))
      throw InputError("moment weights overflow; reduce the moment count");
  }
  return tau;
}

}  // namespace rominv
