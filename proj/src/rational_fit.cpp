#include "rominv/rational_fit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace rominv {

int NodeFamily::order() const { return std::accumulate(multiplicity.begin(), multiplicity.end(), 0); }

bool NodeFamily::distinct_simple() const {
  return std::all_of(multiplicity.begin(), multiplicity.end(), [](int m) { return m == 1; });
}

NodeFamily nodes_geometric(int m, double s1, double ratio) {
  if (m < 1) throw InputError("node count must be positive");
  if (!(s1 > 0)) throw InputError("first node must be positive");
  if (!(ratio > 1)) throw InputError("geometric ratio must exceed 1");
  NodeFamily f;
  f.label = "geometric";
  for (int j = 0; j < m; ++j) {
    f.nodes.push_back(s1 * std::pow(ratio, j));
    f.multiplicity.push_back(1);
  }
  return f;
}

NodeFamily NodeFamily::zolotarev(int m) {
  NodeFamily f = nodes_geometric(m, 2.0, 1.0 + 12.0 / m);
  f.label = "zolotarev";
  return f;
}

NodeFamily NodeFamily::fast(int m, double power) {
  NodeFamily f = nodes_geometric(m, 2.0, std::pow(1.0 + 12.0 / m, power));
  f.label = "fast";
  return f;
}

NodeFamily NodeFamily::pade0(int m) {
  if (m < 1) throw InputError("model order must be positive");
  return NodeFamily{{0.0}, {m}, "pade0"};
}

NodeFamily NodeFamily::single_node(double s, int m) {
  if (m < 1) throw InputError("model order must be positive");
  if (s < 0) throw InputError("interpolation node must be nonnegative");
  return NodeFamily{{s}, {m}, "single"};
}

NodeFamily NodeFamily::by_name(const std::string& name, int m, double single_shift) {
  if (name == "zolotarev") return zolotarev(m);
  if (name == "fast") return fast(m);
  if (name == "pade0") return pade0(m);
  if (name == "single") return single_node(single_shift, m);
  throw InputError("unknown node family '" + name + "'");
}

Vec RationalModel::numerator() const {
  Vec f = num;
  for (int j = 0; j < f.size(); ++j) f[j] /= std::pow(scale, j);
  return f;
}

Vec RationalModel::denominator() const {
  Vec g = den;
  for (int j = 0; j < g.size(); ++j) g[j] /= std::pow(scale, j);
  return g;
}

namespace {

template <class C>
C horner(const Vec& coef, C z) {
  C acc = 0.0;
  for (int j = static_cast<int>(coef.size()) - 1; j >= 0; --j) acc = acc * z + coef[j];
  return acc;
}

}  // namespace

double RationalModel::operator()(double s) const {
  const double z = (s - shift) / scale;
  return horner(num, z) / horner(den, z);
}

double PoleResidue::value(double s) const {
  return (c.array() / (s + theta.array())).sum();
}

double PoleResidue::derivative(double s) const {
  return -(c.array() / (s + theta.array()).square()).sum();
}

namespace {

RationalModel from_null_vector(const Eigen::JacobiSVD<Mat>& svd, int m, double scale, double shift) {
  const Mat& V = svd.matrixV();
  const Vec u = V.col(V.cols() - 1);
  RationalModel r;
  r.num = u.head(m);
  r.den = u.tail(m + 1);
  r.scale = scale;
  r.shift = shift;
  r.singular_values = svd.singularValues();
  const double smax = r.singular_values[0];
  const double smin = r.singular_values[r.singular_values.size() - 1];
  r.cond = smax / smin;
  r.ambiguous = !(smin > 1e-15 * smax);
  return r;
}

}  // namespace

RationalModel fit_multipoint(const Vec& values, const Vec& derivatives, std::span<const double> nodes) {
  const int m = static_cast<int>(nodes.size());
  if (m < 1 || values.size() != m || derivatives.size() != m)
    throw InputError("fit_multipoint: need one value and one derivative per node");
  for (int i = 0; i < m; ++i) {
    if (!(nodes[i] > 0)) throw InputError("fit_multipoint: nodes must be positive");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw InputError("fit_multipoint: nodes must increase");
  }
  const double sm = nodes[m - 1];
  Mat S(m, m + 1), Sd(m, m + 1);
  for (int i = 0; i < m; ++i) {
    const double s = nodes[i] / sm;
    for (int k = 0; k <= m; ++k) {
      S(i, k) = std::pow(s, k);
      Sd(i, k) = k == 0 ? 0.0 : k * std::pow(s, k - 1) / sm;
    }
  }
  Mat P = Mat::Zero(2 * m, 2 * m + 1);
  P.block(0, 0, m, m) = S.leftCols(m);
  P.block(0, m, m, m + 1) = -(values.asDiagonal() * S);
  P.block(m, 0, m, m) = Sd.leftCols(m);
  P.block(m, m, m, m + 1) = -(derivatives.asDiagonal() * S) - values.asDiagonal() * Sd;
  Eigen::JacobiSVD<Mat> svd(P, Eigen::ComputeFullV);
  return from_null_vector(svd, m, sm, 0.0);
}

RationalModel fit_pade_toeplitz(const Vec& moments, double shift, double scale) {
  if (moments.size() < 2 || moments.size() % 2 != 0)
    throw InputError("fit_pade_toeplitz: need an even number (2m) of moments");
  if (!(scale > 0)) throw InputError("fit_pade_toeplitz: scale must be positive");
  if (moments.cwiseAbs().maxCoeff() == 0.0) throw InputError("fit_pade_toeplitz: all moments are zero");
  const int m = static_cast<int>(moments.size()) / 2;
  Vec tau(2 * m);
  for (int k = 0; k < 2 * m; ++k) tau[k] = moments[k] * std::pow(scale, k);
  Mat T(m, m + 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= m; ++j) T(i, j) = tau[m + i - j];
  Eigen::JacobiSVD<Mat> svd(T, Eigen::ComputeFullV);
  const Vec g = svd.matrixV().col(m);
  RationalModel r;
  r.den = g;
  r.num = Vec::Zero(m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j <= k; ++j) r.num[k] += tau[k - j] * g[j];
  r.scale = scale;
  r.shift = shift;
  r.singular_values = svd.singularValues();
  const double smax = r.singular_values[0], smin = r.singular_values[m - 1];
  r.cond = smax / smin;
  r.ambiguous = !(smin > 1e-15 * smax);
  return r;
}

PoleResidue to_pole_residue(const RationalModel& model) {
  const int m = model.order();
  if (m < 1) throw InputError("to_pole_residue: empty model");
  const Vec& g = model.den;
  if (!(std::abs(g[m]) > 1e-14 * g.cwiseAbs().maxCoeff()))
    throw InadmissibleModel("denominator degree is below the model order", InadmissibleModel::Kind::degree, m);

  std::vector<std::complex<double>> roots(m);
  if (m == 1) {
    roots[0] = -g[0] / g[1];
  } else {
    Mat C = Mat::Zero(m, m);
    for (int i = 1; i < m; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) C(i, m - 1) = -g[i] / g[m];
    Eigen::EigenSolver<Mat> es(C, false);
    if (es.info() != Eigen::Success) throw SolverError("companion eigenvalue solve failed");
    for (int i = 0; i < m; ++i) roots[i] = es.eigenvalues()[i];
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> theta(m);
  for (int i = 0; i < m; ++i) theta[i] = -(roots[i].real() * model.scale + model.shift);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] < theta[b]; });

  PoleResidue pr{Vec(m), Vec(m)};
  for (int jj = 0; jj < m; ++jj) {
    const int j = order[jj];
    const auto z = roots[j];
    if (std::abs(z.imag()) > 1e-12 * std::abs(z))
      throw InadmissibleModel("complex pole pair", InadmissibleModel::Kind::complex_pole, jj);
    if (!(theta[j] > 0))
      throw InadmissibleModel("pole in the right half line", InadmissibleModel::Kind::nonnegative_pole, jj);
    const double zr = z.real();
    double prod = g[m];
    for (int k = 0; k < m; ++k)
      if (k != j) prod *= zr - roots[k].real();
    pr.theta[jj] = theta[j];
    pr.c[jj] = model.scale * horner(model.num, zr) / prod;
  }
  for (int j = 0; j < m; ++j)
    if (!(pr.c[j] > 0)) throw InadmissibleModel("nonpositive residue", InadmissibleModel::Kind::residue, j);
  for (int j = 1; j < m; ++j)
    if (!(pr.theta[j] > pr.theta[j - 1]))
      throw InadmissibleModel("coinciding poles", InadmissibleModel::Kind::complex_pole, j);
  return pr;
}

}  // namespace rominv
