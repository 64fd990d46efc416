#include "rominv/inversion.hpp"

#include "rominv/data_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rominv {

Vec target_vector(const PoleResidue& pr, const ContinuedFraction& cf, Coordinates coords) {
  if (coords == Coordinates::continued_fraction) return cf.logs();
  const int m = pr.order();
  Vec l(2 * m);
  l << pr.theta, pr.c;
  if (coords == Coordinates::spectral) l = l.array().log();
  return l;
}

namespace {

// Taylor coefficients rescaled so the nearest singularity sits near distance 1.
double moment_scale(const Vec& tau) {
  if (tau.size() < 2 || tau[1] == 0.0) return 1.0;
  return std::abs(tau[0] / tau[1]);
}

bool finish_fit(DataFit& fit, RationalModel model, int m, Coordinates coords) {
  try {
    fit.poles = to_pole_residue(model);
    fit.cf = pole_residue_to_cfrac(fit.poles);
  } catch (const InadmissibleModel& e) {
    fit.rejected.push_back("m=" + std::to_string(m) + ": " + e.what());
    return false;
  } catch (const SolverError& e) {
    fit.rejected.push_back("m=" + std::to_string(m) + ": " + e.what());
    return false;
  }
  fit.m = m;
  fit.model = std::move(model);
  fit.target = target_vector(fit.poles, fit.cf, coords);
  return true;
}

[[noreturn]] void unusable(const DataFit& fit) {
  std::string why = "no admissible model down to m = 1";
  if (!fit.rejected.empty()) why += " (last: " + fit.rejected.back() + ")";
  throw DataUnusable(why);
}

}  // namespace

DataFit data_fitting_Q(const TimeSeries& d, const std::string& family, int m0, Coordinates coords,
                       double single_shift) {
  if (m0 < 1) throw InputError("initial model order must be at least 1");
  DataFit fit;
  for (int m = m0; m >= 1; --m) {
    const NodeFamily fam = NodeFamily::by_name(family, m, single_shift);
    RationalModel model;
    if (fam.distinct_simple()) {
      const LaplaceData ld = laplace_at(d, fam.nodes);
      model = fit_multipoint(ld.value, ld.derivative, fam.nodes);
    } else if (fam.nodes.size() == 1) {
      const Vec tau = laplace_moments(d, fam.nodes[0], 2 * m);
      model = fit_pade_toeplitz(tau, fam.nodes[0], moment_scale(tau));
    } else {
      throw InputError("data fitting needs distinct simple nodes or a single node");
    }
    if (finish_fit(fit, std::move(model), m, coords)) return fit;
  }
  unusable(fit);
}

DataFit fit_from_moments(const Vec& moments, double shift, int m0, Coordinates coords) {
  if (m0 < 1) throw InputError("initial model order must be at least 1");
  if (moments.size() < 2 * m0) throw InputError("need 2*m0 moments");
  DataFit fit;
  for (int m = m0; m >= 1; --m) {
    const Vec tau = moments.head(2 * m);
    if (finish_fit(fit, fit_pade_toeplitz(tau, shift, moment_scale(tau)), m, coords)) return fit;
  }
  unusable(fit);
}

void InversionConfig::validate() const {
  if (m < 1) throw InputError("m must be at least 1");
  if (!(step > 0 && step <= 1)) throw InputError("step length must lie in (0,1]");
  if (c_phi < 0) throw InputError("C_phi must be positive");
  if (iterations < 0) throw InputError("iteration count must be nonnegative");
  if (discard < 0) throw InputError("discard count must be nonnegative");
  if (initial.size() > 0 && !(initial.minCoeff() > 0)) throw InputError("initial guess must be positive");
}

namespace {

Vec gn_direction(const Mat& J, const Vec& residual) {
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double cut = s.size() ? 1e-12 * s[0] : 0.0;
  Vec coef = svd.matrixU().transpose() * residual;
  for (int i = 0; i < s.size(); ++i) coef[i] = s[i] > cut ? coef[i] / s[i] : 0.0;
  return -(svd.matrixV() * coef);
}

constexpr int max_halvings = 20;

}  // namespace

Vec gauss_newton_step(const Vec& r, const Mat& J, const Vec& residual, double& alpha) {
  const Vec rho = gn_direction(J, residual);
  for (int k = 0; k <= max_halvings; ++k, alpha *= 0.5) {
    const Vec out = r + alpha * rho;
    if (out.minCoeff() > 0) return out;
  }
  throw SolverError("positivity guard exhausted: no positive Gauss-Newton iterate");
}

SpMat interior_rows(const DifferenceFactor& factor) {
  std::vector<Eigen::Triplet<double>> t;
  int row = 0;
  for (int e = 0; e < factor.n_rows(); ++e) {
    if (!factor.interior[e]) continue;
    for (auto [c, v] : factor.rows[e]) t.emplace_back(row, c, v);
    ++row;
  }
  SpMat Dt(row, factor.n_cols());
  Dt.setFromTriplets(t.begin(), t.end());
  return Dt;
}

Vec adaptive_weights(const SpMat& Dt, const Vec& r, double phi) {
  const Vec g = Dt * r;
  return (g.array().square() + phi * phi).inverse();
}

Vec regularize_nullspace(const Vec& r_gn, const Mat& J, const SpMat& Dt, const Vec& weights, int discard) {
  const int n = static_cast<int>(r_gn.size());
  const int k = static_cast<int>(J.rows());
  if (J.cols() != n || Dt.cols() != n || weights.size() != Dt.rows()) throw InputError("regularization: size mismatch");
  Mat M = Mat::Zero(n + k, n + k);
  M.topLeftCorner(n, n) = Mat(Dt.transpose() * weights.asDiagonal() * Dt);
  M.topRightCorner(n, k) = J.transpose();
  M.bottomLeftCorner(k, n) = J;
  Vec rhs = Vec::Zero(n + k);
  rhs.tail(k) = J * r_gn;
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  if (es.info() != Eigen::Success) throw SolverError("KKT eigen-decomposition failed");
  const Vec& lam = es.eigenvalues();
  std::vector<int> order(n + k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(lam[a]) < std::abs(lam[b]); });
  const double big = std::abs(lam[order.back()]);
  const Vec proj = es.eigenvectors().transpose() * rhs;
  Vec sol = Vec::Zero(n + k);
  // components at rounding level carry no information and are dropped too
  const double floor = std::numeric_limits<double>::epsilon() * (n + k) * big;
  for (int i = discard; i < n + k; ++i) {
    const int j = order[i];
    if (std::abs(lam[j]) < floor) continue;
    sol += (proj[j] / lam[j]) * es.eigenvectors().col(j);
  }
  if (!sol.allFinite()) throw SolverError("KKT solve produced non-finite values");
  return sol.head(n);
}

double relative_error(const Vec& r, const Vec& truth) {
  if (r.size() != truth.size()) throw InputError("relative_error: size mismatch");
  return (r - truth).norm() / truth.norm();
}

namespace {

// Forward map and Jacobian at r for one problem type.
struct Problem {
  std::function<JacobianResult(const Vec&)> jacobian;
  std::function<Vec(const Vec&)> value;
  SpMat Dt;
};

InversionResult gauss_newton(const Problem& pb, const Vec& target, int m, const InversionConfig& cfg,
                             const std::optional<Vec>& truth, int n) {
  InversionResult out;
  out.m = m;
  out.target = target;
  Vec r = cfg.initial.size() ? cfg.initial : Vec::Ones(n);
  if (r.size() != n) throw InputError("initial guess has the wrong size");
  JacobianResult jr = pb.jacobian(r);
  Vec res = jr.value - target;
  out.initial_residual = res.norm();
  const double c_phi = cfg.c_phi > 0 ? cfg.c_phi : 1.0 / (2.0 * m * m);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int p = 1; p <= cfg.iterations; ++p) {
    const Vec rho = gn_direction(jr.J, res);
    double alpha = cfg.step;
    Vec rn, r_gn;
    bool accepted = false;
    for (int halving = 0; halving <= max_halvings; ++halving, alpha *= 0.5) {
      r_gn = r + alpha * rho;
      if (!(r_gn.minCoeff() > 0)) continue;
      const Vec W = cfg.regularization == Regularization::adaptive
                        ? adaptive_weights(pb.Dt, r_gn, c_phi * res.norm())
                        : Vec::Ones(pb.Dt.rows());
      rn = regularize_nullspace(r_gn, jr.J, pb.Dt, W, cfg.discard);
      if (!(rn.minCoeff() > 0)) continue;
      if (cfg.backtracking) {
        double next = std::numeric_limits<double>::infinity();
        try {
          next = (pb.value(rn) - target).norm();
        } catch (const Error&) {
        }
        if (!(next <= res.norm())) {
          if (alpha > 1.0 / 64) continue;
          break;  // no acceptable step along this direction
        }
      }
      accepted = true;
      break;
    }
    if (!accepted) {
      if (!cfg.backtracking) throw SolverError("positivity guard exhausted: no positive Gauss-Newton iterate");
      out.stagnated = true;
      break;
    }
    IterationRecord rec;
    rec.iteration = p;
    rec.step = alpha;
    rec.preservation = (jr.J * (rn - r_gn)).norm() / (jr.J * r_gn).norm();
    const double prev = res.norm();
    r = rn;
    jr = pb.jacobian(r);
    res = jr.value - target;
    rec.residual = res.norm();
    rec.error = truth ? relative_error(r, *truth) : nan;
    out.history.push_back(rec);
    if (std::abs(prev - rec.residual) < cfg.stagnation * std::max(prev, 1e-300)) {
      out.stagnated = true;
      break;
    }
  }
  out.r = r;
  return out;
}

}  // namespace

InversionResult invert_1d_target(const Vec& target, const Grid1D& grid, const InversionConfig& config,
                                 const std::optional<Vec>& truth) {
  config.validate();
  const int m = static_cast<int>(target.size()) / 2;
  const NodeFamily fam = NodeFamily::by_name(config.family, m, config.single_shift);
  const DifferenceFactor factor = build_difference_1d(grid);
  const Vec b = source_vector(grid);
  Problem pb;
  pb.jacobian = [&](const Vec& r) {
    return assemble_jacobian(assemble_operator(r, factor), b, fam, config.method, config.coords);
  };
  pb.value = [&](const Vec& r) {
    const auto op = assemble_operator(r, factor);
    return chain_value(rom_chain(op.A, b, fam, config.method), config.coords);
  };
  pb.Dt = interior_rows(factor);
  return gauss_newton(pb, target, m, config, truth, grid.n);
}

InversionResult invert_1d(const TimeSeries& d, const Grid1D& grid, const InversionConfig& config,
                          const std::optional<Vec>& truth) {
  config.validate();
  const DataFit fit = data_fitting_Q(d, config.family, config.m, config.coords, config.single_shift);
  return invert_1d_target(fit.target, grid, config, truth);
}

JacobianResult stacked_jacobian_2d(const Vec& cells, const Grid2D& grid, const NodeFamily& family,
                                   Orthogonalization method, Coordinates coords) {
  const SystemOperator op = assemble_operator_2d(cells, grid);
  const int m = family.order();
  const int ns = static_cast<int>(grid.segments.size());
  JacobianResult out;
  out.value.resize(2 * m * ns);
  out.J.resize(2 * m * ns, cells.size());
  for (int s = 0; s < ns; ++s) {
    const JacobianResult js = assemble_jacobian(op, source_vector(grid, grid.segments[s]), family, method, coords);
    out.value.segment(2 * m * s, 2 * m) = js.value;
    out.J.middleRows(2 * m * s, 2 * m) = js.J;
  }
  return out;
}

InversionResult invert_2d_targets(const std::vector<Vec>& targets, const Grid2D& grid,
                                  const InversionConfig& config, const std::optional<Vec>& truth) {
  config.validate();
  grid.validate();
  if (targets.size() != grid.segments.size()) throw InputError("one target per source segment required");
  const int m = static_cast<int>(targets.front().size()) / 2;
  for (const auto& t : targets)
    if (t.size() != 2 * m) throw InputError("every source needs the same model order");
  Vec stacked(2 * m * targets.size());
  for (std::size_t s = 0; s < targets.size(); ++s) stacked.segment(2 * m * s, 2 * m) = targets[s];
  const NodeFamily fam = NodeFamily::single_node(config.single_shift, m);
  Problem pb;
  pb.jacobian = [&](const Vec& r) { return stacked_jacobian_2d(r, grid, fam, config.method, config.coords); };
  pb.value = [&](const Vec& r) {
    const SystemOperator op = assemble_operator_2d(r, grid);
    Vec v(stacked.size());
    for (std::size_t s = 0; s < grid.segments.size(); ++s)
      v.segment(2 * m * s, 2 * m) =
          chain_value(rom_chain(op.A, source_vector(grid, grid.segments[s]), fam, config.method), config.coords);
    return v;
  };
  pb.Dt = cell_difference_2d(grid);
  return gauss_newton(pb, stacked, m, config, truth, grid.cells());
}

InversionResult invert_2d_moments(const std::vector<Vec>& moments, const Grid2D& grid,
                                  const InversionConfig& config, const std::optional<Vec>& truth) {
  config.validate();
  if (moments.size() != grid.segments.size()) throw InputError("invert_2d: one moment vector per source expected");
  // a common order for all sources, the smallest admissible one
  std::vector<DataFit> fits;
  int m = config.m;
  for (const auto& mom : moments) {
    if (mom.size() < 2 * config.m) throw InputError("invert_2d: need 2m moments per source");
    fits.push_back(fit_from_moments(mom.head(2 * config.m), config.single_shift, config.m, config.coords));
    m = std::min(m, fits.back().m);
  }
  std::vector<Vec> targets;
  for (std::size_t s = 0; s < moments.size(); ++s) {
    if (fits[s].m != m)
      fits[s] = fit_from_moments(moments[s].head(2 * m), config.single_shift, m, config.coords);
    if (fits[s].m != m) throw DataUnusable("sources admit no common model order");
    targets.push_back(fits[s].target);
  }
  return invert_2d_targets(targets, grid, config, truth);
}

InversionResult invert_2d(const std::vector<TimeSeries>& data, const Grid2D& grid, const InversionConfig& config,
                          const std::optional<Vec>& truth) {
  std::vector<Vec> moments;
  for (const auto& d : data) moments.push_back(laplace_moments(d, config.single_shift, 2 * config.m));
  return invert_2d_moments(moments, grid, config, truth);
}

}  // namespace rominv
