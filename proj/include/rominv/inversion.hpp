#pragma once

#include "rominv/core.hpp"
#include "rominv/fine_grid.hpp"
#include "rominv/forward_sim.hpp"
#include "rominv/krylov_project.hpp"
#include "rominv/rational_fit.hpp"
#include "rominv/sensitivity.hpp"
#include "rominv/stieltjes.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rominv {

/// Data cannot support even a first-order model.
class DataUnusable : public Error {
 public:
  using Error::Error;
};

/// Result of fitting a Stieltjes model to measurements. `rejected` lists the
/// orders tried above `m` with the reason each failed.
struct DataFit {
  int m = 0;
  Vec target;  // log coefficients in the requested coordinates
  RationalModel model;
  PoleResidue poles;
  ContinuedFraction cf;
  std::vector<std::string> rejected;
};

/// Laplace data at the family nodes, rational fit, admissibility; m drops by
/// one on every failure. Distinct simple nodes use the multipoint fit, a single
/// node the Taylor (Toeplitz) fit.
DataFit data_fitting_Q(const TimeSeries& d, const std::string& family, int m0,
                       Coordinates coords = Coordinates::continued_fraction, double single_shift = 60.0);

/// Same reduction loop from Taylor coefficients at `shift` (2*m0 or more given).
DataFit fit_from_moments(const Vec& moments, double shift, int m0,
                         Coordinates coords = Coordinates::continued_fraction);

/// Stieltjes model to the requested target coordinates.
Vec target_vector(const PoleResidue& pr, const ContinuedFraction& cf, Coordinates coords);

enum class Regularization { h1, adaptive };

struct InversionConfig {
  int m = 6;
  std::string family = "zolotarev";
  int iterations = 5;
  double step = 1.0;  // alpha
  Regularization regularization = Regularization::h1;
  double c_phi = 0.0;  // 0 selects 1/(2 m^2)
  int discard = 1;     // smallest KKT components dropped
  bool backtracking = false;
  Coordinates coords = Coordinates::continued_fraction;
  Orthogonalization method = Orthogonalization::automatic;
  double single_shift = 60.0;
  double stagnation = 1e-8;
  Vec initial;  // empty: r = 1

  void validate() const;
};

/// r + alpha rho, rho = -pinv(J) (l - l*). alpha is halved (at most 20 times)
/// until the result is positive; `alpha` returns the value used.
Vec gauss_newton_step(const Vec& r, const Mat& J, const Vec& residual, double& alpha);

/// Minimizer of 1/2 |W^{1/2} Dt r|^2 subject to J r = J r_gn: KKT system solved
/// by a truncated symmetric eigen-expansion dropping `discard` components.
Vec regularize_nullspace(const Vec& r_gn, const Mat& J, const SpMat& Dt, const Vec& weights, int discard = 1);

/// Interior rows of a difference factor (the seminorm operator).
SpMat interior_rows(const DifferenceFactor& factor);

/// 1 / ((Dt r)^2 + phi^2).
Vec adaptive_weights(const SpMat& Dt, const Vec& r, double phi);

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;  // |l(r) - l*| after the update
  double error = 0.0;     // relative error, NaN without truth
  double step = 1.0;
  double preservation = 0.0;  // |J (r_new - r_gn)| / |J r_gn|
};

struct InversionResult {
  Vec r;
  int m = 0;
  Vec target;
  double initial_residual = 0.0;
  std::vector<IterationRecord> history;
  bool stagnated = false;
};

/// Gauss-Newton from a fitted target (1D, n unknowns on Grid1D).
InversionResult invert_1d_target(const Vec& target, const Grid1D& grid, const InversionConfig& config,
                                 const std::optional<Vec>& truth = std::nullopt);

/// Full 1D pipeline: data_fitting_Q then the Gauss-Newton loop.
InversionResult invert_1d(const TimeSeries& d, const Grid1D& grid, const InversionConfig& config,
                          const std::optional<Vec>& truth = std::nullopt);

/// 2D: stacked targets (one per source segment of `grid`), single node s~.
InversionResult invert_2d_targets(const std::vector<Vec>& targets, const Grid2D& grid,
                                  const InversionConfig& config, const std::optional<Vec>& truth = std::nullopt);

/// 2D from per-source Taylor coefficients at s~ (at least 2m each).
InversionResult invert_2d_moments(const std::vector<Vec>& moments, const Grid2D& grid,
                                  const InversionConfig& config, const std::optional<Vec>& truth = std::nullopt);

/// Full 2D pipeline from per-source measured series.
InversionResult invert_2d(const std::vector<TimeSeries>& data, const Grid2D& grid, const InversionConfig& config,
                          const std::optional<Vec>& truth = std::nullopt);

/// Stacked Jacobian of all sources for a 2D medium (rows 2m per source).
JacobianResult stacked_jacobian_2d(const Vec& cells, const Grid2D& grid, const NodeFamily& family,
                                   Orthogonalization method = Orthogonalization::automatic,
                                   Coordinates coords = Coordinates::continued_fraction);

double relative_error(const Vec& r, const Vec& truth);

}  // namespace rominv
