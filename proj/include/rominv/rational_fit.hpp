#pragma once

#include "rominv/core.hpp"

#include <span>
#include <string>
#include <vector>

namespace rominv {

/// Interpolation nodes with multiplicities. A node of multiplicity M matches
/// Y and its first 2M-1 derivatives; the model order is the sum of M.
struct NodeFamily {
  std::vector<double> nodes;
  std::vector<int> multiplicity;
  std::string label;

  int order() const;
  bool distinct_simple() const;  // every multiplicity is 1

  static NodeFamily zolotarev(int m);
  /// Geometric nodes with the Zolotarev ratio raised to `power` (default cubed).
  static NodeFamily fast(int m, double power = 3.0);
  static NodeFamily pade0(int m);
  static NodeFamily single_node(double s, int m);
  static NodeFamily by_name(const std::string& name, int m, double single_shift = 60.0);
};

NodeFamily nodes_geometric(int m, double s1, double ratio);

/// Y_m(s) = num(z)/den(z), z = (s - shift)/scale, coefficients ascending in z.
struct RationalModel {
  Vec num;  // degree m-1
  Vec den;  // degree m
  double scale = 1.0;
  double shift = 0.0;
  double cond = 0.0;     // sigma_max / sigma_min of the fitting matrix
  Vec singular_values;
  bool ambiguous = false;  // trailing singular value at rounding level

  int order() const { return static_cast<int>(den.size()) - 1; }
  /// Coefficients in the unscaled variable (s - shift).
  Vec numerator() const;
  Vec denominator() const;
  double operator()(double s) const;
};

struct PoleResidue {
  Vec theta;  // pole magnitudes, ascending
  Vec c;      // residues

  int order() const { return static_cast<int>(theta.size()); }
  double value(double s) const;
  double derivative(double s) const;
};

/// Osculatory multipoint Pade through Y and Y' at distinct nodes.
RationalModel fit_multipoint(const Vec& values, const Vec& derivatives, std::span<const double> nodes);

/// [m-1/m] Pade from 2m Taylor coefficients at `shift`; `scale` rescales the
/// expansion variable before the SVD (1 keeps the raw moments).
RationalModel fit_pade_toeplitz(const Vec& moments, double shift = 0.0, double scale = 1.0);

/// Poles and residues; throws InadmissibleModel for complex or nonnegative
/// poles and nonpositive residues.
PoleResidue to_pole_residue(const RationalModel& model);

}  // namespace rominv
