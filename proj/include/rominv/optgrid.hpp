#pragma once

#include "rominv/core.hpp"
#include "rominv/fine_grid.hpp"
#include "rominv/krylov_project.hpp"
#include "rominv/rational_fit.hpp"
#include "rominv/stieltjes.hpp"

#include <string>

namespace rominv {

/// Staggered grid from the continued fraction of the unit medium. Nodes are
/// cumulative sums of the steps; node 0 (x = 0) is implicit.
struct OptimalGrid {
  Vec primary;     // x_1..x_m, steps kappa0
  Vec dual;        // xhat_1..xhat_m, steps kappa_hat0
  Vec kappa0;
  Vec kappa_hat0;
  std::string family;
  int order() const { return static_cast<int>(primary.size()); }
};

/// Reference grid for r = 1 on an n-point grid. A nonempty cache_dir stores
/// and reuses the steps, keyed by a hash of (m, family, n).
OptimalGrid reference_grid(const NodeFamily& family, int n, const std::string& cache_dir = "",
                           Orthogonalization method = Orthogonalization::automatic);

struct Interlacing {
  bool ok = true;
  /// Index of the first failing entry of 0, xhat_1, x_1, xhat_2, ..., x_m, 1
  /// counted from the leading 0 (index 0), -1 when ok.
  int first_violation = -1;
};

/// 0 < xhat_1 < x_1 < xhat_2 < ... < xhat_m < x_m <= 1 + tol.
Interlacing check_interlacing(const OptimalGrid& grid, double tol = 1e-6);

struct RatioReconstruction {
  Vec zeta;        // at primary nodes
  Vec zeta_hat;    // at dual nodes
  Vec zeta_tilde;  // at dual nodes
  Vec x_primary;
  Vec x_dual;
};

/// zeta = (kappa0/kappa)^2, zeta_hat = (kappa_hat/kappa_hat0)^2, zeta_tilde their geometric mean.
RatioReconstruction ratio_reconstruction(const ContinuedFraction& cf, const OptimalGrid& grid);

}  // namespace rominv
