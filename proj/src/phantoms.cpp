#include "rominv/phantoms.hpp"

#include <cmath>

namespace rominv {

double phantom_1d(const std::string& name, double x) {
  if (name == "rQ") return 2.0 - 4.0 * (x - 0.5) * (x - 0.5);
  if (name == "rL") return 0.8 * std::exp(-100.0 * (x - 0.2) * (x - 0.2)) + x + 1.0;
  if (name == "rJ") return x < 0.2 ? 1.0 : (x <= 0.6 ? 2.0 : 1.5);
  if (name == "rH") return x < 0.2 ? 1.0 : (x <= 0.6 ? 5.0 : 3.0);
  if (name == "r20") return x < 0.2 ? 1.0 : (x <= 0.6 ? 20.0 : 1.0);
  if (name == "const") return 1.0;
  throw InputError("unknown 1D phantom '" + name + "'");
}

Vec phantom_1d(const std::string& name, const Grid1D& grid) {
  const Vec x = grid.coordinates();
  Vec r(x.size());
  for (int i = 0; i < x.size(); ++i) r[i] = phantom_1d(name, x[i]);
  return r;
}

namespace {

bool inside(double x1, double x2, double a0, double a1, double b0, double b1) {
  return x1 >= a0 && x1 < a1 && x2 >= b0 && x2 < b1;
}

}  // namespace

double phantom_2d(const std::string& name, double x1, double x2) {
  if (name == "uniform") return 1.0;
  if (name == "2d-corner") {
    if (inside(x1, x2, 1.0, 1.5, 0.1, 0.3)) return 1.5;
    if (inside(x1, x2, 1.5, 2.0, 0.3, 0.5)) return 0.66;
    return 1.0;
  }
  if (name == "2d-side") {
    if (inside(x1, x2, 1.0, 1.5, 0.1, 0.35)) return 1.5;
    if (inside(x1, x2, 1.5, 2.0, 0.1, 0.35)) return 0.66;
    return 1.0;
  }
  if (name == "2d-tilted") {
    // band of thickness 0.15 whose depth grows from 0.15 to 0.45 across [1,2]
    if (x1 < 1.0 || x1 >= 2.0) return 1.0;
    const double mid = 0.15 + 0.3 * (x1 - 1.0);
    return std::abs(x2 - mid) < 0.075 ? 2.0 : 1.0;
  }
  throw InputError("unknown 2D phantom '" + name + "'");
}

Vec phantom_2d(const std::string& name, const Grid2D& grid) {
  Vec r(grid.cells());
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      r[grid.index(ix, iy)] = phantom_2d(name, (ix + 0.5) * grid.hx(), (iy + 0.5) * grid.hy());
  return r;
}

std::vector<char> inclusion_mask(const std::string& name, const Grid2D& grid) {
  const Vec r = phantom_2d(name, grid);
  std::vector<char> mask(r.size());
  for (int i = 0; i < r.size(); ++i) mask[i] = r[i] != 1.0;
  return mask;
}

std::vector<std::string> phantom_names_1d() { return {"rQ", "rL", "rJ", "rH", "r20", "const"}; }
std::vector<std::string> phantom_names_2d() { return {"2d-corner", "2d-side", "2d-tilted", "uniform"}; }

}  // namespace rominv
