#pragma once

#include "rominv/core.hpp"
#include "rominv/fine_grid.hpp"

#include <string>
#include <vector>

namespace rominv {

/// 1D resistivities on [0,1]: "rQ", "rL", "rJ", "rH", "const", and "r20"
/// (contrast 20 block on [0.2, 0.6]).
double phantom_1d(const std::string& name, double x);
Vec phantom_1d(const std::string& name, const Grid1D& grid);

/// 2D resistivities on the cell centers: "2d-corner", "2d-side", "2d-tilted",
/// "uniform". Inclusions span the accessible interval horizontally.
double phantom_2d(const std::string& name, double x1, double x2);
Vec phantom_2d(const std::string& name, const Grid2D& grid);

/// Cells of the inclusion of "2d-tilted" (where the phantom differs from 1).
std::vector<char> inclusion_mask(const std::string& name, const Grid2D& grid);

std::vector<std::string> phantom_names_1d();
std::vector<std::string> phantom_names_2d();

}  // namespace rominv
