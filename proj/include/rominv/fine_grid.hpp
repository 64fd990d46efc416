#pragma once

#include "rominv/core.hpp"

#include <utility>
#include <vector>

namespace rominv {

/// Uniform grid with N interior points on [0,1], spacing 1/(N+1).
struct Grid1D {
  int n = 0;
  double h = 0.0;

  static Grid1D make(int n_points);
  /// Coordinate k*h of sample k (1-based k, stored 0-based).
  Vec coordinates() const;
};

/// Segment [begin, end] of the x2 = 0 boundary.
struct Segment {
  double begin = 0.0;
  double end = 0.0;
};

/// Grid on [0,Lx]x[0,Ly] with nx*ny cells. Resistivity lives on cells, cell
/// (ix,iy) has index iy*nx + ix and iy = 0 touches the x2 = 0 boundary. The
/// potential lives on the vertices. Vertices on the accessible part of x2 = 0
/// ([access_begin, access_end]) carry a Neumann condition, every other
/// boundary vertex is grounded (Dirichlet) and not an unknown.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double lx = 3.0;
  double ly = 1.0;
  double access_begin = 1.0;
  double access_end = 2.0;
  std::vector<Segment> segments;

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  int cells() const { return nx * ny; }
  int index(int ix, int iy) const { return iy * nx + ix; }
  void validate() const;

  /// Standard layout: n_sources equal disjoint segments tiling the accessible interval.
  static Grid2D make(int nx, int ny, double lx, double ly, double a0, double a1, int n_sources);
};

/// Sparse difference factor D with entries stored by row; rows are edges (1D)
/// or faces carrying a flux (2D).
struct DifferenceFactor {
  SpMat D;  // row-major semantics via rows(), stored column-major
  /// Nonzeros of each row: at most two (column, value) pairs.
  std::vector<std::vector<std::pair<int, double>>> rows;
  /// True for rows differencing two unknowns (no boundary term).
  std::vector<char> interior;

  int n_rows() const { return static_cast<int>(rows.size()); }
  int n_cols() const { return static_cast<int>(D.cols()); }
};

/// A(r) = -D^T diag(P r) D. P maps the unknowns to per-row coefficients: the
/// identity in 1D, the cell-to-face averaging in 2D.
struct SystemOperator {
  SpMat A;
  DifferenceFactor factor;
  SpMat to_rows;   // P
  Vec row_values;  // P r
};

DifferenceFactor build_difference_1d(const Grid1D& grid);
SystemOperator assemble_operator(const Vec& r, const DifferenceFactor& factor);

/// Row k of D as a dense vector; dA/dr_k = -d d^T in 1D.
Vec operator_derivative(const DifferenceFactor& factor, int k);

/// Numbering of the unknown vertices of a 2D grid, -1 for grounded ones.
struct NodeLayout {
  explicit NodeLayout(const Grid2D& grid);
  int nx, ny;
  std::vector<int> id;  // (nx+1)*(ny+1), row-major in (j, i)
  int count = 0;
  int at(int i, int j) const { return id[j * (nx + 1) + i]; }
};

/// Vertex-to-vertex edges scaled by the control-volume masses, plus the map
/// cells -> edges averaging the cells adjacent to each dual face.
struct EdgeSystem {
  DifferenceFactor factor;
  SpMat to_rows;
};
EdgeSystem build_edges_2d(const Grid2D& grid);
SystemOperator assemble_operator_2d(const Vec& cells, const Grid2D& grid);

/// dA/dr_cell as a dense matrix (small grids / testing only).
Mat operator_derivative_2d(const SystemOperator& op, int cell);

/// 1D: e_1/sqrt(h).
Vec source_vector(const Grid1D& grid);
/// Differences of neighboring cells (seminorm operator for 2D fields).
SpMat cell_difference_2d(const Grid2D& grid);

/// 2D: covered length of each surface vertex's dual face over sqrt(mass).
Vec source_vector(const Grid2D& grid, const Segment& seg);

}  // namespace rominv
