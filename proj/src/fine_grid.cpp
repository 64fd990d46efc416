#include "rominv/fine_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rominv {

namespace {

DifferenceFactor from_rows(std::vector<std::vector<std::pair<int, double>>> rows,
                           std::vector<char> interior, int n_cols) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    for (auto [j, v] : rows[i]) trip.emplace_back(i, j, v);
  DifferenceFactor f;
  f.D.resize(static_cast<int>(rows.size()), n_cols);
  f.D.setFromTriplets(trip.begin(), trip.end());
  f.rows = std::move(rows);
  f.interior = std::move(interior);
  return f;
}

void require_positive(const Vec& r) {
  for (int i = 0; i < r.size(); ++i)
    if (!(r[i] > 0.0))
      throw InputError("resistivity must be positive, entry " + std::to_string(i) + " is " +
                       std::to_string(r[i]));
}

}  // namespace

Grid1D Grid1D::make(int n_points) {
  if (n_points < 2) throw InputError("1D grid needs at least 2 points");
  return Grid1D{n_points, 1.0 / (n_points + 1)};
}

Vec Grid1D::coordinates() const {
  Vec x(n);
  for (int k = 0; k < n; ++k) x[k] = (k + 1) * h;
  return x;
}

void Grid2D::validate() const {
  if (nx < 2 || ny < 2) throw InputError("2D grid needs at least 2x2 cells");
  if (!(lx > 0 && ly > 0)) throw InputError("2D domain extents must be positive");
  const double tol = 1e-12 * lx;
  for (const auto& s : segments) {
    if (!(s.end > s.begin)) throw InputError("empty boundary segment");
    if (s.begin < access_begin - tol || s.end > access_end + tol)
      throw InputError("segment outside the accessible boundary");
  }
  for (std::size_t i = 0; i < segments.size(); ++i)
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const auto& a = segments[i];
      const auto& b = segments[j];
      if (std::min(a.end, b.end) - std::max(a.begin, b.begin) > tol)
        throw InputError("boundary segments overlap");
    }
}

Grid2D Grid2D::make(int nx, int ny, double lx, double ly, double a0, double a1, int n_sources) {
  Grid2D g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  g.access_begin = a0;
  g.access_end = a1;
  const double w = (a1 - a0) / n_sources;
  for (int j = 0; j < n_sources; ++j) g.segments.push_back({a0 + j * w, a0 + (j + 1) * w});
  g.validate();
  return g;
}

DifferenceFactor build_difference_1d(const Grid1D& grid) {
  if (grid.n < 2) throw InputError("1D grid needs at least 2 points");
  const int n = grid.n;
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  std::vector<char> interior(n, 1);
  for (int i = 0; i < n; ++i) {
    rows[i].push_back({i, -1.0 / grid.h});
    if (i + 1 < n) rows[i].push_back({i + 1, 1.0 / grid.h});
  }
  interior[n - 1] = 0;  // Dirichlet closure at x = 1
  return from_rows(std::move(rows), std::move(interior), n);
}

SystemOperator assemble_operator(const Vec& r, const DifferenceFactor& factor) {
  if (r.size() != factor.n_rows()) throw InputError("resistivity length does not match the grid");
  require_positive(r);
  SystemOperator op;
  op.factor = factor;
  op.to_rows.resize(r.size(), r.size());
  op.to_rows.setIdentity();
  op.row_values = r;
  op.A = -(factor.D.transpose() * r.asDiagonal() * factor.D);
  op.A.makeCompressed();
  return op;
}

Vec operator_derivative(const DifferenceFactor& factor, int k) {
  if (k < 0 || k >= factor.n_rows()) throw InputError("operator_derivative: index out of range");
  Vec d = Vec::Zero(factor.n_cols());
  for (auto [j, v] : factor.rows[k]) d[j] = v;
  return d;
}

NodeLayout::NodeLayout(const Grid2D& grid) : nx(grid.nx), ny(grid.ny), id((grid.nx + 1) * (grid.ny + 1), -1) {
  grid.validate();
  const double tol = 1e-9 * grid.hx();
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      if (j == 0) {
        const double x = i * grid.hx();
        if (x < grid.access_begin - tol || x > grid.access_end + tol) continue;  // grounded surface
      }
      id[j * (nx + 1) + i] = count++;
    }
}

EdgeSystem build_edges_2d(const Grid2D& grid) {
  const NodeLayout nodes(grid);
  const double hx = grid.hx(), hy = grid.hy();
  auto inv_sqrt_mass = [&](int j) { return 1.0 / std::sqrt(hx * hy * (j == 0 ? 0.5 : 1.0)); };
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<char> interior;
  std::vector<Eigen::Triplet<double>> avg;

  // Edge between nodes (i0,j0) and (i1,j1) with conductance scale s^2 and the
  // cells sharing its dual face.
  auto edge = [&](int i0, int j0, int i1, int j1, double s, const std::vector<int>& cells) {
    const int p = nodes.at(i0, j0), q = nodes.at(i1, j1);
    if (p < 0 && q < 0) return;
    const int row = static_cast<int>(rows.size());
    std::vector<std::pair<int, double>> d;
    if (p >= 0) d.push_back({p, -s * inv_sqrt_mass(j0)});
    if (q >= 0) d.push_back({q, s * inv_sqrt_mass(j1)});
    rows.push_back(std::move(d));
    interior.push_back(p >= 0 && q >= 0);
    for (int c : cells) avg.emplace_back(row, c, 1.0 / cells.size());
  };

  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      std::vector<int> cells{grid.index(i, j)};
      if (j > 0) cells.push_back(grid.index(i, j - 1));
      edge(i, j, i + 1, j, std::sqrt(0.5 * hy * cells.size() / hx), cells);
    }
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i)
      edge(i, j, i, j + 1, std::sqrt(hx / hy), {grid.index(i - 1, j), grid.index(i, j)});

  EdgeSystem es;
  const int n_rows = static_cast<int>(rows.size());
  es.factor = from_rows(std::move(rows), std::move(interior), nodes.count);
  es.to_rows.resize(n_rows, grid.cells());
  es.to_rows.setFromTriplets(avg.begin(), avg.end());
  return es;
}

SystemOperator assemble_operator_2d(const Vec& cells, const Grid2D& grid) {
  if (cells.size() != grid.cells()) throw InputError("cell field size does not match the grid");
  require_positive(cells);
  EdgeSystem es = build_edges_2d(grid);
  SystemOperator op;
  op.row_values = es.to_rows * cells;
  op.A = -(es.factor.D.transpose() * op.row_values.asDiagonal() * es.factor.D);
  op.A.makeCompressed();
  op.factor = std::move(es.factor);
  op.to_rows = std::move(es.to_rows);
  return op;
}

Mat operator_derivative_2d(const SystemOperator& op, int cell) {
  const int n = op.factor.n_cols();
  if (cell < 0 || cell >= op.to_rows.cols()) throw InputError("cell index out of range");
  Mat dA = Mat::Zero(n, n);
  for (SpMat::InnerIterator it(op.to_rows, cell); it; ++it) {
    Vec d = operator_derivative(op.factor, static_cast<int>(it.row()));
    dA -= it.value() * d * d.transpose();
  }
  return dA;
}

SpMat cell_difference_2d(const Grid2D& grid) {
  std::vector<Eigen::Triplet<double>> t;
  int row = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i, ++row) {
      t.emplace_back(row, grid.index(i - 1, j), -1.0 / grid.hx());
      t.emplace_back(row, grid.index(i, j), 1.0 / grid.hx());
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i, ++row) {
      t.emplace_back(row, grid.index(i, j - 1), -1.0 / grid.hy());
      t.emplace_back(row, grid.index(i, j), 1.0 / grid.hy());
    }
  SpMat D(row, grid.cells());
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

Vec source_vector(const Grid1D& grid) {
  Vec b = Vec::Zero(grid.n);
  b[0] = 1.0 / std::sqrt(grid.h);
  return b;
}

Vec source_vector(const Grid2D& grid, const Segment& seg) {
  const double tol = 1e-12 * grid.lx;
  if (seg.begin < grid.access_begin - tol || seg.end > grid.access_end + tol || !(seg.end > seg.begin))
    throw InputError("segment outside the accessible boundary");
  const NodeLayout nodes(grid);
  const double hx = grid.hx(), hy = grid.hy();
  // flux through the dual boundary face of each surface node, scaled by 1/sqrt(mass)
  Vec b = Vec::Zero(nodes.count);
  for (int i = 1; i < grid.nx; ++i) {
    const int p = nodes.at(i, 0);
    if (p < 0) continue;
    const double lo = std::max(seg.begin, (i - 0.5) * hx);
    const double hi = std::min(seg.end, (i + 0.5) * hx);
    if (hi > lo) b[p] = (hi - lo) / std::sqrt(0.5 * hx * hy);
  }
  return b;
}

}  // namespace rominv
