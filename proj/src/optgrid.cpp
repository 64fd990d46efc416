#include "rominv/optgrid.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace rominv {

namespace {

std::string cache_key(const NodeFamily& family, int n) {
  std::ostringstream os;
  os << std::setprecision(17) << "n=" << n << ";label=" << family.label;
  for (std::size_t j = 0; j < family.nodes.size(); ++j) os << ";" << family.nodes[j] << "^" << family.multiplicity[j];
  std::ostringstream name;
  name << "refgrid-" << std::hex << std::hash<std::string>{}(os.str()) << ".txt";
  return name.str();
}

bool load_steps(const std::filesystem::path& p, int m, Vec& k, Vec& kh) {
  std::ifstream in(p);
  if (!in) return false;
  int mm = 0;
  if (!(in >> mm) || mm != m) return false;
  k.resize(m);
  kh.resize(m);
  for (int j = 0; j < m; ++j)
    if (!(in >> k[j] >> kh[j])) return false;
  return true;
}

void store_steps(const std::filesystem::path& p, const Vec& k, const Vec& kh) {
  // write to a temp name then rename so readers never see a partial file
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << k.size() << "\n" << std::setprecision(17);
    for (int j = 0; j < k.size(); ++j) out << k[j] << " " << kh[j] << "\n";
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace

OptimalGrid reference_grid(const NodeFamily& family, int n, const std::string& cache_dir,
                           Orthogonalization method) {
  const int m = family.order();
  OptimalGrid g;
  g.family = family.label;
  bool cached = false;
  std::filesystem::path path;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    path = std::filesystem::path(cache_dir) / cache_key(family, n);
    cached = load_steps(path, m, g.kappa0, g.kappa_hat0);
  }
  if (!cached) {
    const Grid1D grid = Grid1D::make(n);
    const auto cf = ContinuedFraction::from_logs(preconditioner_R(Vec::Ones(n), family, grid, method));
    g.kappa0 = cf.kappa;
    g.kappa_hat0 = cf.kappa_hat;
    if (!path.empty()) store_steps(path, g.kappa0, g.kappa_hat0);
  }
  g.primary.resize(m);
  g.dual.resize(m);
  double x = 0.0, xh = 0.0;
  for (int j = 0; j < m; ++j) {
    x += g.kappa0[j];
    xh += g.kappa_hat0[j];
    g.primary[j] = x;
    g.dual[j] = xh;
  }
  return g;
}

Interlacing check_interlacing(const OptimalGrid& grid, double tol) {
  const int m = grid.order();
  std::vector<double> seq{0.0};
  for (int j = 0; j < m; ++j) {
    seq.push_back(grid.dual[j]);
    seq.push_back(grid.primary[j]);
  }
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (!(seq[i] > seq[i - 1])) return {false, static_cast<int>(i)};
  if (!(seq.back() <= 1.0 + tol)) return {false, static_cast<int>(seq.size())};
  return {};
}

RatioReconstruction ratio_reconstruction(const ContinuedFraction& cf, const OptimalGrid& grid) {
  const int m = grid.order();
  if (cf.order() != m) throw InputError("continued fraction and grid orders differ");
  RatioReconstruction out;
  out.zeta = (grid.kappa0.array() / cf.kappa.array()).square();
  out.zeta_hat = (cf.kappa_hat.array() / grid.kappa_hat0.array()).square();
  out.zeta_tilde = (out.zeta.array() * out.zeta_hat.array()).sqrt();
  out.x_primary = grid.primary;
  out.x_dual = grid.dual;
  return out;
}

}  // namespace rominv
