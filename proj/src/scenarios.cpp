#include "rominv/scenarios.hpp"

#include "rominv/data_transform.hpp"
#include "rominv/io.hpp"
#include "rominv/optgrid.hpp"
#include "rominv/phantoms.hpp"
#include "rominv/sensitivity.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>

#ifndef ROMINV_VERSION
#define ROMINV_VERSION "0.0.0"
#endif

namespace rominv {

using nlohmann::json;

const char* library_version() { return ROMINV_VERSION; }

std::vector<std::string> scenario_names() {
  return {"1d",     "1d-rQ",      "1d-rL",        "1d-rJ",    "high-contrast", "table-ratcond",
          "fig-grids", "condnum", "ratios",       "ratios-contrast20", "noise-ladder", "2d-corner",
          "2d-side", "2d-tilted", "sensmap",      "shift-sweep"};
}

ExperimentConfig ExperimentConfig::for_scenario(const std::string& name) {
  ExperimentConfig c;
  c.scenario = name;
  if (name.rfind("1d-", 0) == 0) c.phantom = name.substr(3);
  // piecewise constant media get the edge-preserving weights
  if (c.phantom == "rJ") c.regularization = "adaptive";
  if (name == "high-contrast") {
    c.phantom = "rH";
    c.m = 5;
    c.iterations = 10;
    c.regularization = "adaptive";
  } else if (name == "table-ratcond") {
    c.phantom = "const";
    c.n_fine = 299;
  } else if (name == "fig-grids" || name == "condnum" || name == "ratios" || name == "ratios-contrast20") {
    c.n_fine = 1999;
    c.m = name == "condnum" ? 8 : 10;
    if (name == "ratios-contrast20") c.phantom = "r20";
  } else if (name == "noise-ladder") {
    c.phantom = "rQ";
  } else if (name.rfind("2d-", 0) == 0 || name == "sensmap" || name == "shift-sweep") {
    c.phantom = name.rfind("2d-", 0) == 0 ? name : "uniform";
    c.m = 5;
    c.iterations = 1;
    c.family = "single";
  }
  return c;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

Coordinates parse_coords(const std::string& s) {
  if (s == "cfrac") return Coordinates::continued_fraction;
  if (s == "spectral") return Coordinates::spectral;
  if (s == "spectral_raw") return Coordinates::spectral_raw;
  throw InputError("unknown coordinates '" + s + "' (cfrac, spectral, spectral_raw)");
}

}  // namespace

void ExperimentConfig::merge(const json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  const json known = to_json();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw InputError("unknown config key '" + it.key() + "'");
  try {
    take(j, "scenario", scenario);
    take(j, "n_fine", n_fine);
    take(j, "n_coarse", n_coarse);
    take(j, "fine_nx", fine_nx);
    take(j, "fine_ny", fine_ny);
    take(j, "coarse_nx", coarse_nx);
    take(j, "coarse_ny", coarse_ny);
    take(j, "sources", sources);
    take(j, "source", source);
    take(j, "phantom", phantom);
    take(j, "noise", noise);
    take(j, "seed", seed);
    take(j, "realizations", realizations);
    take(j, "m", m);
    take(j, "family", family);
    take(j, "shift", shift);
    take(j, "iterations", iterations);
    take(j, "horizon", horizon);
    take(j, "time_step", time_step);
    take(j, "regularization", regularization);
    take(j, "coordinates", coordinates);
    take(j, "discard", discard);
    take(j, "backtracking", backtracking);
    take(j, "output", output);
    take(j, "cache_dir", cache_dir);
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
}

json ExperimentConfig::to_json() const {
  return json{{"scenario", scenario},
              {"n_fine", n_fine},
              {"n_coarse", n_coarse},
              {"fine_nx", fine_nx},
              {"fine_ny", fine_ny},
              {"coarse_nx", coarse_nx},
              {"coarse_ny", coarse_ny},
              {"sources", sources},
              {"source", source},
              {"phantom", phantom},
              {"noise", noise},
              {"seed", seed},
              {"realizations", realizations},
              {"m", m},
              {"family", family},
              {"shift", shift},
              {"iterations", iterations},
              {"horizon", horizon},
              {"time_step", time_step},
              {"regularization", regularization},
              {"coordinates", coordinates},
              {"discard", discard},
              {"backtracking", backtracking},
              {"output", output},
              {"cache_dir", cache_dir}};
}

void ExperimentConfig::validate() const {
  if (n_fine < 2 || n_coarse < 2) throw InputError("1D grids need at least two points");
  if (n_fine == n_coarse) throw InputError("data and inversion grids must differ (1D)");
  if (fine_nx < 2 || fine_ny < 1 || coarse_nx < 2 || coarse_ny < 1) throw InputError("2D grids too small");
  if (fine_nx == coarse_nx && fine_ny == coarse_ny) throw InputError("data and inversion grids must differ (2D)");
  if (sources < 1) throw InputError("need at least one source");
  if (source < 0 || source >= sources) throw InputError("source index out of range");
  if (!(noise >= 0)) throw InputError("noise level must be nonnegative");
  if (realizations < 1) throw InputError("need at least one realization");
  if (!(shift > 0)) throw InputError("shift must be positive");
  if (!(horizon > 0 && time_step > 0 && time_step < horizon)) throw InputError("bad time axis");
  if (regularization != "h1" && regularization != "adaptive")
    throw InputError("regularization must be h1 or adaptive");
  parse_coords(coordinates);
  if (output.empty()) throw InputError("output directory is empty");
  inversion().validate();
}

InversionConfig ExperimentConfig::inversion() const {
  InversionConfig ic;
  ic.m = m;
  ic.family = family;
  ic.iterations = iterations;
  ic.regularization = regularization == "adaptive" ? Regularization::adaptive : Regularization::h1;
  ic.discard = discard;
  ic.backtracking = backtracking;
  ic.coords = parse_coords(coordinates);
  ic.single_shift = shift;
  return ic;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TimeSeries synthesize_1d(const std::string& phantom, int n, double horizon, double step, const NoiseModel& noise) {
  const Grid1D g = Grid1D::make(n);
  const SystemOperator op = assemble_operator(phantom_1d(phantom, g), build_difference_1d(g));
  return add_noise(simulate_response(op.A, source_vector(g), horizon, step), noise);
}

std::vector<ConditionRow> condition_table(const TimeSeries& d, int m_min, int m_max) {
  if (m_min < 1 || m_max < m_min) throw InputError("bad order range");
  std::vector<ConditionRow> out;
  for (int m = m_min; m <= m_max; ++m) {
    const NodeFamily fam = NodeFamily::zolotarev(m);
    const LaplaceData ld = laplace_at(d, fam.nodes);
    ConditionRow row;
    row.m = m;
    row.multipoint = fit_multipoint(ld.value, ld.derivative, fam.nodes).cond;
    row.toeplitz = fit_pade_toeplitz(laplace_moments(d, 0.0, 2 * m), 0.0, 1.0).cond;
    out.push_back(row);
  }
  return out;
}

namespace {

double condition(const Mat& J) {
  Eigen::BDCSVD<Mat> svd(J);
  const Vec& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

}  // namespace

double jacobian_condition(const NodeFamily& family, int n) {
  const Grid1D g = Grid1D::make(n);
  const SystemOperator op = assemble_operator(Vec::Ones(n), build_difference_1d(g));
  return condition(assemble_jacobian(op, source_vector(g), family, Orthogonalization::automatic).J);
}

double stacked_condition_2d(const Grid2D& grid, int m, double shift) {
  return condition(stacked_jacobian_2d(Vec::Ones(grid.cells()), grid, NodeFamily::single_node(shift, m)).J);
}

int terminal_order(const TimeSeries& d, const std::string& family, int m0) {
  try {
    return data_fitting_Q(d, family, m0).m;
  } catch (const DataUnusable&) {
    return 0;
  }
}

SensitivityFronts sensitivity_fronts(const Grid2D& grid, int source, int m, double shift) {
  grid.validate();
  if (source < 0 || source >= static_cast<int>(grid.segments.size())) throw InputError("source index out of range");
  const Segment& seg = grid.segments[source];
  const SystemOperator op = assemble_operator_2d(Vec::Ones(grid.cells()), grid);
  SensitivityFronts f;
  f.rows = assemble_jacobian(op, source_vector(grid, seg), NodeFamily::single_node(shift, m),
                             Orthogonalization::automatic).J;
  const double mid = 0.5 * (seg.begin + seg.end);
  Vec dist(grid.cells());
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      dist[grid.index(ix, iy)] = std::hypot((ix + 0.5) * grid.hx() - mid, (iy + 0.5) * grid.hy());
  auto radius = [&](int row) {
    const Vec w = f.rows.row(row).cwiseAbs().transpose();
    return w.dot(dist) / w.sum();
  };
  const int mm = static_cast<int>(f.rows.rows()) / 2;
  f.radius_kappa.resize(mm);
  f.radius_kappa_hat.resize(mm);
  for (int l = 0; l < mm; ++l) {
    f.radius_kappa[l] = radius(l);
    f.radius_kappa_hat[l] = radius(mm + l);
  }
  return f;
}

std::vector<Vec> moments_2d(const Vec& cells, const Grid2D& grid, double shift, int count) {
  const SystemOperator op = assemble_operator_2d(cells, grid);
  std::vector<Vec> out;
  for (const auto& seg : grid.segments) out.push_back(transfer_moments(op.A, source_vector(grid, seg), shift, count));
  return out;
}

InclusionStats inclusion_stats(const Vec& field, const std::vector<char>& mask) {
  if (static_cast<Eigen::Index>(mask.size()) != field.size()) throw InputError("mask size mismatch");
  InclusionStats s;
  s.inclusion_max = -INFINITY;
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < field.size(); ++i) {
    if (mask[i]) {
      s.inclusion_max = std::max(s.inclusion_max, field[i]);
    } else {
      sum += field[i];
      ++count;
    }
  }
  s.background_mean = count ? sum / count : NAN;
  return s;
}

namespace {

struct Run {
  const ExperimentConfig& cfg;
  ScenarioOutcome out;

  std::string path(const std::string& name) const { return (std::filesystem::path(cfg.output) / name).string(); }
  void csv(const std::string& name, const CsvTable& t) {
    write_csv(path(name), t);
    out.files.push_back(name);
  }
  void pgm(const std::string& name, const Vec& field, int w, int h) {
    write_pgm(path(name), render_heatmap(field, w, h));
    out.files.push_back(name);
  }
};

CsvTable history_table(const InversionResult& res) {
  CsvTable t{{"iteration", "residual", "error", "step", "preservation"}, {}};
  t.add({0, res.initial_residual, NAN, 0, 0});
  for (const auto& h : res.history) t.add({double(h.iteration), h.residual, h.error, h.step, h.preservation});
  return t;
}

double final_error(const InversionResult& res) { return res.history.empty() ? NAN : res.history.back().error; }

json history_json(const InversionResult& res) {
  return json{{"m", res.m},
              {"iterations", res.history.size()},
              {"initial_residual", res.initial_residual},
              {"final_residual", res.history.empty() ? res.initial_residual : res.history.back().residual},
              {"error", final_error(res)},
              {"stagnated", res.stagnated}};
}

InversionResult invert_phantom_1d(const ExperimentConfig& c, const InversionConfig& ic) {
  const TimeSeries d = synthesize_1d(c.phantom, c.n_fine, c.horizon, c.time_step, NoiseModel{c.noise, c.seed});
  const Grid1D g = Grid1D::make(c.n_coarse);
  return invert_1d(d, g, ic, phantom_1d(c.phantom, g));
}

void scenario_1d(Run& run) {
  const auto& c = run.cfg;
  const InversionResult res = invert_phantom_1d(c, c.inversion());
  const Grid1D g = Grid1D::make(c.n_coarse);
  const Vec x = g.coordinates(), truth = phantom_1d(c.phantom, g);
  CsvTable prof{{"x", "truth", "recovered"}, {}};
  for (int i = 0; i < g.n; ++i) prof.add({x[i], truth[i], res.r[i]});
  run.csv("profile.csv", prof);
  run.csv("history.csv", history_table(res));
  run.out.summary = history_json(res);
  run.out.summary["phantom"] = c.phantom;
}

void scenario_high_contrast(Run& run) {
  const auto& c = run.cfg;
  const InversionConfig ic = c.inversion();
  InversionConfig base = ic;
  base.coords = Coordinates::spectral;
  const InversionResult res = invert_phantom_1d(c, ic);
  const Grid1D g = Grid1D::make(c.n_coarse);
  const Vec x = g.coordinates(), truth = phantom_1d(c.phantom, g);
  json baseline;
  CsvTable prof{{"x", "truth", "recovered", "baseline"}, {}};
  try {
    const InversionResult b = invert_phantom_1d(c, base);
    for (int i = 0; i < g.n; ++i) prof.add({x[i], truth[i], res.r[i], b.r[i]});
    run.csv("history_baseline.csv", history_table(b));
    baseline = history_json(b);
  } catch (const Error& e) {
    for (int i = 0; i < g.n; ++i) prof.add({x[i], truth[i], res.r[i], NAN});
    baseline = json{{"failed", e.what()}};
  }
  run.csv("profile.csv", prof);
  run.csv("history.csv", history_table(res));
  run.out.summary = json{{"cfrac", history_json(res)}, {"baseline", baseline}};
}

void scenario_table(Run& run) {
  const auto& c = run.cfg;
  const TimeSeries d = synthesize_1d(c.phantom, c.n_fine, c.horizon, c.time_step);
  CsvTable t{{"m", "cond_multipoint", "cond_toeplitz"}, {}};
  for (const auto& row : condition_table(d, 2, c.m)) t.add({double(row.m), row.multipoint, row.toeplitz});
  run.csv("table_ratcond.csv", t);
}

void scenario_grids(Run& run) {
  const auto& c = run.cfg;
  json summary;
  for (int m : {5, 10}) {
    for (const std::string fam : {"zolotarev", "pade0", "fast"}) {
      const OptimalGrid og = reference_grid(NodeFamily::by_name(fam, m), c.n_fine, c.cache_dir);
      CsvTable t{{"j", "node_primary", "node_dual", "step_primary", "step_dual"}, {}};
      for (int j = 0; j < m; ++j) t.add({double(j + 1), og.primary[j], og.dual[j], og.kappa0[j], og.kappa_hat0[j]});
      run.csv("grid_" + fam + "_m" + std::to_string(m) + ".csv", t);
      const Interlacing il = check_interlacing(og);
      summary[fam + "_m" + std::to_string(m)] = json{{"interlaced", il.ok}, {"first_violation", il.first_violation}};
    }
  }
  run.out.summary = summary;
}

void scenario_condnum(Run& run) {
  const auto& c = run.cfg;
  CsvTable t{{"m", "zolotarev", "pade0", "fast"}, {}};
  for (int m = 2; m <= c.m; ++m) {
    std::vector<double> row{double(m)};
    for (const std::string fam : {"zolotarev", "pade0", "fast"})
      row.push_back(jacobian_condition(NodeFamily::by_name(fam, m), c.n_fine));
    t.add(row);
  }
  run.csv("cond_jacobian.csv", t);
}

void ratio_file(Run& run, const std::string& phantom) {
  const auto& c = run.cfg;
  const NodeFamily fam = NodeFamily::by_name(c.family, c.m, c.shift);
  const OptimalGrid og = reference_grid(fam, c.n_fine, c.cache_dir);
  const Grid1D g = Grid1D::make(c.n_fine);
  const auto cf = ContinuedFraction::from_logs(
      preconditioner_R(phantom_1d(phantom, g), fam, g, Orthogonalization::automatic));
  const RatioReconstruction rr = ratio_reconstruction(cf, og);
  CsvTable t{{"node_primary", "node_dual", "zeta", "zeta_hat", "zeta_tilde", "r_primary", "r_dual"}, {}};
  for (int j = 0; j < c.m; ++j)
    t.add({rr.x_primary[j], rr.x_dual[j], rr.zeta[j], rr.zeta_hat[j], rr.zeta_tilde[j],
           phantom_1d(phantom, rr.x_primary[j]), phantom_1d(phantom, rr.x_dual[j])});
  run.csv("ratios_" + phantom + ".csv", t);
}

void scenario_ratios(Run& run) {
  if (run.cfg.scenario == "ratios")
    for (const std::string p : {"rQ", "rL", "rJ"}) ratio_file(run, p);
  else
    ratio_file(run, run.cfg.phantom);
}

void scenario_ladder(Run& run) {
  const auto& c = run.cfg;
  const TimeSeries y = synthesize_1d(c.phantom, c.n_fine, c.horizon, c.time_step);
  CsvTable t{{"noise", "seed", "m"}, {}};
  json summary;
  for (double eps : {5e-2, 5e-3, 1e-4, 0.0}) {
    std::map<int, int> hist;
    for (int k = 0; k < c.realizations; ++k) {
      const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
      const int m = terminal_order(add_noise(y, NoiseModel{eps, seed}), c.family, c.m);
      t.add({eps, double(seed), double(m)});
      ++hist[m];
    }
    json h;
    for (auto [m, n] : hist) h[std::to_string(m)] = n;
    summary[format_number(eps)] = h;
  }
  run.csv("ladder.csv", t);
  run.out.summary = summary;
}

Grid2D fine_2d(const ExperimentConfig& c) {
  return Grid2D::make(c.fine_nx, c.fine_ny, 3.0, 1.0, 1.0, 2.0, c.sources);
}
Grid2D coarse_2d(const ExperimentConfig& c) {
  return Grid2D::make(c.coarse_nx, c.coarse_ny, 3.0, 1.0, 1.0, 2.0, c.sources);
}

void scenario_2d(Run& run) {
  const auto& c = run.cfg;
  const Grid2D gf = fine_2d(c), gc = coarse_2d(c);
  const Vec truth = phantom_2d(c.phantom, gc);
  const auto moments = moments_2d(phantom_2d(c.phantom, gf), gf, c.shift, 2 * c.m);
  const InversionResult res = invert_2d_moments(moments, gc, c.inversion(), truth);
  CsvTable t{{"ix", "iy", "x1", "x2", "truth", "recovered"}, {}};
  for (int iy = 0; iy < gc.ny; ++iy)
    for (int ix = 0; ix < gc.nx; ++ix) {
      const int k = gc.index(ix, iy);
      t.add({double(ix), double(iy), (ix + 0.5) * gc.hx(), (iy + 0.5) * gc.hy(), truth[k], res.r[k]});
    }
  run.csv("field.csv", t);
  run.csv("history.csv", history_table(res));
  run.pgm("recovered.pgm", res.r, gc.nx, gc.ny);
  run.pgm("truth.pgm", truth, gc.nx, gc.ny);
  run.out.summary = history_json(res);
  const InclusionStats st = inclusion_stats(res.r, inclusion_mask(c.phantom, gc));
  run.out.summary["inclusion_max"] = st.inclusion_max;
  run.out.summary["background_mean"] = st.background_mean;
}

void scenario_sensmap(Run& run) {
  const auto& c = run.cfg;
  const Grid2D gc = coarse_2d(c);
  const SensitivityFronts f = sensitivity_fronts(gc, c.source, c.m, c.shift);
  const int m = static_cast<int>(f.radius_kappa.size());
  CsvTable t{{"l", "radius_kappa", "radius_kappa_hat"}, {}};
  for (int l = 0; l < m; ++l) {
    t.add({double(l + 1), f.radius_kappa[l], f.radius_kappa_hat[l]});
    run.pgm("sens_kappa_" + std::to_string(l + 1) + ".pgm", f.rows.row(l).transpose(), gc.nx, gc.ny);
    run.pgm("sens_kappa_hat_" + std::to_string(l + 1) + ".pgm", f.rows.row(m + l).transpose(), gc.nx, gc.ny);
  }
  run.csv("fronts.csv", t);
}

void scenario_shift_sweep(Run& run) {
  const auto& c = run.cfg;
  const Grid2D gc = coarse_2d(c);
  CsvTable t{{"shift", "cond_stacked"}, {}};
  for (double s : {20.0, 60.0, 180.0}) t.add({s, stacked_condition_2d(gc, c.m, s)});
  run.csv("shift_sweep.csv", t);
}

}  // namespace

ScenarioOutcome run_scenario(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Run run{config, {}};
  const std::string& s = config.scenario;
  if (s == "1d" || s.rfind("1d-", 0) == 0)
    scenario_1d(run);
  else if (s == "high-contrast")
    scenario_high_contrast(run);
  else if (s == "table-ratcond")
    scenario_table(run);
  else if (s == "fig-grids")
    scenario_grids(run);
  else if (s == "condnum")
    scenario_condnum(run);
  else if (s == "ratios" || s == "ratios-contrast20")
    scenario_ratios(run);
  else if (s == "noise-ladder")
    scenario_ladder(run);
  else if (s == "2d-corner" || s == "2d-side" || s == "2d-tilted")
    scenario_2d(run);
  else if (s == "sensmap")
    scenario_sensmap(run);
  else if (s == "shift-sweep")
    scenario_shift_sweep(run);
  else
    throw InputError("unknown scenario '" + s + "'");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json cfg = config.to_json();
  write_json(run.path("manifest.json"), json{{"scenario", s},
                                             {"config", cfg},
                                             {"config_hash", config_hash(cfg)},
                                             {"version", library_version()},
                                             {"wall_time_s", wall},
                                             {"files", run.out.files},
                                             {"summary", run.out.summary}});
  run.out.files.push_back("manifest.json");
  return run.out;
}

}  // namespace rominv
