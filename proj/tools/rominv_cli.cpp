#include "rominv/data_transform.hpp"
#include "rominv/io.hpp"
#include "rominv/optgrid.hpp"
#include "rominv/phantoms.hpp"
#include "rominv/scenarios.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace rominv;
using nlohmann::json;

namespace {

// Flags mirror ExperimentConfig keys; only the ones given end up in the overrides.
struct Flags {
  std::optional<int> n_fine, n_coarse, fine_nx, fine_ny, coarse_nx, coarse_ny, sources, source, realizations, m,
      iterations, discard;
  std::optional<std::string> phantom, family, regularization, coordinates, output, cache_dir;
  std::optional<double> noise, shift, horizon, time_step;
  std::optional<std::uint64_t> seed;
  bool backtracking = false;
  std::string config_file;

  void attach(CLI::App* app) {
    app->add_option("--n-fine", n_fine, "1D data grid size");
    app->add_option("--n-coarse", n_coarse, "1D inversion grid size");
    app->add_option("--fine-nx", fine_nx, "2D data grid cells in x1");
    app->add_option("--fine-ny", fine_ny, "2D data grid cells in x2");
    app->add_option("--coarse-nx", coarse_nx, "2D inversion grid cells in x1");
    app->add_option("--coarse-ny", coarse_ny, "2D inversion grid cells in x2");
    app->add_option("--sources", sources, "number of source segments");
    app->add_option("--source", source, "segment shown by sensmap (0-based)");
    app->add_option("--phantom", phantom, "phantom name");
    app->add_option("--noise", noise, "multiplicative noise level");
    app->add_option("--seed", seed, "noise seed");
    app->add_option("--realizations", realizations, "noise realizations per level");
    app->add_option("-m,--order", m, "initial model order");
    app->add_option("--family", family, "node family: zolotarev, fast, pade0, single");
    app->add_option("--shift", shift, "single interpolation node (2D)");
    app->add_option("--iterations", iterations, "Gauss-Newton iterations");
    app->add_option("--horizon", horizon, "time horizon");
    app->add_option("--time-step", time_step, "sampling step");
    app->add_option("--regularization", regularization, "h1 or adaptive");
    app->add_option("--coordinates", coordinates, "cfrac, spectral or spectral_raw");
    app->add_option("--discard", discard, "smallest KKT components dropped");
    app->add_flag("--backtracking", backtracking, "halve the step until the residual decreases");
    app->add_option("-o,--output", output, "output directory");
    app->add_option("--cache-dir", cache_dir, "optimal grid cache directory");
    app->add_option("-c,--config", config_file, "JSON config; its keys override flags")->check(CLI::ExistingFile);
  }

  json overrides() const {
    json j = json::object();
    auto put = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    put("n_fine", n_fine);
    put("n_coarse", n_coarse);
    put("fine_nx", fine_nx);
    put("fine_ny", fine_ny);
    put("coarse_nx", coarse_nx);
    put("coarse_ny", coarse_ny);
    put("sources", sources);
    put("source", source);
    put("realizations", realizations);
    put("m", m);
    put("iterations", iterations);
    put("discard", discard);
    put("phantom", phantom);
    put("family", family);
    put("regularization", regularization);
    put("coordinates", coordinates);
    put("output", output);
    put("cache_dir", cache_dir);
    put("noise", noise);
    put("shift", shift);
    put("horizon", horizon);
    put("time_step", time_step);
    put("seed", seed);
    if (backtracking) j["backtracking"] = true;
    return j;
  }

  ExperimentConfig config(const std::string& scenario) const {
    ExperimentConfig c = ExperimentConfig::for_scenario(scenario);
    c.merge(overrides());
    if (!config_file.empty()) c.merge(read_json(config_file));
    c.scenario = scenario;
    c.validate();
    return c;
  }
};

void report(const ScenarioOutcome& out, const ExperimentConfig& c) {
  for (const auto& f : out.files) std::cout << c.output << "/" << f << "\n";
  if (!out.summary.is_null()) std::cout << out.summary.dump(2) << "\n";
}

int run_verb(const std::string& scenario, const Flags& flags) {
  const ExperimentConfig c = flags.config(scenario);
  report(run_scenario(c), c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order-model resistivity inversion"};
  app.require_subcommand(1);

  Flags synth_flags, inv1_flags, inv2_flags, grid_flags, cond_flags, sens_flags, scen_flags;
  std::string series_path = "series.csv";
  int stride = 1;
  auto* synth = app.add_subcommand("synthesize", "boundary response of a 1D phantom as CSV (t, d)");
  synth_flags.attach(synth);
  synth->add_option("--series", series_path, "output CSV");
  synth->add_option("--stride", stride, "write every k-th sample")->check(CLI::PositiveNumber);

  auto* inv1 = app.add_subcommand("invert1d", "synthesize on the fine grid and invert on the coarse one");
  inv1_flags.attach(inv1);

  auto* inv2 = app.add_subcommand("invert2d", "2D reconstruction of a phantom (2d-corner, 2d-side, 2d-tilted)");
  inv2_flags.attach(inv2);

  bool fitting = false;
  auto* grids = app.add_subcommand("grids", "optimal grids for m = 5, 10 and all families");
  grid_flags.attach(grids);
  auto* cond = app.add_subcommand("condnum", "Jacobian condition numbers vs m (or fitting matrices with --fitting)");
  cond_flags.attach(cond);
  cond->add_flag("--fitting", fitting, "conditioning of the rational fitting matrices instead");
  auto* sens = app.add_subcommand("sensmap", "2D sensitivity rows and their front radii");
  sens_flags.attach(sens);

  std::string scenario_name;
  bool list = false;
  auto* scen = app.add_subcommand("scenario", "run a named experiment");
  scen_flags.attach(scen);
  scen->add_option("name", scenario_name, "scenario name");
  scen->add_flag("--list", list, "print the scenario names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      ExperimentConfig c = synth_flags.config("1d");
      const TimeSeries d = synthesize_1d(c.phantom, c.n_fine, c.horizon, c.time_step, NoiseModel{c.noise, c.seed});
      CsvTable t{{"t", "d"}, {}};
      for (std::size_t k = 0; k < d.size(); k += static_cast<std::size_t>(stride)) t.add({d.time(k), d.values[k]});
      write_csv(series_path, t);
      std::cout << series_path << "\n";
      return 0;
    }
    if (*inv1) {
      const std::string ph = inv1_flags.phantom.value_or("rQ");
      Flags f = inv1_flags;
      f.phantom = ph;
      return run_verb("1d-" + ph, f);
    }
    if (*inv2) return run_verb(inv2_flags.phantom.value_or("2d-tilted"), inv2_flags);
    if (*grids) return run_verb("fig-grids", grid_flags);
    if (*cond) return run_verb(fitting ? "table-ratcond" : "condnum", cond_flags);
    if (*sens) return run_verb("sensmap", sens_flags);
    if (*scen) {
      if (list || scenario_name.empty()) {
        for (const auto& n : scenario_names()) std::cout << n << "\n";
        return 0;
      }
      return run_verb(scenario_name, scen_flags);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
