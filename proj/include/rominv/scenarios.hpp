#pragma once

#include "rominv/core.hpp"
#include "rominv/fine_grid.hpp"
#include "rominv/forward_sim.hpp"
#include "rominv/inversion.hpp"
#include "rominv/rational_fit.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rominv {

/// Everything a scenario run depends on. JSON keys match the field names.
struct ExperimentConfig {
  std::string scenario = "1d";
  // 1D data grid and inversion grid
  int n_fine = 299;
  int n_coarse = 199;
  // 2D data grid and inversion grid, number of source segments
  int fine_nx = 120;
  int fine_ny = 40;
  int coarse_nx = 90;
  int coarse_ny = 30;
  int sources = 8;
  int source = 0;  // segment shown by sensmap
  std::string phantom = "rQ";
  double noise = 0.0;
  std::uint64_t seed = 0;
  int realizations = 10;
  int m = 6;
  std::string family = "zolotarev";
  double shift = 60.0;  // single node of the 2D family
  int iterations = 5;
  double horizon = 100.0;
  double time_step = 1e-5;
  std::string regularization = "h1";     // h1 | adaptive
  std::string coordinates = "cfrac";     // cfrac | spectral | spectral_raw
  int discard = 1;
  bool backtracking = false;
  std::string output = "out";
  std::string cache_dir;  // optimal-grid cache, empty disables it

  /// Scenario defaults (orders, phantoms, iteration counts).
  static ExperimentConfig for_scenario(const std::string& name);
  /// Overwrite fields present in `j`; unknown keys are an error.
  void merge(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  InversionConfig inversion() const;
};

std::vector<std::string> scenario_names();

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

const char* library_version();

struct ScenarioOutcome {
  std::vector<std::string> files;  // relative to the output directory
  nlohmann::json summary;
};

/// Runs the named scenario, writes CSV/PGM artifacts and manifest.json into
/// config.output. Outputs other than the manifest are deterministic.
ScenarioOutcome run_scenario(const ExperimentConfig& config);

// Building blocks shared by the scenarios, the CLI and the acceptance run.

/// Noiseless or noisy boundary response of a 1D phantom on an n-point grid.
TimeSeries synthesize_1d(const std::string& phantom, int n, double horizon, double step,
                         const NoiseModel& noise = {});

struct ConditionRow {
  int m = 0;
  double multipoint = 0.0;  // Zolotarev nodes, values and derivatives
  double toeplitz = 0.0;    // Taylor coefficients at s = 0
};

/// Conditioning of both fitting matrices built from measured data, m = m_min..m_max.
std::vector<ConditionRow> condition_table(const TimeSeries& d, int m_min, int m_max);

/// sigma_max / sigma_min of the Jacobian at r = 1 on an n-point grid.
double jacobian_condition(const NodeFamily& family, int n);

/// Condition number of the stacked 2D Jacobian at r = 1.
double stacked_condition_2d(const Grid2D& grid, int m, double shift);

/// m-reduction outcome of the 1D data fit.
int terminal_order(const TimeSeries& d, const std::string& family, int m0);

/// Jacobian rows of one source in the uniform medium, and for each row the
/// sensitivity-weighted mean distance of the cells from the segment midpoint.
struct SensitivityFronts {
  Mat rows;              // 2m x cells: log kappa rows, then log kappa_hat rows
  Vec radius_kappa;      // m
  Vec radius_kappa_hat;  // m
};
SensitivityFronts sensitivity_fronts(const Grid2D& grid, int source, int m, double shift);

/// Taylor coefficients at `shift` of every source of the 2D model `cells`.
std::vector<Vec> moments_2d(const Vec& cells, const Grid2D& grid, double shift, int count);

/// Max over the inclusion and mean over the rest of a recovered field.
struct InclusionStats {
  double inclusion_max = 0.0;
  double background_mean = 0.0;
};
InclusionStats inclusion_stats(const Vec& field, const std::vector<char>& mask);

}  // namespace rominv
