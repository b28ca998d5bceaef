#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tubeuav/sim/simloop.hpp"

namespace tubeuav::sim {

enum class PlantSampling { kNominal, kVertex, kUniform };

struct MonteCarloOptions {
  int runs = 100;
  std::uint64_t base_seed = 1;
  PlantSampling plant = PlantSampling::kVertex;
  std::vector<trmpc::TubeMode> modes{trmpc::TubeMode::kConventional};
  /// Overrides the mission time cap when positive.
  double time_cap = 0.0;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned max_parallel = 0;
};

struct RunFailure {
  int run = 0;
  long step = -1;
  std::string message;
};

struct ModeSummary {
  trmpc::TubeMode mode = trmpc::TubeMode::kConventional;
  int runs = 0;
  int completed = 0;
  double max_abs_err_v_straight = 0.0;
  double max_abs_err_h_straight = 0.0;
  double max_abs_cte_straight = 0.0;
  double max_abs_err_v = 0.0;
  double max_abs_err_h = 0.0;
  long input_violations = 0;
  long surface_violations = 0;
  long containment_violations_long = 0;
  long containment_violations_lat = 0;
  long infeasible_long = 0;
  long infeasible_lat = 0;
  long mpc_ticks = 0;
  double max_solve_seconds = 0.0;
  std::vector<RunFailure> failures;
};

struct MonteCarloSummary {
  std::vector<ModeSummary> modes;
  std::vector<RunMetrics> runs;  // per run, modes in order, runs contiguous
};

/// Seed, plant perturbation and mode for run `index` of a campaign.
RunOptions monte_carlo_run_options(const MissionSpec& spec, const MonteCarloOptions& mc, int index,
                                   trmpc::TubeMode mode);

/// Independent runs, executed in parallel batches; the reduction is order independent.
MonteCarloSummary monte_carlo(const MissionSpec& spec, const Controllers& controllers,
                              const MonteCarloOptions& options);

}  // namespace tubeuav::sim
