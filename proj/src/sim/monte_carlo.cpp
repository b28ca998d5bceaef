#include "tubeuav/sim/monte_carlo.hpp"

#include <algorithm>
#include <future>
#include <random>
#include <stdexcept>
#include <thread>

namespace tubeuav::sim {
namespace {

// splitmix64 finalizer: decorrelates the plant draw from the noise seed.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

airframe::Perturbation draw_plant(const airframe::UncertaintySpec& spec, PlantSampling how,
                                  std::uint64_t seed) {
  switch (how) {
    case PlantSampling::kNominal:
      return {};
    case PlantSampling::kUniform:
      return airframe::random_perturbation(spec, seed);
    case PlantSampling::kVertex: {
      const auto vertices = airframe::vertex_perturbations(spec);
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<std::size_t> pick(0, vertices.size() - 1);
      return vertices[pick(rng)];
    }
  }
  return {};
}

struct Outcome {
  RunMetrics metrics;
  bool failed = false;
  RunFailure failure;
};

}  // namespace

RunOptions monte_carlo_run_options(const MissionSpec& spec, const MonteCarloOptions& mc, int index,
                                   trmpc::TubeMode mode) {
  RunOptions o = default_run_options(spec);
  o.seed = mc.base_seed + static_cast<std::uint64_t>(index);
  o.plant = draw_plant(spec.uncertainty, mc.plant, mix(o.seed));
  o.tube_mode = mode;
  if (mc.time_cap > 0.0) o.time_cap = mc.time_cap;
  o.record_trace = false;
  return o;
}

MonteCarloSummary monte_carlo(const MissionSpec& spec, const Controllers& controllers,
                              const MonteCarloOptions& options) {
  if (options.runs < 1) throw std::invalid_argument("monte_carlo: runs must be at least 1");
  if (options.modes.empty()) throw std::invalid_argument("monte_carlo: no tube mode selected");
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned parallel = options.max_parallel > 0 ? options.max_parallel : hw;

  struct Job {
    int run;
    trmpc::TubeMode mode;
  };
  std::vector<Job> jobs;
  for (auto mode : options.modes) {
    for (int i = 0; i < options.runs; ++i) jobs.push_back({i, mode});
  }
  std::vector<Outcome> outcomes(jobs.size());

  for (std::size_t begin = 0; begin < jobs.size(); begin += parallel) {
    const std::size_t end = std::min(jobs.size(), begin + parallel);
    std::vector<std::future<Outcome>> futures;
    for (std::size_t j = begin; j < end; ++j) {
      futures.push_back(std::async(std::launch::async, [&, j] {
        Outcome out;
        try {
          out.metrics = run_mission(
              spec, controllers, monte_carlo_run_options(spec, options, jobs[j].run, jobs[j].mode))
                            .metrics;
        } catch (const SimulationError& e) {
          out.failed = true;
          out.failure = {jobs[j].run, e.step(), e.what()};
        } catch (const std::exception& e) {
          out.failed = true;
          out.failure = {jobs[j].run, -1, e.what()};
        }
        return out;
      }));
    }
    for (std::size_t j = begin; j < end; ++j) outcomes[j] = futures[j - begin].get();
  }

  MonteCarloSummary summary;
  for (auto mode : options.modes) {
    ModeSummary s;
    s.mode = mode;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].mode != mode) continue;
      ++s.runs;
      const Outcome& o = outcomes[j];
      if (o.failed) {
        s.failures.push_back(o.failure);
        continue;
      }
      const RunMetrics& m = o.metrics;
      if (m.mission_complete) ++s.completed;
      s.max_abs_err_v_straight = std::max(s.max_abs_err_v_straight, m.max_abs_err_v_straight);
      s.max_abs_err_h_straight = std::max(s.max_abs_err_h_straight, m.max_abs_err_h_straight);
      s.max_abs_cte_straight = std::max(s.max_abs_cte_straight, m.max_abs_cte_straight);
      s.max_abs_err_v = std::max(s.max_abs_err_v, m.max_abs_err_v);
      s.max_abs_err_h = std::max(s.max_abs_err_h, m.max_abs_err_h);
      s.input_violations += m.input_violations;
      s.surface_violations += m.surface_violations;
      s.containment_violations_long += m.containment_violations_long;
      s.containment_violations_lat += m.containment_violations_lat;
      s.infeasible_long += m.infeasible_long;
      s.infeasible_lat += m.infeasible_lat;
      s.mpc_ticks += m.mpc_ticks;
      s.max_solve_seconds = std::max(s.max_solve_seconds, m.max_solve_seconds);
    }
    summary.modes.push_back(std::move(s));
  }
  for (const auto& o : outcomes) summary.runs.push_back(o.metrics);
  return summary;
}

}  // namespace tubeuav::sim
