#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plume/control.hpp"
#include "plume/environment.hpp"
#include "plume/markov_field.hpp"
#include "plume/rbpf.hpp"
#include "plume/sensors.hpp"

namespace plume {

inline constexpr int kSchemaVersion = 1;
// Links with mean existence probability above this make the snapshot output.
inline constexpr double kTopQThreshold = 0.6;

struct SearchConfig {
  int radius = 9;
  double removal_fraction = 0.35;
  Coord source{0, 7};
  double rate0 = 12.0;  // true release rate
  Coord start{9, -4};
  int n_particles = 4000;
  int m_samples = 400;
  double p_e = 0.04;
  DetectionMatrix primary{1.0, 0.0};
  DetectionMatrix secondary{0.8, 0.1};
  double stay_prob = 0.999;
  double q0 = 0.5;
  double eta0 = 15.0;
  double theta0 = 1.0;
  int max_steps = 100;
  std::uint64_t env_seed = 1;
  std::uint64_t run_seed = 1;
  // The ground-truth map stays fixed within a run by default; stay_prob is
  // the searcher's belief-dynamics model either way. Enabling this makes the
  // world itself flip links at 1 - stay_prob per step.
  bool evolve_map = false;
  bool sample_rate = true;      // draw the hypothesised rate; false uses the posterior mean
  bool pin_environment = false; // one environment for the whole batch
  double ess_frac = 0.0;
  double bandwidth_floor = 0.01;
};

enum class Outcome { Success = 0, FailureUnfound = 1, FailureMisidentified = 2 };
const char* outcome_name(Outcome o);

struct StepLog {
  int k = 0;
  Coord pos{};
  Move commanded = Move::Stay;
  Move realised = Move::Stay;
  bool heuristic = false;
  std::array<double, kMoveCount> expected{};  // NaN where not evaluated
  long count = 0;
  std::vector<LinkObservation> obs;
  int believed_node = -1;
  double source_mean_x = 0.0, source_mean_y = 0.0;
  double cov_xx = 0.0, cov_xy = 0.0, cov_yy = 0.0;
  double rate_mean = 0.0;
  std::vector<int> top_q_links;
};

struct RunRecord {
  Outcome outcome = Outcome::FailureUnfound;
  int steps_taken = 0;
  std::string diagnostic;
  Coord final_pos{};
  int final_believed_node = -1;
  double source_mean_x = 0.0, source_mean_y = 0.0;
  double rate_mean = 0.0;
  std::vector<StepLog> steps;  // filled only on request
};

struct ExperimentSummary {
  int runs = 0;
  int successes = 0;
  int unfound = 0;
  int misidentified = 0;
  double success_rate = 0.0;          // percent
  std::optional<double> mean_steps;   // over successful runs only
  std::vector<RunRecord> records;
};

LatticePtr make_lattice(int radius);
Environment make_environment(const SearchConfig& cfg, LatticePtr grid, std::uint64_t seed);

// One full search on a fixed initial map. Terminates on stepping onto the
// source or after max_steps; success additionally requires the source node
// to appear among the particle searcher positions at termination.
RunRecord run_search(const SearchConfig& cfg, const Environment& env, std::uint64_t run_seed,
                     bool keep_steps = false);

// Same ground truth, controls drawn uniformly from the admissible set; no
// filter, so success is simply reaching the source.
RunRecord random_walk_run(const SearchConfig& cfg, const Environment& env,
                          std::uint64_t run_seed);

// Independent seeded runs on a worker pool; results do not depend on the
// worker count. Fresh environment per run unless cfg.pin_environment.
ExperimentSummary monte_carlo(const SearchConfig& cfg, int runs, int workers);
ExperimentSummary random_walk_baseline(const SearchConfig& cfg, int runs, int workers);

std::string config_to_json(const SearchConfig& cfg);
// Missing keys keep their defaults, so sparse config files stay valid.
SearchConfig config_from_json(const std::string& text);
std::string summary_to_json(const ExperimentSummary& s);
std::string summary_to_csv(const ExperimentSummary& s);
std::string record_to_json(const RunRecord& r);
std::string steps_to_jsonl(const RunRecord& r);

}  // namespace plume
