#include "plume/harness.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace plume {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kEvolveTries = 1000;

// One map-dynamics step that never severs the source from the rim: a draw
// that would trap the source (making the field ill-posed) is reverted and
// retried with fresh noise; persistent failure keeps the old map this step.
// Returns whether the map changed.
bool evolve_guarded(Environment& env, double stay_prob, int source_node, Engine& rng) {
  if (stay_prob >= 1.0) return false;
  const std::vector<std::uint8_t> saved = env.status;
  for (int attempt = 0; attempt < kEvolveTries; ++attempt) {
    if (evolve_map(env, stay_prob, rng) == 0) return false;
    if (reaches_boundary(env, source_node)) return true;
    env.status = saved;
  }
  return false;
}

void validate(const SearchConfig& cfg) {
  if (cfg.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (cfg.n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (cfg.m_samples < 1) throw std::invalid_argument("m_samples must be >= 1");
}

int source_node_checked(const Lattice& g, Coord source) {
  const int src = g.node_index(source);
  if (src < 0 || g.boundary(src)) {
    throw std::invalid_argument("source must be an interior grid node");
  }
  return src;
}

int start_node_checked(const Lattice& g, Coord start) {
  const int node = g.node_index(start);
  if (node < 0) throw std::invalid_argument("start must be a grid node");
  return node;
}

bool source_in_support(const ParticleSet& set, int src) {
  for (const Particle& p : set.particles) {
    if (p.pos == src) return true;
  }
  return false;
}

void fill_final_posterior(RunRecord& rec, const ParticleSet& set) {
  const PosteriorSummary s = posterior_summary(set);
  rec.final_believed_node = s.searcher_map_node;
  rec.source_mean_x = s.source_mean_x;
  rec.source_mean_y = s.source_mean_y;
  rec.rate_mean = s.rate_mean;
}

template <typename RunFn>
ExperimentSummary run_batch(const SearchConfig& cfg, int runs, int workers, RunFn&& one_run) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  const LatticePtr grid = make_lattice(cfg.radius);
  std::optional<Environment> pinned;
  if (cfg.pin_environment) pinned = make_environment(cfg, grid, cfg.env_seed);

  ExperimentSummary summary;
  summary.runs = runs;
  summary.records.resize(runs);
  std::atomic<int> cursor{0};
  const auto work = [&] {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= runs) return;
      try {
        const Environment env =
            pinned ? *pinned : make_environment(cfg, grid, derive_seed(cfg.env_seed, i));
        summary.records[i] = one_run(env, derive_seed(cfg.run_seed, i));
      } catch (const std::exception& e) {
        summary.records[i].outcome = Outcome::FailureUnfound;
        summary.records[i].steps_taken = 0;
        summary.records[i].diagnostic = e.what();
      }
    }
  };

  const int spawn = std::min(workers, runs);
  if (spawn == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  long step_sum = 0;
  for (const RunRecord& r : summary.records) {
    switch (r.outcome) {
      case Outcome::Success:
        ++summary.successes;
        step_sum += r.steps_taken;
        break;
      case Outcome::FailureUnfound: ++summary.unfound; break;
      case Outcome::FailureMisidentified: ++summary.misidentified; break;
    }
  }
  summary.success_rate = 100.0 * summary.successes / runs;
  if (summary.successes > 0) {
    summary.mean_steps = static_cast<double>(step_sum) / summary.successes;
  }
  return summary;
}

ordered_json coord_json(Coord c) { return ordered_json::array({c.x, c.y}); }

ordered_json obs_json(const std::vector<LinkObservation>& obs) {
  ordered_json arr = ordered_json::array();
  for (const LinkObservation& o : obs) {
    arr.push_back({{"link", o.link_id},
                   {"dir", kDirName[static_cast<int>(o.dir)]},
                   {"tier", o.tier == Tier::Primary ? "primary" : "secondary"},
                   {"z", o.z}});
  }
  return arr;
}

}  // namespace

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::FailureUnfound: return "failure-unfound";
    case Outcome::FailureMisidentified: return "failure-misidentified";
  }
  return "unknown";
}

LatticePtr make_lattice(int radius) { return std::make_shared<const Lattice>(radius); }

Environment make_environment(const SearchConfig& cfg, LatticePtr grid, std::uint64_t seed) {
  return generate_environment(std::move(grid), cfg.removal_fraction, seed);
}

RunRecord run_search(const SearchConfig& cfg, const Environment& env_in, std::uint64_t run_seed,
                     bool keep_steps) {
  validate(cfg);
  const LatticePtr grid = env_in.grid;
  const Lattice& g = *grid;
  const int src = source_node_checked(g, cfg.source);
  const int start = start_node_checked(g, cfg.start);

  Engine init_rng = make_engine(run_seed, Stream::Init);
  Engine counts_rng = make_engine(run_seed, Stream::Counts);
  Engine links_rng = make_engine(run_seed, Stream::Links);
  Engine motion_rng = make_engine(run_seed, Stream::Motion);
  Engine map_rng = make_engine(run_seed, Stream::Map);
  Engine filter_rng = make_engine(run_seed, Stream::Filter);
  Engine control_rng = make_engine(run_seed, Stream::Control);

  Environment env = env_in;
  CanonicalChain chain = build_canonical_chain(env);
  ConcentrationField field = mean_concentration_field(chain, env, cfg.source, cfg.rate0);

  ParticleSet set = init_particles(grid, cfg.n_particles, start, cfg.q0, cfg.eta0, cfg.theta0,
                                   static_cast<double>(cfg.radius), init_rng);
  RbpfScratch scratch;
  FilterParams fp;
  fp.p_e = cfg.p_e;
  fp.stay_prob = cfg.stay_prob;
  fp.primary = cfg.primary;
  fp.secondary = cfg.secondary;
  fp.dom = DomainGeom{static_cast<double>(cfg.radius)};
  fp.ess_frac = cfg.ess_frac;
  fp.bandwidth_floor = cfg.bandwidth_floor;

  RunRecord rec;
  VisitHistory history;
  int true_pos = start;
  history.push(searcher_map_node(set));

  const auto adjudicate = [&](int k) {
    rec.steps_taken = k;
    rec.outcome =
        source_in_support(set, src) ? Outcome::Success : Outcome::FailureMisidentified;
  };

  if (true_pos == src) {
    adjudicate(0);
  } else {
    rec.outcome = Outcome::FailureUnfound;
    rec.steps_taken = cfg.max_steps;
    for (int k = 1; k <= cfg.max_steps; ++k) {
      const int believed = searcher_map_node(set);
      const ControlDecision decision = select_control(set, history, believed, fp.dom,
                                                      cfg.m_samples, cfg.sample_rate, control_rng);
      const ControlOutcome moved =
          execute_control(env, true_pos, decision.chosen, cfg.p_e, motion_rng);
      true_pos = moved.node;

      if (cfg.evolve_map && evolve_guarded(env, cfg.stay_prob, src, map_rng)) {
        chain = build_canonical_chain(env);
        field = mean_concentration_field(chain, env, cfg.source, cfg.rate0);
      }

      const long n = sample_count(field, true_pos, counts_rng);
      const std::vector<LinkObservation> obs =
          observe_links(env, true_pos, cfg.primary, cfg.secondary, links_rng);

      if (!rbpf_step(set, scratch, decision.chosen, n, obs, fp, filter_rng)) {
        rec.steps_taken = k;
        rec.diagnostic = "filter divergence: all weights vanished at step " + std::to_string(k);
        break;
      }
      history.push(searcher_map_node(set));

      if (keep_steps) {
        const PosteriorSummary s = posterior_summary(set);
        StepLog log;
        log.k = k;
        log.pos = g.node(true_pos);
        log.commanded = decision.chosen;
        log.realised = moved.realised;
        log.heuristic = decision.heuristic;
        log.expected = decision.expected;
        log.count = n;
        log.obs = obs;
        log.believed_node = s.searcher_map_node;
        log.source_mean_x = s.source_mean_x;
        log.source_mean_y = s.source_mean_y;
        log.cov_xx = s.source_cov_xx;
        log.cov_xy = s.source_cov_xy;
        log.cov_yy = s.source_cov_yy;
        log.rate_mean = s.rate_mean;
        for (int j = 0; j < static_cast<int>(s.mean_q.size()); ++j) {
          if (s.mean_q[j] > kTopQThreshold) log.top_q_links.push_back(j);
        }
        rec.steps.push_back(std::move(log));
      }

      if (true_pos == src) {
        adjudicate(k);
        break;
      }
    }
  }

  rec.final_pos = g.node(true_pos);
  fill_final_posterior(rec, set);
  return rec;
}

RunRecord random_walk_run(const SearchConfig& cfg, const Environment& env_in,
                          std::uint64_t run_seed) {
  validate(cfg);
  const Lattice& g = *env_in.grid;
  const int src = source_node_checked(g, cfg.source);
  const int start = start_node_checked(g, cfg.start);

  Engine motion_rng = make_engine(run_seed, Stream::Motion);
  Engine map_rng = make_engine(run_seed, Stream::Map);
  Engine control_rng = make_engine(run_seed, Stream::Control);

  Environment env = env_in;
  RunRecord rec;
  int true_pos = start;
  if (true_pos == src) {
    rec.outcome = Outcome::Success;
    rec.steps_taken = 0;
  } else {
    rec.outcome = Outcome::FailureUnfound;
    rec.steps_taken = cfg.max_steps;
    for (int k = 1; k <= cfg.max_steps; ++k) {
      const std::vector<Move> adm = admissible_controls(g, true_pos);
      std::uniform_int_distribution<int> pick(0, static_cast<int>(adm.size()) - 1);
      const Move chosen = adm[pick(control_rng)];
      true_pos = execute_control(env, true_pos, chosen, cfg.p_e, kAllMoves, motion_rng).node;
      if (cfg.evolve_map) evolve_guarded(env, cfg.stay_prob, src, map_rng);
      if (true_pos == src) {
        rec.outcome = Outcome::Success;
        rec.steps_taken = k;
        break;
      }
    }
  }
  rec.final_pos = g.node(true_pos);
  return rec;
}

ExperimentSummary monte_carlo(const SearchConfig& cfg, int runs, int workers) {
  return run_batch(cfg, runs, workers, [&cfg](const Environment& env, std::uint64_t seed) {
    return run_search(cfg, env, seed, false);
  });
}

ExperimentSummary random_walk_baseline(const SearchConfig& cfg, int runs, int workers) {
  return run_batch(cfg, runs, workers, [&cfg](const Environment& env, std::uint64_t seed) {
    return random_walk_run(cfg, env, seed);
  });
}

std::string config_to_json(const SearchConfig& cfg) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["radius"] = cfg.radius;
  j["removal_fraction"] = cfg.removal_fraction;
  j["source"] = coord_json(cfg.source);
  j["rate0"] = cfg.rate0;
  j["start"] = coord_json(cfg.start);
  j["n_particles"] = cfg.n_particles;
  j["m_samples"] = cfg.m_samples;
  j["p_e"] = cfg.p_e;
  j["primary"] = {{"p_d", cfg.primary.p_d}, {"p_fa", cfg.primary.p_fa}};
  j["secondary"] = {{"p_d", cfg.secondary.p_d}, {"p_fa", cfg.secondary.p_fa}};
  j["stay_prob"] = cfg.stay_prob;
  j["q0"] = cfg.q0;
  j["eta0"] = cfg.eta0;
  j["theta0"] = cfg.theta0;
  j["max_steps"] = cfg.max_steps;
  j["env_seed"] = cfg.env_seed;
  j["run_seed"] = cfg.run_seed;
  j["evolve_map"] = cfg.evolve_map;
  j["sample_rate"] = cfg.sample_rate;
  j["pin_environment"] = cfg.pin_environment;
  j["ess_frac"] = cfg.ess_frac;
  j["bandwidth_floor"] = cfg.bandwidth_floor;
  return j.dump(2) + "\n";
}

SearchConfig config_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  SearchConfig cfg;
  const auto coord = [&](const char* key, Coord fallback) {
    if (!j.contains(key)) return fallback;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 2) {
      throw std::invalid_argument(std::string(key) + " must be a [x, y] pair");
    }
    return Coord{a[0].get<int>(), a[1].get<int>()};
  };
  cfg.radius = j.value("radius", cfg.radius);
  cfg.removal_fraction = j.value("removal_fraction", cfg.removal_fraction);
  cfg.source = coord("source", cfg.source);
  cfg.rate0 = j.value("rate0", cfg.rate0);
  cfg.start = coord("start", cfg.start);
  cfg.n_particles = j.value("n_particles", cfg.n_particles);
  cfg.m_samples = j.value("m_samples", cfg.m_samples);
  cfg.p_e = j.value("p_e", cfg.p_e);
  if (j.contains("primary")) {
    cfg.primary.p_d = j["primary"].value("p_d", cfg.primary.p_d);
    cfg.primary.p_fa = j["primary"].value("p_fa", cfg.primary.p_fa);
  }
  if (j.contains("secondary")) {
    cfg.secondary.p_d = j["secondary"].value("p_d", cfg.secondary.p_d);
    cfg.secondary.p_fa = j["secondary"].value("p_fa", cfg.secondary.p_fa);
  }
  cfg.stay_prob = j.value("stay_prob", cfg.stay_prob);
  cfg.q0 = j.value("q0", cfg.q0);
  cfg.eta0 = j.value("eta0", cfg.eta0);
  cfg.theta0 = j.value("theta0", cfg.theta0);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.env_seed = j.value("env_seed", cfg.env_seed);
  cfg.run_seed = j.value("run_seed", cfg.run_seed);
  cfg.evolve_map = j.value("evolve_map", cfg.evolve_map);
  cfg.sample_rate = j.value("sample_rate", cfg.sample_rate);
  cfg.pin_environment = j.value("pin_environment", cfg.pin_environment);
  cfg.ess_frac = j.value("ess_frac", cfg.ess_frac);
  cfg.bandwidth_floor = j.value("bandwidth_floor", cfg.bandwidth_floor);
  return cfg;
}

std::string summary_to_json(const ExperimentSummary& s) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["runs"] = s.runs;
  j["successes"] = s.successes;
  j["failures_unfound"] = s.unfound;
  j["failures_misidentified"] = s.misidentified;
  j["success_rate"] = s.success_rate;
  if (s.mean_steps) {
    j["mean_steps"] = *s.mean_steps;
  } else {
    j["mean_steps"] = nullptr;
  }
  ordered_json per_run = ordered_json::array();
  for (int i = 0; i < static_cast<int>(s.records.size()); ++i) {
    const RunRecord& r = s.records[i];
    per_run.push_back({{"run", i},
                       {"outcome", outcome_name(r.outcome)},
                       {"steps", r.steps_taken},
                       {"diagnostic", r.diagnostic}});
  }
  j["per_run"] = std::move(per_run);
  return j.dump(2) + "\n";
}

std::string summary_to_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out << "run,outcome,steps\n";
  for (int i = 0; i < static_cast<int>(s.records.size()); ++i) {
    out << i << ',' << outcome_name(s.records[i].outcome) << ',' << s.records[i].steps_taken
        << '\n';
  }
  return out.str();
}

std::string record_to_json(const RunRecord& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["outcome"] = outcome_name(r.outcome);
  j["steps_taken"] = r.steps_taken;
  j["diagnostic"] = r.diagnostic;
  j["final_pos"] = coord_json(r.final_pos);
  j["final_believed_node"] = r.final_believed_node;
  j["source_mean"] = {r.source_mean_x, r.source_mean_y};
  j["rate_mean"] = r.rate_mean;
  return j.dump(2) + "\n";
}

std::string steps_to_jsonl(const RunRecord& r) {
  std::ostringstream out;
  for (const StepLog& s : r.steps) {
    ordered_json j;
    j["k"] = s.k;
    j["pos"] = coord_json(s.pos);
    j["commanded"] = kMoveName[static_cast<int>(s.commanded)];
    j["realised"] = kMoveName[static_cast<int>(s.realised)];
    j["heuristic"] = s.heuristic;
    ordered_json rewards;
    for (int m = 0; m < kMoveCount; ++m) {
      if (std::isfinite(s.expected[m])) rewards[kMoveName[m]] = s.expected[m];
    }
    j["rewards"] = std::move(rewards);
    j["count"] = s.count;
    j["obs"] = obs_json(s.obs);
    j["believed_node"] = s.believed_node;
    j["source_mean"] = {s.source_mean_x, s.source_mean_y};
    j["source_cov"] = {s.cov_xx, s.cov_xy, s.cov_yy};
    j["rate_mean"] = s.rate_mean;
    j["top_q_links"] = s.top_q_links;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace plume
