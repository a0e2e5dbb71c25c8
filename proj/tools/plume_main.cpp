#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "plume/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void print_summary(const plume::ExperimentSummary& s) {
  std::cout << "runs=" << s.runs << " success_rate=" << s.success_rate << "%";
  if (s.mean_steps) {
    std::cout << " mean_steps=" << *s.mean_steps;
  } else {
    std::cout << " mean_steps=n/a";
  }
  std::cout << " (unfound=" << s.unfound << ", misidentified=" << s.misidentified << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autonomous source search on an obstructed lattice"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string env_path;
  std::uint64_t seed = 0;
  int workers = 1;
  int runs = 100;

  app.add_option("--config", config_path, "JSON config file; missing keys keep defaults");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "override both env_seed and run_seed");
  app.add_option("--out", out_dir, "output directory (created if needed)");
  app.add_option("--workers", workers, "worker threads for batch commands")
      ->check(CLI::PositiveNumber);

  CLI::App* gen_env = app.add_subcommand("gen-env", "draw a connected environment, write env.json");
  CLI::App* solve_field =
      app.add_subcommand("solve-field", "exact mean-concentration field, write field.csv");
  CLI::App* run_cmd = app.add_subcommand("run", "single search: run.json, steps.jsonl, env.json");
  CLI::App* mc_cmd = app.add_subcommand("mc", "Monte Carlo batch: summary.json, runs.csv");
  CLI::App* baseline_cmd = app.add_subcommand(
      "baseline", "random-walk batch: baseline_summary.json, baseline_runs.csv");
  for (CLI::App* sub : {gen_env, solve_field, run_cmd, mc_cmd, baseline_cmd}) {
    sub->fallthrough();
  }
  solve_field->add_option("--env", env_path, "environment JSON (default: generate from config)");
  run_cmd->add_option("--env", env_path, "environment JSON (default: generate from config)");
  mc_cmd->add_option("--runs", runs, "number of runs")->check(CLI::PositiveNumber);
  baseline_cmd->add_option("--runs", runs, "number of runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    plume::SearchConfig cfg;
    if (!config_path.empty()) cfg = plume::config_from_json(read_text(config_path));
    if (seed_opt->count() > 0) {
      cfg.env_seed = seed;
      cfg.run_seed = seed;
    }
    const fs::path out(out_dir);
    fs::create_directories(out);

    const auto load_or_generate = [&]() {
      if (!env_path.empty()) return plume::environment_from_json(read_text(env_path));
      return plume::make_environment(cfg, plume::make_lattice(cfg.radius), cfg.env_seed);
    };

    if (gen_env->parsed()) {
      const plume::Environment env =
          plume::make_environment(cfg, plume::make_lattice(cfg.radius), cfg.env_seed);
      write_text(out / "env.json", plume::environment_to_json(env));
      std::cout << "wrote " << (out / "env.json").string() << " (" << env.removed_link_ids().size()
                << " links removed)\n";
    } else if (solve_field->parsed()) {
      const plume::Environment env = load_or_generate();
      const plume::CanonicalChain chain = plume::build_canonical_chain(env);
      const plume::ConcentrationField field =
          plume::mean_concentration_field(chain, env, cfg.source, cfg.rate0);
      write_text(out / "field.csv", plume::field_to_csv(env, field));
      std::cout << "wrote " << (out / "field.csv").string() << "\n";
    } else if (run_cmd->parsed()) {
      const plume::Environment env = load_or_generate();
      const plume::RunRecord rec = plume::run_search(cfg, env, cfg.run_seed, true);
      write_text(out / "env.json", plume::environment_to_json(env));
      write_text(out / "run.json", plume::record_to_json(rec));
      write_text(out / "steps.jsonl", plume::steps_to_jsonl(rec));
      std::cout << plume::outcome_name(rec.outcome) << " after " << rec.steps_taken << " steps\n";
    } else if (mc_cmd->parsed()) {
      const plume::ExperimentSummary summary = plume::monte_carlo(cfg, runs, workers);
      write_text(out / "summary.json", plume::summary_to_json(summary));
      write_text(out / "runs.csv", plume::summary_to_csv(summary));
      print_summary(summary);
    } else if (baseline_cmd->parsed()) {
      const plume::ExperimentSummary summary = plume::random_walk_baseline(cfg, runs, workers);
      write_text(out / "baseline_summary.json", plume::summary_to_json(summary));
      write_text(out / "baseline_runs.csv", plume::summary_to_csv(summary));
      print_summary(summary);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
