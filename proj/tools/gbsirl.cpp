// Benchmark CLI: solve domains, run config-driven experiments, print
// theoretical bounds, and manage cached hypothesis spaces.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gbsirl/gbsirl.hpp"

namespace {

using namespace gbsirl;

std::string cache_dir_or(const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("GBSIRL_CACHE_DIR")) return env;
  return ".";
}

int cmd_solve(const std::string& domain, std::uint64_t domain_seed, const std::string& out_path,
              double tol) {
  DomainSpec d = make_domain(domain, domain_seed);
  QFunction q = solve_q(d.mdp, d.true_reward, tol);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    out = &file;
  }
  *out << "state,v_star,greedy_actions\n";
  for (int x = 0; x < d.mdp.num_states(); ++x) {
    double best = q.at(x, 0);
    for (int a = 1; a < d.mdp.num_actions(); ++a) best = std::max(best, q.at(x, a));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", best);
    *out << x << ',' << buf << ',';
    bool first = true;
    for (int a : greedy_action_set(q, x)) {
      if (!first) *out << ';';
      *out << a;
      first = false;
    }
    *out << '\n';
  }
  std::cerr << "solved " << d.name << ": " << d.mdp.num_states() << " states, residual "
            << q.converged_residual << "\n";
  return 0;
}

int cmd_run(const std::string& config_path) {
  ExperimentConfig cfg = parse_config_file(config_path);
  ExperimentArtifacts art = run_experiment(cfg, &std::cerr);
  int last = cfg.num_steps;
  std::cout << "domain=" << cfg.domain << " strategy=" << strategy_name(cfg.strategy.kind)
            << " |H|=" << art.space.size() << " cells=" << art.space.num_cells() << "\n"
            << "final policy_accuracy=" << art.stats.mean_accuracy[last]
            << " value_loss=" << art.stats.mean_loss[last]
            << " map_correct_rate=" << art.stats.map_correct_rate[last] << "\n"
            << "rows written to " << cfg.output_path << "\n";
  return 0;
}

int cmd_bound(const std::string& config_path) {
  ExperimentConfig cfg = parse_config_file(config_path);
  validate_config(cfg);
  DomainSpec d = make_domain(cfg.domain, cfg.domain_seed);
  auto pool = random_reward_pool(d.mdp, d.true_reward, cfg.pool_size, cfg.pool_seed);
  HypothesisSpace space = build_space(d.mdp, pool, sparsity_prior_weights(pool), cfg.tie_tol);
  ExpertOracle oracle =
      ExpertOracle::from_reward(d.mdp, d.true_reward, cfg.noise.beta_star, cfg.noise.sigma,
                                cfg.tie_tol);
  NoiseModel noise =
      noise_model_from_config(cfg.noise, d.mdp.num_states(), d.mdp.num_actions());
  BoundParams b = compute_bound(space, noise, oracle, 0.05);

  nlohmann::json j;
  j["epsilon"] = b.epsilon;
  j["c_star"] = b.c_star;
  j["lambda"] = b.lambda;
  j["h_size"] = b.h_size;
  j["delta"] = b.delta;
  j["t_min"] = b.t_min;
  j["degenerate"] = b.degenerate;
  if (!b.warning.empty()) j["warning"] = b.warning;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_env_list() {
  for (const auto& name : domain_names()) {
    DomainSpec d = make_domain(name);
    std::cout << name << "  |X|=" << d.mdp.num_states() << " |A|=" << d.mdp.num_actions()
              << " discount=" << d.mdp.discount() << (d.mdp.sparse() ? " (sparse)" : "")
              << "\n";
  }
  return 0;
}

int cmd_space_build(const std::string& domain, int pool, std::uint64_t seed,
                    std::uint64_t domain_seed, double tie_tol, const std::string& dir) {
  DomainSpec d = make_domain(domain, domain_seed);
  auto rewards = random_reward_pool(d.mdp, d.true_reward, pool, seed);
  HypothesisSpace space = build_space(d.mdp, rewards, sparsity_prior_weights(rewards), tie_tol);
  std::string out_dir = cache_dir_or(dir);
  std::filesystem::create_directories(out_dir);
  std::string path = space_cache_file(space, out_dir);
  save_space(space, path);
  std::cout << "space " << hex64(space.content_hash()) << ": |H|=" << space.size()
            << " cells=" << space.num_cells() << " -> " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active reward identification from noisy expert feedback"};
  app.require_subcommand(1);

  std::string domain, out_path, config_path, cache_dir;
  std::uint64_t domain_seed = 1, pool_seed = 2;
  int pool = 500;
  double tol = kDefaultSolveTol, tie_tol = kDefaultTieTol;

  auto* solve = app.add_subcommand("solve", "Solve a domain and dump V*/greedy actions as CSV");
  solve->add_option("domain", domain, "domain name (see `env list`)")->required();
  solve->add_option("--domain-seed", domain_seed, "seed for random-SxA domains");
  solve->add_option("-o,--output", out_path, "output CSV path (default: stdout)");
  solve->add_option("--tol", tol, "Bellman residual tolerance");

  auto* run = app.add_subcommand("run", "Run a config-driven experiment");
  run->add_option("config", config_path, "key = value config file")->required();

  auto* bound = app.add_subcommand("bound", "Print theorem-rate parameters for a config");
  bound->add_option("config", config_path, "key = value config file")->required();

  auto* env = app.add_subcommand("env", "Domain registry");
  auto* env_list = env->add_subcommand("list", "List registered domains");
  env->require_subcommand(1);

  auto* space = app.add_subcommand("space", "Hypothesis-space cache");
  auto* space_build = space->add_subcommand("build", "Build and cache a hypothesis space");
  space_build->add_option("domain", domain, "domain name")->required();
  space_build->add_option("--pool", pool, "reward pool size");
  space_build->add_option("--seed", pool_seed, "reward pool seed");
  space_build->add_option("--domain-seed", domain_seed, "seed for random-SxA domains");
  space_build->add_option("--tie-tol", tie_tol, "greedy-set tie tolerance");
  space_build->add_option("--dir", cache_dir, "cache directory (default: GBSIRL_CACHE_DIR or .)");
  space->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(domain, domain_seed, out_path, tol);
    if (run->parsed()) return cmd_run(config_path);
    if (bound->parsed()) return cmd_bound(config_path);
    if (env_list->parsed()) return cmd_env_list();
    if (space_build->parsed())
      return cmd_space_build(domain, pool, pool_seed, domain_seed, tie_tol, cache_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
