// lossbound: solve, simulate and verify repeated zero-sum games.
//
//   lossbound solve    --family mp_duds --param m=2 --param n=0
//   lossbound simulate --config configs/get_close.json --out run1
//   lossbound verify   --family get_close --param n=16 --param k=11 --check guaranteed --bound 4
//   lossbound sweep    --config configs/rps_duds_sweep.json

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "lossbound/cli.hpp"
#include "lossbound/config.hpp"

int main(int argc, char** argv) {
  using namespace lossbound;
  CLI::App app{"Loss-bounded learning in repeated zero-sum games"};
  app.require_subcommand(1, 1);

  std::string config_path;
  ConfigOverrides o;
  std::string learner, opponent, out, family, horizons, script;
  int rounds = 0, episodes = 0, budget = -1;
  std::uint64_t seed = 0;
  double bound = 0.0, epsilon = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--family", family, "get_close | rps_duds | random_orientation_rps_duds | two_targets | mp_duds");
    sub->add_option("--param", o.params, "Family parameter key=value; lists are comma separated")
        ->take_all();
    sub->add_option("--learner", learner, "Learner name");
    sub->add_option("--budget", budget, "Loss budget r for approx_binary_search");
    sub->add_flag("--wrap", o.wrap, "Freeze a maximin strategy once learned");
    sub->add_option("--opponent", opponent,
                    "worst_case_dp | middle_camper | best_response | match_probable | "
                    "uniform_random | scripted");
    sub->add_option("--script", script, "Opponent action list, one integer per line");
    sub->add_option("--rounds", rounds, "Horizon N");
    sub->add_option("--episodes", episodes, "Episodes");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--out", out, "Output path prefix");
    sub->add_option("--check", o.checks, "guaranteed | expected | approximate | lemma")->take_all();
    sub->add_option("--bound", bound, "Claimed loss bound l");
    sub->add_option("--epsilon", epsilon, "Claimed precision");
    sub->add_option("--horizons", horizons, "Horizons, e.g. 1-30 or 1,5,10");
  };
  for (const char* name : {"solve", "simulate", "verify", "sweep"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " an experiment");
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }
  const CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const char* flag) { return sub->count(flag) > 0; };
  if (given("--family")) o.family = family;
  if (given("--learner")) o.learner = learner;
  if (given("--budget")) o.budget = budget;
  if (given("--opponent")) o.opponent = opponent;
  if (given("--script")) o.script_file = script;
  if (given("--rounds")) o.rounds = rounds;
  if (given("--episodes")) o.episodes = episodes;
  if (given("--seed")) o.seed = seed;
  if (given("--out")) o.out = out;
  if (given("--bound")) o.bound = bound;
  if (given("--epsilon")) o.epsilon = epsilon;
  if (given("--horizons")) o.horizons = horizons;

  ExperimentConfig cfg;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config '" + config_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    cfg = parse_config(text, o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    return run_command(cfg, sub->get_name(), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}
