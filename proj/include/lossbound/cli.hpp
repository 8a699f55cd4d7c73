#pragma once

// Subcommand dispatch shared by the command-line tool and its tests.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lossbound/config.hpp"
#include "lossbound/sim.hpp"
#include "lossbound/stage_game.hpp"
#include "lossbound/verify.hpp"

namespace lossbound {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitCapExceeded = 3 };

inline std::string learner_label(const LearnerSpec& spec) {
  std::string s = spec.name;
  if (spec.r >= 0) s += "(r=" + std::to_string(spec.r) + ")";
  if (spec.wrap) s += "+maximin";
  return s;
}

// Calls f with the configured learner, wrapped when requested.
template <class F>
decltype(auto) with_learner(const LearnerSpec& spec, const FamilyParams& params, F&& f) {
  AnyLearner base = make_learner(spec, params);
  if (spec.wrap) return f(wrap_with_maximin(std::move(base)));
  return f(std::move(base));
}

namespace detail {

inline std::string format_strategy(const MixedStrategy& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += format_number(s[i]);
  }
  return out + "]";
}

inline FamilyParams concrete_params(const ExperimentConfig& cfg) {
  if (cfg.hidden_given) return cfg.params;
  const auto games = enumerate_hidden(cfg.params);
  if (games.size() == 1) return games.front();
  throw ConfigError("hidden parameters of '" + std::string(family_name(cfg.family)) +
                    "' are required for this subcommand (use sweep to cover all of them)");
}

template <LearnerMachine L>
Opponent make_opponent(const ExperimentConfig& cfg, const FamilyParams& params, const L& learner) {
  const std::string& name = cfg.opponent;
  if (name == "worst_case_dp")
    return Opponent(worst_case_dp(params, learner, cfg.rounds).policy, params);
  if (name == "middle_camper") return Opponent(MiddleCamperPolicy{}, params);
  if (name == "best_response") return Opponent(BestResponsePolicy{}, params);
  if (name == "match_probable") return Opponent(MatchProbablePolicy{}, params);
  if (name == "uniform_random") return Opponent(UniformRandomPolicy{}, params);
  return Opponent(ScriptedPolicy{cfg.opponent_script}, params);
}

struct CheckRun {
  Json record;
  std::string kind;
  std::string claimed;
  std::string measured;
  std::string method;
  int games = 1;
  bool pass = false;
};

inline std::vector<CheckSpec> effective_checks(const ExperimentConfig& cfg,
                                               const FamilyParams& params) {
  std::vector<CheckSpec> checks = cfg.checks;
  const auto claim = theorem_claim(cfg.learner, params);
  if (checks.empty()) {
    if (!claim) throw ConfigError("learner '" + cfg.learner.name + "' has no default claim; pass --check");
    CheckSpec c;
    c.kind = claim->kind;
    checks.push_back(c);
    if (!claim->lemma_constants.empty()) {
      CheckSpec lemma;
      lemma.kind = CheckKind::Lemma;
      checks.push_back(lemma);
    }
  }
  for (auto& c : checks) {
    if (!c.bound) {
      if (c.kind == CheckKind::Lemma) {
        c.bound = 0.0;
      } else if (claim) {
        c.bound = claim->bound;
      } else {
        throw ConfigError("check '" + to_string(c.kind) + "' needs a bound (--bound)");
      }
    }
    if (c.kind == CheckKind::Approximate && !c.epsilon) {
      if (!claim) throw ConfigError("approximate check needs --epsilon");
      c.epsilon = claim->epsilon;
    }
    if (c.kind == CheckKind::Lemma && c.lemma_constants.empty()) {
      if (!claim || claim->lemma_constants.empty())
        throw ConfigError("lemma check needs constants 'c' for learner '" + cfg.learner.name + "'");
      c.lemma_constants = claim->lemma_constants;
    }
    if (c.kind == CheckKind::Expected && c.horizons.empty())
      for (int n = 1; n <= 12; ++n) c.horizons.push_back(n);
  }
  return checks;
}

inline BoundReport run_bound_check(const ExperimentConfig& cfg, const CheckSpec& c,
                                   const FamilyParams& params) {
  CheckOptions opt;
  opt.learner_name = learner_label(cfg.learner);
  opt.mc_episodes = std::max(cfg.episodes, kMinStatisticalEpisodes);
  opt.seed = cfg.seed;
  return with_learner(cfg.learner, params, [&](const auto& learner) {
    switch (c.kind) {
      case CheckKind::Guaranteed: return check_guaranteed(params, learner, *c.bound, opt);
      case CheckKind::Expected: return check_expected(params, learner, *c.bound, c.horizons, opt);
      case CheckKind::Approximate:
        return check_approximate(params, learner, *c.bound, *c.epsilon, c.horizons, opt);
      case CheckKind::Lemma: break;
    }
    throw InvalidArgument("not a bound check");
  });
}

inline CheckRun run_check(const ExperimentConfig& cfg, const CheckSpec& c,
                          const std::vector<FamilyParams>& games) {
  CheckRun run;
  run.kind = to_string(c.kind);
  run.games = static_cast<int>(games.size());
  if (c.kind == CheckKind::Lemma) {
    double sum = 0.0;
    for (double x : c.lemma_constants) sum += x;
    run.claimed = "sum c = " + format_number(sum);
    run.method = "enumeration";
    run.pass = true;
    Json per_game = Json::array();
    double worst_ratio = -std::numeric_limits<double>::infinity();
    for (const auto& params : games) {
      const auto reports = with_learner(cfg.learner, params, [&](const auto& learner) {
        return lemma_ratio_check(params, learner, c.lemma_constants);
      });
      for (const auto& rep : reports)
        for (const auto& row : rep.rows)
          if (!row.no_advantage()) worst_ratio = std::max(worst_ratio, row.ratio());
      run.pass = run.pass && all_pass(reports);
      per_game.push_back(lemma_to_json(params, learner_label(cfg.learner), reports));
    }
    run.measured = "max ratio " + format_number(worst_ratio);
    if (games.size() == 1) {
      run.record = per_game.front();
    } else {
      run.record = Json{{"check", "lemma"}, {"learner", learner_label(cfg.learner)},
                        {"games", run.games}, {"pass", run.pass}, {"reports", per_game}};
    }
    return run;
  }
  const BoundReport r = games.size() == 1
                            ? run_bound_check(cfg, c, games.front())
                            : sweep_reports(games, [&](const FamilyParams& p) {
                                return run_bound_check(cfg, c, p);
                              });
  run.claimed = format_number(r.claimed);
  if (r.epsilon) run.claimed += " eps " + format_number(*r.epsilon);
  run.measured = std::isinf(r.measured) ? std::string("inf") : format_number(r.measured);
  run.method = to_string(r.method);
  run.pass = r.pass;
  run.record = report_to_json(r);
  return run;
}

inline int run_checks(const ExperimentConfig& cfg, const std::vector<FamilyParams>& games,
                      std::ostream& out) {
  const auto checks = effective_checks(cfg, games.front());
  std::vector<CheckRun> runs;
  for (const auto& c : checks) runs.push_back(run_check(cfg, c, games));

  out << std::left << std::setw(12) << "check" << std::setw(34) << "learner" << std::setw(18)
      << "claimed" << std::setw(22) << "measured" << std::setw(13) << "method" << std::setw(7)
      << "games"
      << "result\n";
  bool all = true;
  for (const auto& r : runs) {
    out << std::left << std::setw(12) << r.kind << std::setw(34) << learner_label(cfg.learner)
        << std::setw(18) << r.claimed << std::setw(22) << r.measured << std::setw(13) << r.method
        << std::setw(7) << r.games << (r.pass ? "PASS" : "FAIL") << '\n';
    all = all && r.pass;
  }
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out + ".jsonl");
    if (!file) throw std::runtime_error("cannot write '" + cfg.out + ".jsonl'");
    for (const auto& r : runs) file << r.record.dump() << '\n';
  }
  return all ? kExitPass : kExitCheckFailed;
}

inline int run_solve(const ExperimentConfig& cfg, std::ostream& out) {
  const FamilyParams params = concrete_params(cfg);
  const StageGame game = to_stage_game(params);
  const SolveResult s = solve_maximin(game);
  out << "value " << format_number(s.value) << '\n';
  out << "player1 " << format_strategy(s.strategy1) << '\n';
  out << "player2 " << format_strategy(s.strategy2) << '\n';
  return kExitPass;
}

inline int run_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  const FamilyParams params = concrete_params(cfg);
  return with_learner(cfg.learner, params, [&](const auto& learner) {
    const Opponent opponent = make_opponent(cfg, params, learner);
    EpisodeOptions options;
    options.learner_name = learner_label(cfg.learner);
    options.value = game_value(params);

    std::ofstream csv;
    if (!cfg.out.empty()) {
      csv.open(cfg.out + ".csv");
      if (!csv) throw std::runtime_error("cannot write '" + cfg.out + ".csv'");
      write_trace_csv_header(csv);
    }
    std::vector<double> losses;
    losses.reserve(cfg.episodes);
    TraceHeader header;
    for (int e = 0; e < cfg.episodes; ++e) {
      const Trace t = run_episode(params, learner, opponent, cfg.rounds, split_seed(cfg.seed, e), options);
      if (e == 0) header = t.header;
      if (csv.is_open()) write_trace_csv_rows(csv, t, e);
      losses.push_back(t.cumulative_loss());
    }
    double mean = 0.0;
    for (double x : losses) mean += x;
    mean /= static_cast<double>(losses.size());
    double se = 0.0;
    if (losses.size() > 1) {
      double ss = 0.0;
      for (double x : losses) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(losses.size() - 1)) /
           std::sqrt(static_cast<double>(losses.size()));
    }
    header.seed = cfg.seed;
    out << "value " << format_number(options.value) << '\n';
    out << "episodes " << cfg.episodes << " rounds " << cfg.rounds << '\n';
    out << "mean_loss " << format_number(mean) << " standard_error " << format_number(se) << '\n';
    if (!cfg.out.empty()) {
      Json side = trace_sidecar(header, cfg.episodes);
      side["episode_seeds"] = "split_seed(seed, episode)";
      side["mean_loss"] = mean;
      side["standard_error"] = se;
      std::ofstream json(cfg.out + ".json");
      if (!json) throw std::runtime_error("cannot write '" + cfg.out + ".json'");
      json << side.dump(2) << '\n';
    }
    return static_cast<int>(kExitPass);
  });
}

}  // namespace detail

// Runs one subcommand. Config errors and cap overruns map to their exit
// codes; diagnostics go to `err`.
inline int run_command(const ExperimentConfig& cfg, const std::string& subcommand,
                       std::ostream& out, std::ostream& err) {
  try {
    if (subcommand == "solve") return detail::run_solve(cfg, out);
    if (subcommand == "simulate") return detail::run_simulate(cfg, out);
    if (subcommand == "verify") return detail::run_checks(cfg, {detail::concrete_params(cfg)}, out);
    if (subcommand == "sweep") {
      const auto games = cfg.hidden_given ? std::vector<FamilyParams>{cfg.params}
                                          : enumerate_hidden(cfg.params);
      return detail::run_checks(cfg, games, out);
    }
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitConfigError;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapExceeded;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace lossbound
