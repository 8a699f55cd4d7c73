#pragma once

// Adversaries. They know the true game and the learner's state (hence its
// current stage strategy) but never the action it is about to sample.

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "lossbound/error.hpp"
#include "lossbound/families.hpp"
#include "lossbound/learners.hpp"
#include "lossbound/rng.hpp"
#include "lossbound/stage_game.hpp"

namespace lossbound {

inline constexpr std::size_t kDefaultStateCap = 2'000'000;

// Best action for every (learner state key, rounds remaining).
struct WorstCasePolicy {
  std::shared_ptr<const std::unordered_map<std::string, std::vector<Action>>> table;
  int horizon = 0;
};
struct MiddleCamperPolicy {};
struct BestResponsePolicy {};
struct MatchProbablePolicy {};
struct UniformRandomPolicy {};
struct ScriptedPolicy {
  std::vector<Action> actions;  // round i plays actions[i % size]
};

using OpponentPolicy = std::variant<WorstCasePolicy, MiddleCamperPolicy, BestResponsePolicy,
                                    MatchProbablePolicy, UniformRandomPolicy, ScriptedPolicy>;

inline std::string policy_name(const OpponentPolicy& p) {
  static const char* names[] = {"worst_case_dp", "middle_camper", "best_response",
                                "match_probable", "uniform_random", "scripted"};
  return names[p.index()];
}

inline Action middle_camper_act(const FamilyParams& params) {
  const auto kind = family_kind(params);
  require(kind == FamilyKind::GetClose || kind == FamilyKind::TwoTargets,
          "middle camper needs get_close or two_targets");
  return (1 + num_actions(params)) / 2;
}

inline Action best_response_act(const StageGame& game, const MixedStrategy& learner_strategy) {
  return static_cast<Action>(best_response(game, learner_strategy, Player::Two).first) + 1;
}

inline Action match_probable_act(const MixedStrategy& learner_strategy) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < learner_strategy.size(); ++i)
    if (learner_strategy[i] > learner_strategy[best] + kTieTolerance) best = i;
  return static_cast<Action>(best) + 1;
}

// One integer per line; blank lines and '#' comments are skipped.
inline std::vector<Action> parse_action_script(std::istream& in) {
  std::vector<Action> actions;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    Action a;
    std::string rest;
    if (!(ls >> a) || (ls >> rest))
      throw InvalidArgument("script line " + std::to_string(line_no) + ": expected one integer");
    actions.push_back(a);
  }
  require(!actions.empty(), "opponent script is empty");
  return actions;
}

inline std::vector<Action> load_action_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open opponent script '" + path + "'");
  return parse_action_script(in);
}

class Opponent {
 public:
  Opponent(OpponentPolicy policy, const FamilyParams& params)
      : policy_(std::move(policy)), params_(params), game_(to_stage_game(params)) {
    if (const auto* s = std::get_if<ScriptedPolicy>(&policy_)) {
      require(!s->actions.empty(), "scripted opponent needs at least one action");
      for (Action a : s->actions)
        require(a >= 1 && a <= num_actions(params_), "scripted action out of range");
    }
    if (std::holds_alternative<MiddleCamperPolicy>(policy_)) middle_camper_act(params_);
  }

  const OpponentPolicy& policy() const { return policy_; }
  std::string name() const { return policy_name(policy_); }

  // `round` is 0-based; `remaining` counts the current round.
  template <LearnerMachine L>
  Action act(const L& learner, int round, int remaining, Rng& rng) const {
    return std::visit(
        [&](const auto& p) -> Action {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, WorstCasePolicy>) {
            require(remaining <= p.horizon, "worst-case table built for a shorter horizon");
            const auto it = p.table->find(learner.key());
            if (it == p.table->end())
              throw InvalidArgument("worst-case table has no entry for learner state " +
                                    learner.key());
            return it->second.at(remaining);
          } else if constexpr (std::is_same_v<P, MiddleCamperPolicy>) {
            return middle_camper_act(params_);
          } else if constexpr (std::is_same_v<P, BestResponsePolicy>) {
            return best_response_act(game_, MixedStrategy(learner.act()));
          } else if constexpr (std::is_same_v<P, MatchProbablePolicy>) {
            return match_probable_act(MixedStrategy(learner.act()));
          } else if constexpr (std::is_same_v<P, UniformRandomPolicy>) {
            const auto count = static_cast<std::uint64_t>(num_actions(params_));
            return static_cast<Action>(
                       std::min<std::uint64_t>(static_cast<std::uint64_t>(uniform01(rng) * count),
                                               count - 1)) +
                   1;
          } else {
            return p.actions[static_cast<std::size_t>(round) % p.actions.size()];
          }
        },
        policy_);
  }

 private:
  OpponentPolicy policy_;
  FamilyParams params_;
  StageGame game_;
};

// ---------------------------------------------------------------------------
// Exact worst-case opponent by backward induction over learner states:
//   W(s, 0) = 0
//   W(s, t) = max_a2 E_{a1 ~ s, Nature}[ V - u1 + W(s', t - 1) ]
// Maximizing over pure a2 is enough since the objective is linear in the
// opponent's mixture at each state.

struct WorstCaseResult {
  WorstCasePolicy policy;
  double value = 0.0;                   // W(initial, N)
  std::vector<double> value_by_horizon;  // W(initial, t) for t = 0..N
  std::size_t states = 0;
};

namespace detail {

template <LearnerMachine L>
class WorstCaseSolver {
 public:
  WorstCaseSolver(const FamilyParams& params, int horizon, std::size_t cap)
      : params_(params),
        nature_(nature_distribution(params)),
        value_(game_value(params)),
        actions_(num_actions(params)),
        horizon_(horizon),
        cap_(cap),
        table_(std::make_shared<std::unordered_map<std::string, std::vector<Action>>>()) {}

  double solve(const L& learner, int t) {
    if (t == 0) return 0.0;
    const std::string key = learner.key();
    auto it = values_.find(key);
    if (it == values_.end()) {
      if (values_.size() >= cap_)
        throw CapExceeded("worst-case search exceeded " + std::to_string(cap_) + " learner states");
      it = values_.emplace(key, std::vector<double>(horizon_ + 1, kUnset)).first;
      (*table_)[key].assign(horizon_ + 1, 0);
    }
    if (!std::isnan(it->second[t])) return it->second[t];

    const MixedStrategy s(learner.act());
    const auto support = s.support();
    double best = -std::numeric_limits<double>::infinity();
    Action best_action = 1;
    for (Action a2 = 1; a2 <= actions_; ++a2) {
      double total = 0.0;
      for (std::size_t i : support) {
        const Action a1 = static_cast<Action>(i) + 1;
        for (const auto& [draw, pn] : nature_) {
          if (pn <= 0.0) continue;
          const RoundOutcome o = resolve_outcome(params_, a1, a2, draw);
          const double w = s[i] * pn;
          total += w * (value_ - o.u1 + solve(learner.observe(o), t - 1));
        }
      }
      if (total > best + kTieTolerance) {
        best = total;
        best_action = a2;
      }
    }
    // `it` may be invalidated by the recursive inserts above.
    values_[key][t] = best;
    (*table_)[key][t] = best_action;
    return best;
  }

  std::size_t states() const { return values_.size(); }
  WorstCasePolicy policy() const { return {table_, horizon_}; }

 private:
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  FamilyParams params_;
  std::vector<std::pair<NatureDraw, double>> nature_;
  double value_;
  int actions_;
  int horizon_;
  std::size_t cap_;
  std::unordered_map<std::string, std::vector<double>> values_;
  std::shared_ptr<std::unordered_map<std::string, std::vector<Action>>> table_;
};

}  // namespace detail

template <LearnerMachine L>
WorstCaseResult worst_case_dp(const FamilyParams& params, const L& learner, int horizon,
                              std::size_t state_cap = kDefaultStateCap) {
  require(horizon >= 1, "horizon must be at least 1");
  detail::WorstCaseSolver<L> solver(params, horizon, state_cap);
  WorstCaseResult result;
  result.value_by_horizon.push_back(0.0);
  for (int t = 1; t <= horizon; ++t) result.value_by_horizon.push_back(solver.solve(learner, t));
  result.value = result.value_by_horizon.back();
  result.policy = solver.policy();
  result.states = solver.states();
  return result;
}

}  // namespace lossbound
