#pragma once

// Machine checks of loss bounds:
//   guaranteed   longest loss path before `learned` over every opponent
//                action and every positive-probability learner/Nature branch
//   expected     exact worst-case DP value for each horizon N
//   approximate  guaranteed check against an epsilon-maximin target plus the
//                l + N * epsilon expected check
//   lemma        per-epoch loss-to-progress ratios for every opponent action

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lossbound/error.hpp"
#include "lossbound/families.hpp"
#include "lossbound/io.hpp"
#include "lossbound/learners.hpp"
#include "lossbound/opponents.hpp"
#include "lossbound/sim.hpp"
#include "lossbound/stage_game.hpp"

namespace lossbound {

inline constexpr double kExactTolerance = 1e-9;
inline constexpr double kLemmaZeroTolerance = 1e-12;
inline constexpr int kMinStatisticalEpisodes = 10'000;

enum class CheckKind { Guaranteed, Expected, Approximate, Lemma };
enum class CheckMethod { Exhaustive, Dp, MonteCarlo, Enumeration };

inline std::string to_string(CheckKind k) {
  static const char* names[] = {"guaranteed", "expected", "approximate", "lemma"};
  return names[static_cast<int>(k)];
}

inline std::string to_string(CheckMethod m) {
  static const char* names[] = {"exhaustive", "dp", "monte-carlo", "enumeration"};
  return names[static_cast<int>(m)];
}

inline CheckKind parse_check_kind(const std::string& s) {
  for (auto k : {CheckKind::Guaranteed, CheckKind::Expected, CheckKind::Approximate, CheckKind::Lemma})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown check '" + s + "'");
}

struct BoundReport {
  FamilyParams params;  // the worst game when the report covers a sweep
  std::string learner;
  CheckKind kind = CheckKind::Guaranteed;
  CheckMethod method = CheckMethod::Exhaustive;
  double claimed = 0.0;
  double measured = 0.0;  // +inf when the loss before learning is unbounded
  double tolerance = kExactTolerance;
  bool pass = false;
  std::optional<double> epsilon;
  std::optional<double> exploitability;  // worst learned-strategy exploitability
  std::vector<std::pair<int, double>> by_horizon;
  int games = 1;
  std::string detail;
};

struct LemmaRow {
  Action a2 = 0;
  double lambda = 0.0;  // expected one-round loss
  double p = 0.0;       // probability the round ends the epoch
  bool pass = false;

  bool no_advantage() const { return p <= 0.0; }
  double ratio() const { return lambda / p; }
};

struct LemmaRatioReport {
  int epoch = 0;
  std::string state;
  MixedStrategy strategy;
  std::vector<LemmaRow> rows;
  double c = 0.0;
  bool pass = false;
};

struct CheckOptions {
  std::string learner_name = "learner";
  std::size_t state_cap = kDefaultStateCap;
  int mc_episodes = kMinStatisticalEpisodes;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Reachable learner states.

namespace detail {

struct Branch {
  std::size_t to = 0;
  double prob = 0.0;
  double loss = 0.0;
};

template <LearnerMachine L>
struct StateGraph {
  std::vector<L> states;
  // edges[s][a2 - 1] lists the branches over learner action and Nature.
  std::vector<std::vector<std::vector<Branch>>> edges;
};

// Expands every reachable state for which `expand` holds; others are leaves.
template <LearnerMachine L, class Expand>
StateGraph<L> explore(const FamilyParams& params, const L& initial, double value,
                      std::size_t cap, Expand expand) {
  StateGraph<L> g;
  std::unordered_map<std::string, std::size_t> index;
  const auto nature = nature_distribution(params);
  const int actions = num_actions(params);
  auto intern = [&](const L& s) {
    auto [it, inserted] = index.emplace(s.key(), g.states.size());
    if (inserted) {
      if (g.states.size() >= cap)
        throw CapExceeded("state exploration exceeded " + std::to_string(cap) + " learner states");
      g.states.push_back(s);
      g.edges.emplace_back();
    }
    return it->second;
  };
  intern(initial);
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    if (!expand(g.states[s])) continue;
    const L current = g.states[s];
    const MixedStrategy strategy(current.act());
    std::vector<std::vector<Branch>> out(actions);
    for (Action a2 = 1; a2 <= actions; ++a2) {
      for (std::size_t i : strategy.support()) {
        for (const auto& [draw, pn] : nature) {
          if (pn <= 0.0) continue;
          const RoundOutcome o = resolve_outcome(params, static_cast<Action>(i) + 1, a2, draw);
          const std::size_t to = intern(current.observe(o));
          out[a2 - 1].push_back({to, strategy[i] * pn, value - o.u1});
        }
      }
    }
    g.edges[s] = std::move(out);
  }
  return g;
}

struct GuaranteedSearch {
  double max_loss = 0.0;  // +inf on a positive-loss cycle
  double max_exploitability = 0.0;
  std::size_t states = 0;
};

template <LearnerMachine L>
GuaranteedSearch guaranteed_search(const FamilyParams& params, const L& learner,
                                   std::size_t cap) {
  const StageGame game = to_stage_game(params);
  const double value = solve_maximin(game).value;
  const auto g = explore(params, learner, value, cap, [](const L& s) { return !s.learned(); });
  const std::size_t n = g.states.size();

  GuaranteedSearch out;
  out.states = n;
  for (const auto& s : g.states)
    if (s.learned())
      out.max_exploitability =
          std::max(out.max_exploitability, exploitability(game, MixedStrategy(s.act()), value));

  // Longest path with the option to stop anywhere; learned states are
  // terminal with value 0. Still improving after n sweeps means a cycle of
  // positive loss that the opponent can repeat forever.
  std::vector<double> best(n, 0.0);
  bool changed = true;
  for (std::size_t sweep = 0; sweep <= n && changed; ++sweep) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (g.states[s].learned()) continue;
      double v = 0.0;
      for (const auto& branches : g.edges[s])
        for (const auto& b : branches) v = std::max(v, b.loss + best[b.to]);
      if (v > best[s] + kLemmaZeroTolerance) {
        best[s] = v;
        changed = true;
      }
    }
  }
  out.max_loss = changed ? std::numeric_limits<double>::infinity() : best[0];
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Checks on a single game.

template <LearnerMachine L>
BoundReport check_guaranteed(const FamilyParams& params, const L& learner, double bound,
                             const CheckOptions& opt = {}) {
  const auto search = detail::guaranteed_search(params, learner, opt.state_cap);
  BoundReport r;
  r.params = params;
  r.learner = opt.learner_name;
  r.kind = CheckKind::Guaranteed;
  r.method = CheckMethod::Exhaustive;
  r.claimed = bound;
  r.measured = search.max_loss;
  r.exploitability = search.max_exploitability;
  r.pass = search.max_loss <= bound + kExactTolerance &&
           search.max_exploitability <= learner.epsilon() + kExactTolerance;
  r.detail = std::to_string(search.states) + " learner states";
  if (std::isinf(search.max_loss)) r.detail += "; opponent can repeat a losing cycle";
  return r;
}

template <LearnerMachine L>
BoundReport check_expected(const FamilyParams& params, const L& learner, double bound,
                           const std::vector<int>& horizons, const CheckOptions& opt = {}) {
  require(!horizons.empty(), "check_expected needs at least one horizon");
  const int max_n = *std::max_element(horizons.begin(), horizons.end());
  BoundReport r;
  r.params = params;
  r.learner = opt.learner_name;
  r.kind = CheckKind::Expected;
  r.claimed = bound;
  try {
    const auto dp = worst_case_dp(params, learner, max_n, opt.state_cap);
    r.method = CheckMethod::Dp;
    r.measured = -std::numeric_limits<double>::infinity();
    for (int n : horizons) {
      r.by_horizon.emplace_back(n, dp.value_by_horizon.at(n));
      r.measured = std::max(r.measured, dp.value_by_horizon.at(n));
    }
    r.pass = r.measured <= bound + kExactTolerance;
    r.detail = std::to_string(dp.states) + " learner states";
  } catch (const CapExceeded& e) {
    // Statistical fallback against the myopic adversary.
    const Opponent opponent(BestResponsePolicy{}, params);
    const auto mc = monte_carlo_loss(params, learner, opponent, max_n,
                                     std::max(opt.mc_episodes, kMinStatisticalEpisodes), opt.seed);
    r.method = CheckMethod::MonteCarlo;
    r.measured = mc.mean;
    r.tolerance = 3.0 * mc.standard_error;
    r.pass = mc.mean <= bound + r.tolerance;
    r.detail = std::string(e.what()) + "; mean of " + std::to_string(mc.episodes) +
               " episodes vs best_response, pass iff mean <= bound + 3*SE";
  }
  return r;
}

// Guaranteed part: loss before epsilon-learned <= l and every learned
// strategy is epsilon-maximin. Expected part (when horizons are given):
// W(N) <= l + N * epsilon.
template <LearnerMachine L>
BoundReport check_approximate(const FamilyParams& params, const L& learner, double bound,
                              double epsilon, const std::vector<int>& horizons,
                              const CheckOptions& opt = {}) {
  const auto search = detail::guaranteed_search(params, learner, opt.state_cap);
  BoundReport r;
  r.params = params;
  r.learner = opt.learner_name;
  r.kind = CheckKind::Approximate;
  r.method = CheckMethod::Exhaustive;
  r.claimed = bound;
  r.epsilon = epsilon;
  r.measured = search.max_loss;
  r.exploitability = search.max_exploitability;
  r.pass = search.max_loss <= bound + kExactTolerance &&
           search.max_exploitability <= epsilon + kExactTolerance;
  r.detail = std::to_string(search.states) + " learner states";
  if (!horizons.empty()) {
    const int max_n = *std::max_element(horizons.begin(), horizons.end());
    const auto dp = worst_case_dp(params, learner, max_n, opt.state_cap);
    double worst_slack = -std::numeric_limits<double>::infinity();
    for (int n : horizons) {
      const double w = dp.value_by_horizon.at(n);
      r.by_horizon.emplace_back(n, w);
      worst_slack = std::max(worst_slack, w - (bound + n * epsilon));
    }
    r.pass = r.pass && worst_slack <= kExactTolerance;
    r.method = CheckMethod::Dp;
    r.detail += "; max over N of W(N) - (l + N*eps) = " + format_number(worst_slack);
  }
  return r;
}

// `c[i]` bounds epoch i. Every reachable learner state is one row group.
template <LearnerMachine L>
std::vector<LemmaRatioReport> lemma_ratio_check(const FamilyParams& params, const L& learner,
                                                const std::vector<double>& c,
                                                const CheckOptions& opt = {}) {
  const double value = game_value(params);
  const auto g =
      detail::explore(params, learner, value, opt.state_cap, [](const L&) { return true; });
  std::vector<LemmaRatioReport> reports;
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    const L& state = g.states[s];
    LemmaRatioReport rep;
    rep.epoch = state.epoch();
    rep.state = state.key();
    rep.strategy = MixedStrategy(state.act());
    const bool has_constant = rep.epoch >= 0 && rep.epoch < static_cast<int>(c.size());
    rep.c = has_constant ? c[rep.epoch] : std::numeric_limits<double>::quiet_NaN();
    rep.pass = has_constant;
    for (std::size_t a = 0; a < g.edges[s].size(); ++a) {
      LemmaRow row;
      row.a2 = static_cast<Action>(a) + 1;
      for (const auto& b : g.edges[s][a]) {
        row.lambda += b.prob * b.loss;
        if (g.states[b.to].epoch() != rep.epoch) row.p += b.prob;
      }
      row.pass = row.no_advantage() ? row.lambda <= kLemmaZeroTolerance
                                    : has_constant && row.ratio() <= rep.c + kExactTolerance;
      rep.pass = rep.pass && row.pass;
      rep.rows.push_back(row);
    }
    reports.push_back(std::move(rep));
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return a.epoch < b.epoch; });
  return reports;
}

inline bool all_pass(const std::vector<LemmaRatioReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

// ---------------------------------------------------------------------------
// Sweeps and claimed bounds.

// Folds per-game reports: passes iff all pass; keeps the worst measurement.
template <class Check>
BoundReport sweep_reports(const std::vector<FamilyParams>& games, Check&& check) {
  require(!games.empty(), "sweep over an empty family");
  BoundReport worst;
  bool first = true;
  bool pass = true;
  for (const auto& params : games) {
    BoundReport r = check(params);
    pass = pass && r.pass;
    const bool worse = first || (!r.pass && worst.pass) ||
                       (r.pass == worst.pass && r.measured > worst.measured) ||
                       (r.exploitability && worst.exploitability &&
                        r.pass == worst.pass && r.measured == worst.measured &&
                        *r.exploitability > *worst.exploitability);
    if (worse) worst = std::move(r);
    first = false;
  }
  worst.pass = pass;
  worst.games = static_cast<int>(games.size());
  return worst;
}

inline int ceil_log2(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

struct TheoremClaim {
  CheckKind kind = CheckKind::Guaranteed;
  double bound = 0.0;
  double epsilon = 0.0;
  std::vector<double> lemma_constants;  // empty unless the bound comes from epochs
};

// The bound each learner's theorem claims on the family of `params`.
inline std::optional<TheoremClaim> theorem_claim(const LearnerSpec& spec,
                                                 const FamilyParams& params) {
  TheoremClaim c;
  if (spec.name == "binary_search") {
    c.bound = ceil_log2(std::get<GetCloseParams>(params).n);
  } else if (spec.name == "approx_binary_search") {
    const int n = std::get<GetCloseParams>(params).n;
    c.kind = CheckKind::Approximate;
    c.bound = spec.r;
    c.epsilon = 1.0 - std::ldexp(1.0, spec.r) / n;
  } else if (spec.name == "chase_winner") {
    const auto& p = std::get<RpsDudsParams>(params);
    c.bound = p.n == 0 ? 0 : (p.m % 2 == 1 ? p.m : p.m - 1);
  } else if (spec.name == "random_orientation") {
    c.bound = std::get<RandomOrientationRpsDudsParams>(params).n == 0 ? 0 : 1;
  } else if (spec.name == "two_targets") {
    const auto& p = std::get<TwoTargetsParams>(params);
    c.kind = CheckKind::Expected;
    const int epochs = ceil_log2(p.n);
    c.bound = epochs * p.r1;
    c.lemma_constants.assign(epochs, p.r1);
    c.lemma_constants.push_back(0.0);
  } else if (spec.name == "dud_elimination") {
    const auto& p = std::get<MpDudsParams>(params);
    c.kind = CheckKind::Expected;
    c.bound = p.n;
    c.lemma_constants.assign(p.n, 1.0);
    c.lemma_constants.push_back(0.0);
  } else if (spec.name == "omniscient") {
    c.bound = 0.0;
  } else {
    return std::nullopt;
  }
  return c;
}

// ---------------------------------------------------------------------------
// JSON.

inline Json report_to_json(const BoundReport& r) {
  Json j;
  j["params"] = params_to_json(r.params);
  j["learner"] = r.learner;
  j["check"] = to_string(r.kind);
  j["method"] = to_string(r.method);
  j["claimed"] = r.claimed;
  if (std::isinf(r.measured))
    j["measured"] = "inf";
  else
    j["measured"] = r.measured;
  j["tolerance"] = r.tolerance;
  if (r.epsilon) j["epsilon"] = *r.epsilon;
  if (r.exploitability) j["exploitability"] = *r.exploitability;
  if (!r.by_horizon.empty()) {
    Json h = Json::array();
    for (const auto& [n, w] : r.by_horizon) h.push_back({{"N", n}, {"value", w}});
    j["by_horizon"] = h;
  }
  j["games"] = r.games;
  j["pass"] = r.pass;
  j["detail"] = r.detail;
  return j;
}

inline Json lemma_to_json(const FamilyParams& params, const std::string& learner,
                          const std::vector<LemmaRatioReport>& reports) {
  Json j;
  j["params"] = params_to_json(params);
  j["learner"] = learner;
  j["check"] = "lemma";
  j["method"] = "enumeration";
  Json epochs = Json::array();
  for (const auto& r : reports) {
    Json e;
    e["epoch"] = r.epoch;
    e["state"] = r.state;
    e["strategy"] = r.strategy.probs();
    e["c"] = std::isnan(r.c) ? Json(nullptr) : Json(r.c);
    Json rows = Json::array();
    for (const auto& row : r.rows) {
      Json jr{{"a2", row.a2}, {"lambda", row.lambda}, {"p", row.p}};
      if (row.no_advantage())
        jr["ratio"] = "no-advantage";
      else
        jr["ratio"] = row.ratio();
      jr["pass"] = row.pass;
      rows.push_back(jr);
    }
    e["rows"] = rows;
    e["pass"] = r.pass;
    epochs.push_back(e);
  }
  j["epochs"] = epochs;
  j["pass"] = all_pass(reports);
  return j;
}

}  // namespace lossbound
