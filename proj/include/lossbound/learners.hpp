#pragma once

// Learning strategies as immutable-step state machines. Every learner
// satisfies LearnerMachine:
//   act()       stage strategy for the current epoch (index a-1 <-> action a)
//   observe(o)  successor state after a round
//   learned()   a maximin (or epsilon()-maximin) strategy is being played
//   epoch()     number of learning events so far
//   key()       short string identifying the state, used for memoization
//
// The stage strategy is cached per epoch and only recomputed when the epoch
// index moves.

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lossbound/error.hpp"
#include "lossbound/families.hpp"
#include "lossbound/knowledge.hpp"
#include "lossbound/stage_game.hpp"

namespace lossbound {

template <class L>
concept LearnerMachine = std::copyable<L> && requires(const L& l, const RoundOutcome& o) {
  { l.act() } -> std::convertible_to<MixedStrategy>;
  { l.observe(o) } -> std::same_as<L>;
  { l.learned() } -> std::convertible_to<bool>;
  { l.epoch() } -> std::convertible_to<int>;
  { l.epsilon() } -> std::convertible_to<double>;
  { l.key() } -> std::convertible_to<std::string>;
};

struct LearnerState {
  KnowledgeState knowledge;
  int epoch_index = 0;
  bool learned = false;
  MixedStrategy strategy_cache;
};

namespace detail {

inline int floor_midpoint(const IntervalKnowledge& s) { return (s.lo + s.hi) / 2; }

inline std::vector<std::size_t> interval_indices(const IntervalKnowledge& s) {
  std::vector<std::size_t> idx;
  for (int a = s.lo; a <= s.hi; ++a) idx.push_back(static_cast<std::size_t>(a - 1));
  return idx;
}

inline std::string state_suffix(const LearnerState& s) {
  return (s.learned ? "|L" : "|-") + std::to_string(s.epoch_index);
}

}  // namespace detail

// get_close: play the floor midpoint of the consistent interval; once the
// interval is a single k, play k.
class BinarySearchLearner {
 public:
  explicit BinarySearchLearner(int n) : n_(n) {
    require(n >= 1, "binary search needs n >= 1");
    state_.knowledge = IntervalKnowledge{1, n};
    refresh();
  }

  const MixedStrategy& act() const { return state_.strategy_cache; }
  bool learned() const { return state_.learned; }
  int epoch() const { return state_.epoch_index; }
  double epsilon() const { return 0.0; }
  const LearnerState& state() const { return state_; }
  const IntervalKnowledge& interval() const { return std::get<IntervalKnowledge>(state_.knowledge); }
  std::string key() const { return knowledge_key(state_.knowledge) + detail::state_suffix(state_); }

  BinarySearchLearner observe(const RoundOutcome& o) const {
    if (state_.learned) return *this;
    BinarySearchLearner next = *this;
    next.state_.knowledge = update_knowledge(state_.knowledge, o);
    if (next.interval() != interval()) {
      ++next.state_.epoch_index;
      next.refresh();
    }
    return next;
  }

 private:
  void refresh() {
    const auto& s = interval();
    state_.learned = s.singleton();
    state_.strategy_cache = MixedStrategy::pure(n_, detail::floor_midpoint(s) - 1);
  }

  int n_;
  LearnerState state_;
};

// Binary search that stops after `budget` losses and randomizes uniformly
// over whatever interval remains, which is a (1 - 2^budget / n)-maximin
// strategy.
class ApproxBinarySearchLearner {
 public:
  ApproxBinarySearchLearner(int n, int budget) : n_(n), budget_(budget) {
    require(n >= 2, "approximate binary search needs n >= 2");
    require(budget >= 0, "loss budget must be nonnegative");
    require(std::ldexp(1.0, budget) < n, "loss budget r must satisfy r < log2(n); use the exact learner");
    state_.knowledge = IntervalKnowledge{1, n};
    refresh();
  }

  const MixedStrategy& act() const { return state_.strategy_cache; }
  bool learned() const { return state_.learned; }
  int epoch() const { return state_.epoch_index; }
  double epsilon() const { return 1.0 - std::ldexp(1.0, budget_) / n_; }
  int losses() const { return losses_; }
  const LearnerState& state() const { return state_; }
  const IntervalKnowledge& interval() const { return std::get<IntervalKnowledge>(state_.knowledge); }
  std::string key() const {
    return knowledge_key(state_.knowledge) + "#" + std::to_string(losses_) +
           detail::state_suffix(state_);
  }

  ApproxBinarySearchLearner observe(const RoundOutcome& o) const {
    if (state_.learned) return *this;
    ApproxBinarySearchLearner next = *this;
    if (o.learner_lost()) ++next.losses_;
    next.state_.knowledge = update_knowledge(state_.knowledge, o);
    if (next.interval() != interval() || next.losses_ != losses_) {
      ++next.state_.epoch_index;
      next.refresh();
    }
    return next;
  }

 private:
  void refresh() {
    const auto& s = interval();
    if (s.singleton()) {
      state_.learned = true;
      state_.strategy_cache = MixedStrategy::pure(n_, s.lo - 1);
    } else if (losses_ >= budget_) {
      state_.learned = true;
      const auto idx = detail::interval_indices(s);
      state_.strategy_cache = MixedStrategy::uniform_over(n_, idx);
    } else {
      state_.strategy_cache = MixedStrategy::pure(n_, detail::floor_midpoint(s) - 1);
    }
  }

  int n_;
  int budget_;
  int losses_ = 0;
  LearnerState state_;
};

// rps_duds: play action 1, then always the action the opponent last won
// with. Each loss reveals the next nondud of the circle.
class ChaseWinnerLearner {
 public:
  ChaseWinnerLearner(int m, int n) : m_(m), n_(n) {
    require(m > 2 && n >= 0, "chase-the-winner needs m > 2 and n >= 0");
    state_.knowledge = ChainKnowledge{};
    if (n_ == 0) {
      state_.learned = true;
      state_.strategy_cache = MixedStrategy::uniform(actions());
    } else {
      state_.strategy_cache = MixedStrategy::pure(actions(), 0);
    }
  }

  const MixedStrategy& act() const { return state_.strategy_cache; }
  bool learned() const { return state_.learned; }
  int epoch() const { return state_.epoch_index; }
  double epsilon() const { return 0.0; }
  const LearnerState& state() const { return state_; }
  const std::vector<Action>& chain() const { return std::get<ChainKnowledge>(state_.knowledge).chain; }
  std::string key() const { return knowledge_key(state_.knowledge) + detail::state_suffix(state_); }

  ChaseWinnerLearner observe(const RoundOutcome& o) const {
    if (state_.learned || !o.learner_lost()) return *this;
    ChaseWinnerLearner next = *this;
    next.state_.knowledge = update_knowledge(state_.knowledge, o);
    ++next.state_.epoch_index;
    const auto& c = next.chain();
    const int needed = m_ % 2 == 1 ? m_ : m_ - 1;
    if (static_cast<int>(c.size()) >= needed) {
      next.state_.learned = true;
      std::vector<std::size_t> support;
      // Odd m: the whole circle. Even m: every other nondud, starting from
      // the first revealed one, which fixes one parity class.
      const std::size_t stride = m_ % 2 == 1 ? 1 : 2;
      for (std::size_t i = 0; i < c.size(); i += stride) support.push_back(c[i] - 1);
      next.state_.strategy_cache = MixedStrategy::uniform_over(actions(), support);
    } else {
      next.state_.strategy_cache = MixedStrategy::pure(actions(), o.a2 - 1);
    }
    return next;
  }

 private:
  int actions() const { return m_ + n_; }

  int m_;
  int n_;
  LearnerState state_;
};

// random_orientation_rps_duds: any nondud is maximin, and the first action
// that beats us is a nondud.
class RandomOrientationLearner {
 public:
  RandomOrientationLearner(int m, int n) : m_(m), n_(n) {
    require(m > 2 && n >= 0, "random-orientation learner needs m > 2 and n >= 0");
    state_.knowledge = KnownNondudKnowledge{};
    state_.learned = n_ == 0;
    state_.strategy_cache = MixedStrategy::pure(m_ + n_, 0);
  }

  const MixedStrategy& act() const { return state_.strategy_cache; }
  bool learned() const { return state_.learned; }
  int epoch() const { return state_.epoch_index; }
  double epsilon() const { return 0.0; }
  const LearnerState& state() const { return state_; }
  std::string key() const { return knowledge_key(state_.knowledge) + detail::state_suffix(state_); }

  RandomOrientationLearner observe(const RoundOutcome& o) const {
    if (state_.learned || !o.learner_lost()) return *this;
    RandomOrientationLearner next = *this;
    next.state_.knowledge = update_knowledge(state_.knowledge, o);
    ++next.state_.epoch_index;
    next.state_.learned = true;
    next.state_.strategy_cache = MixedStrategy::pure(m_ + n_, o.a2 - 1);
    return next;
  }

 private:
  int m_;
  int n_;
  LearnerState state_;
};

// two_targets: binary search on k1 that only reacts to rounds where k1 was
// active and the learner lost or drew. Requires p1*r1 >= 2*p2*r2, under
// which playing k1 is maximin.
class TwoTargetsLearner {
 public:
  TwoTargetsLearner(int n, double p1, double p2, double r1, double r2) : n_(n) {
    require(n >= 2, "two-targets learner needs n >= 2");
    require(p1 * r1 >= 2.0 * p2 * r2,
            "two-targets learner requires p1*r1 >= 2*p2*r2 (no bound is claimed otherwise)");
    state_.knowledge = TargetIntervalKnowledge{{1, n}};
    refresh();
  }

  const MixedStrategy& act() const { return state_.strategy_cache; }
  bool learned() const { return state_.learned; }
  int epoch() const { return state_.epoch_index; }
  double epsilon() const { return 0.0; }
  const LearnerState& state() const { return state_; }
  const IntervalKnowledge& interval() const {
    return std::get<TargetIntervalKnowledge>(state_.knowledge).k1;
  }
  std::string key() const { return knowledge_key(state_.knowledge) + detail::state_suffix(state_); }

  TwoTargetsLearner observe(const RoundOutcome& o) const {
    if (state_.learned) return *this;
    TwoTargetsLearner next = *this;
    next.state_.knowledge = update_knowledge(state_.knowledge, o);
    if (next.interval() != interval()) {
      ++next.state_.epoch_index;
      next.refresh();
    }
    return next;
  }

 private:
  void refresh() {
    const auto& s = interval();
    state_.learned = s.singleton();
    state_.strategy_cache = MixedStrategy::pure(n_, detail::floor_midpoint(s) - 1);
  }

  int n_;
  LearnerState state_;
};

// mp_duds: uniform over every action not yet known to be a dud.
class DudEliminationLearner {
 public:
  DudEliminationLearner(int m, int n) : m_(m), n_(n) {
    require(m > 0 && n >= 0, "dud elimination needs m > 0 and n >= 0");
    state_.knowledge = DudSetKnowledge{};
    refresh();
  }

  const MixedStrategy& act() const { return state_.strategy_cache; }
  bool learned() const { return state_.learned; }
  int epoch() const { return state_.epoch_index; }
  double epsilon() const { return 0.0; }
  const LearnerState& state() const { return state_; }
  const std::vector<Action>& duds() const { return std::get<DudSetKnowledge>(state_.knowledge).duds; }
  std::string key() const { return knowledge_key(state_.knowledge) + detail::state_suffix(state_); }

  DudEliminationLearner observe(const RoundOutcome& o) const {
    if (state_.learned) return *this;
    DudEliminationLearner next = *this;
    next.state_.knowledge = update_knowledge(state_.knowledge, o);
    if (next.duds() != duds()) {
      ++next.state_.epoch_index;
      next.refresh();
    }
    return next;
  }

 private:
  void refresh() {
    std::vector<std::size_t> support;
    for (Action a = 1; a <= m_ + n_; ++a)
      if (!detail::is_member(duds(), a)) support.push_back(static_cast<std::size_t>(a - 1));
    state_.strategy_cache = MixedStrategy::uniform_over(m_ + n_, support);
    state_.learned = static_cast<int>(duds().size()) == n_;
  }

  int m_;
  int n_;
  LearnerState state_;
};

// Baseline that is told the hidden parameters and plays the true maximin.
class OmniscientLearner {
 public:
  explicit OmniscientLearner(const FamilyParams& params)
      : strategy_(solve_maximin(to_stage_game(params)).strategy1) {}

  const MixedStrategy& act() const { return strategy_; }
  bool learned() const { return true; }
  int epoch() const { return 0; }
  double epsilon() const { return 0.0; }
  std::string key() const { return "omniscient"; }
  OmniscientLearner observe(const RoundOutcome&) const { return *this; }

 private:
  MixedStrategy strategy_;
};

class UniformLearner {
 public:
  explicit UniformLearner(int actions) : strategy_(MixedStrategy::uniform(actions)) {}

  const MixedStrategy& act() const { return strategy_; }
  bool learned() const { return false; }
  int epoch() const { return 0; }
  double epsilon() const { return 0.0; }
  std::string key() const { return "uniform"; }
  UniformLearner observe(const RoundOutcome&) const { return *this; }

 private:
  MixedStrategy strategy_;
};

// Plays `Inner` until it reports learned, then freezes the strategy it had
// at that moment and plays it forever.
template <LearnerMachine Inner>
class MaximinWrap {
 public:
  explicit MaximinWrap(Inner inner) : inner_(std::move(inner)) {
    if (inner_.learned()) frozen_ = MixedStrategy(inner_.act());
  }

  MixedStrategy act() const { return frozen_ ? *frozen_ : MixedStrategy(inner_.act()); }
  bool learned() const { return frozen_.has_value(); }
  int epoch() const { return inner_.epoch(); }
  double epsilon() const { return inner_.epsilon(); }
  const Inner& inner() const { return inner_; }
  std::string key() const { return std::string(frozen_ ? "W*" : "W-") + inner_.key(); }

  MaximinWrap observe(const RoundOutcome& o) const {
    if (frozen_) return *this;
    return MaximinWrap(inner_.observe(o));
  }

 private:
  Inner inner_;
  std::optional<MixedStrategy> frozen_;
};

template <LearnerMachine Inner>
MaximinWrap<Inner> wrap_with_maximin(Inner inner) {
  return MaximinWrap<Inner>(std::move(inner));
}

// ---------------------------------------------------------------------------
// Runtime selection.

struct LearnerSpec {
  std::string name;  // binary_search, approx_binary_search, chase_winner, random_orientation,
                     // two_targets, dud_elimination, omniscient, uniform
  int r = -1;        // loss budget for approx_binary_search
  bool wrap = false;
};

inline const std::vector<std::string>& learner_names() {
  static const std::vector<std::string> names = {
      "binary_search",  "approx_binary_search", "chase_winner", "random_orientation",
      "two_targets",    "dud_elimination",      "omniscient",   "uniform"};
  return names;
}

class AnyLearner {
 public:
  using Variant = std::variant<BinarySearchLearner, ApproxBinarySearchLearner, ChaseWinnerLearner,
                               RandomOrientationLearner, TwoTargetsLearner, DudEliminationLearner,
                               OmniscientLearner, UniformLearner>;

  template <class L>
    requires std::constructible_from<Variant, L>
  AnyLearner(L learner) : v_(std::move(learner)) {}  // NOLINT(google-explicit-constructor)

  MixedStrategy act() const {
    return std::visit([](const auto& l) { return MixedStrategy(l.act()); }, v_);
  }
  bool learned() const { return std::visit([](const auto& l) { return l.learned(); }, v_); }
  int epoch() const { return std::visit([](const auto& l) { return l.epoch(); }, v_); }
  double epsilon() const { return std::visit([](const auto& l) { return l.epsilon(); }, v_); }
  std::string key() const { return std::visit([](const auto& l) { return l.key(); }, v_); }
  AnyLearner observe(const RoundOutcome& o) const {
    return std::visit([&](const auto& l) { return AnyLearner(l.observe(o)); }, v_);
  }
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

// Builds the learner named in `spec` for the family of `params`. Only the
// public fields of `params` are read, except by the omniscient baseline.
inline AnyLearner make_learner(const LearnerSpec& spec, const FamilyParams& params) {
  validate(params);
  const FamilyKind kind = family_kind(params);
  auto need = [&](FamilyKind expected) {
    require(kind == expected, "learner '" + spec.name + "' does not apply to family '" +
                                  std::string(family_name(kind)) + "'");
  };
  if (spec.name == "binary_search") {
    need(FamilyKind::GetClose);
    return BinarySearchLearner(std::get<GetCloseParams>(params).n);
  }
  if (spec.name == "approx_binary_search") {
    need(FamilyKind::GetClose);
    require(spec.r >= 0, "approx_binary_search needs a loss budget r");
    return ApproxBinarySearchLearner(std::get<GetCloseParams>(params).n, spec.r);
  }
  if (spec.name == "chase_winner") {
    need(FamilyKind::RpsDuds);
    const auto& p = std::get<RpsDudsParams>(params);
    return ChaseWinnerLearner(p.m, p.n);
  }
  if (spec.name == "random_orientation") {
    need(FamilyKind::RandomOrientationRpsDuds);
    const auto& p = std::get<RandomOrientationRpsDudsParams>(params);
    return RandomOrientationLearner(p.m, p.n);
  }
  if (spec.name == "two_targets") {
    need(FamilyKind::TwoTargets);
    const auto& p = std::get<TwoTargetsParams>(params);
    return TwoTargetsLearner(p.n, p.p1, p.p2, p.r1, p.r2);
  }
  if (spec.name == "dud_elimination") {
    need(FamilyKind::MpDuds);
    const auto& p = std::get<MpDudsParams>(params);
    return DudEliminationLearner(p.m, p.n);
  }
  if (spec.name == "omniscient") return OmniscientLearner(params);
  if (spec.name == "uniform") return UniformLearner(num_actions(params));
  throw InvalidArgument("unknown learner '" + spec.name + "'");
}

// The learner each family's theorem is about.
inline std::string default_learner_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::GetClose: return "binary_search";
    case FamilyKind::RpsDuds: return "chase_winner";
    case FamilyKind::RandomOrientationRpsDuds: return "random_orientation";
    case FamilyKind::TwoTargets: return "two_targets";
    case FamilyKind::MpDuds: return "dud_elimination";
  }
  return "uniform";
}

}  // namespace lossbound
