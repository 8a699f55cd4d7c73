#pragma once

// Per-family summaries of the hidden parameters still consistent with the
// observed history, and the update rules the learners use.

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lossbound/error.hpp"
#include "lossbound/families.hpp"

namespace lossbound {

// k (get_close) or k1 (two_targets) lies in {lo..hi}.
struct IntervalKnowledge {
  int lo = 1;
  int hi = 1;

  int size() const { return hi - lo + 1; }
  bool singleton() const { return lo == hi; }
  friend bool operator==(const IntervalKnowledge&, const IntervalKnowledge&) = default;
};

// Revealed nonduds in circle order: chain[0] is a known nondud and every
// later entry is the successor of the one before it.
struct ChainKnowledge {
  std::vector<Action> chain;
  bool first_loss_seen = false;
  friend bool operator==(const ChainKnowledge&, const ChainKnowledge&) = default;
};

struct KnownNondudKnowledge {
  std::optional<Action> nondud;
  friend bool operator==(const KnownNondudKnowledge&, const KnownNondudKnowledge&) = default;
};

struct DudSetKnowledge {
  std::vector<Action> duds;  // sorted
  friend bool operator==(const DudSetKnowledge&, const DudSetKnowledge&) = default;
};

struct TargetIntervalKnowledge {
  IntervalKnowledge k1;
  friend bool operator==(const TargetIntervalKnowledge&, const TargetIntervalKnowledge&) = default;
};

using KnowledgeState = std::variant<IntervalKnowledge, ChainKnowledge, KnownNondudKnowledge,
                                    DudSetKnowledge, TargetIntervalKnowledge>;

// What the learner knows before round 1 (public fields only).
inline KnowledgeState initial_knowledge(const FamilyParams& params) {
  switch (family_kind(params)) {
    case FamilyKind::GetClose: return IntervalKnowledge{1, std::get<GetCloseParams>(params).n};
    case FamilyKind::RpsDuds: return ChainKnowledge{};
    case FamilyKind::RandomOrientationRpsDuds: return KnownNondudKnowledge{};
    case FamilyKind::MpDuds: return DudSetKnowledge{};
    case FamilyKind::TwoTargets:
      return TargetIntervalKnowledge{{1, std::get<TwoTargetsParams>(params).n}};
  }
  throw InvalidArgument("unknown family");
}

namespace detail {

// A lost round says the target is on player 2's side of a1; a drawn round
// pins it to the average of the two actions.
inline IntervalKnowledge narrow_interval(IntervalKnowledge s, const RoundOutcome& o) {
  if (o.learner_drew()) {
    if ((o.a1 + o.a2) % 2 != 0)
      throw InconsistentObservation("draw with an odd action sum cannot occur");
    const int k = (o.a1 + o.a2) / 2;
    if (k < s.lo || k > s.hi)
      throw InconsistentObservation("draw points outside the consistent interval");
    return {k, k};
  }
  if (o.learner_lost()) {
    if (o.a2 <= o.a1)
      s.hi = std::min(s.hi, o.a1 - 1);
    else
      s.lo = std::max(s.lo, o.a1 + 1);
    if (s.lo > s.hi) throw InconsistentObservation("loss eliminates every remaining target");
  }
  return s;
}

}  // namespace detail

// Updates only on the events the learners treat as informative; wins and
// uninformative rounds leave the state unchanged.
inline KnowledgeState update_knowledge(const KnowledgeState& state, const RoundOutcome& o) {
  return std::visit(
      [&](const auto& s) -> KnowledgeState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalKnowledge>) {
          return detail::narrow_interval(s, o);
        } else if constexpr (std::is_same_v<T, ChainKnowledge>) {
          if (!o.learner_lost()) return s;
          ChainKnowledge next = s;
          const bool extends = s.chain.empty() || s.chain.back() == o.a1;
          const bool fresh = std::find(s.chain.begin(), s.chain.end(), o.a2) == s.chain.end();
          if (extends && fresh) next.chain.push_back(o.a2);
          next.first_loss_seen = true;
          return next;
        } else if constexpr (std::is_same_v<T, KnownNondudKnowledge>) {
          if (!o.learner_lost() || s.nondud) return s;
          return KnownNondudKnowledge{o.a2};
        } else if constexpr (std::is_same_v<T, DudSetKnowledge>) {
          if (!o.learner_lost() || o.a1 == o.a2) return s;
          DudSetKnowledge next = s;
          auto it = std::lower_bound(next.duds.begin(), next.duds.end(), o.a1);
          if (it == next.duds.end() || *it != o.a1) next.duds.insert(it, o.a1);
          return next;
        } else {
          if (o.nature != NatureDraw::target(1) || o.learner_won()) return s;
          return TargetIntervalKnowledge{detail::narrow_interval(s.k1, o)};
        }
      },
      state);
}

// True when the hidden parameters of `params` are not ruled out by `state`.
inline bool is_consistent(const KnowledgeState& state, const FamilyParams& params) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalKnowledge>) {
          const auto* p = std::get_if<GetCloseParams>(&params);
          return p && s.lo <= p->k && p->k <= s.hi;
        } else if constexpr (std::is_same_v<T, ChainKnowledge>) {
          const auto* p = std::get_if<RpsDudsParams>(&params);
          if (!p) return false;
          for (std::size_t i = 0; i < s.chain.size(); ++i) {
            const int pos = p->f[s.chain[i] - 1];
            if (pos > p->m) return false;
            if (i > 0) {
              const int prev = p->f[s.chain[i - 1] - 1];
              if (pos % p->m != (prev % p->m + 1) % p->m) return false;
            }
          }
          return true;
        } else if constexpr (std::is_same_v<T, KnownNondudKnowledge>) {
          const auto* p = std::get_if<RandomOrientationRpsDudsParams>(&params);
          return p && (!s.nondud || p->f[*s.nondud - 1] <= p->m);
        } else if constexpr (std::is_same_v<T, DudSetKnowledge>) {
          const auto* p = std::get_if<MpDudsParams>(&params);
          if (!p) return false;
          return std::all_of(s.duds.begin(), s.duds.end(),
                             [&](Action d) { return detail::is_member(p->duds, d); });
        } else {
          const auto* p = std::get_if<TwoTargetsParams>(&params);
          return p && s.k1.lo <= p->k1 && p->k1 <= s.k1.hi;
        }
      },
      state);
}

inline std::string knowledge_key(const KnowledgeState& state) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalKnowledge>) {
          return "I" + std::to_string(s.lo) + "," + std::to_string(s.hi);
        } else if constexpr (std::is_same_v<T, ChainKnowledge>) {
          std::string k = s.first_loss_seen ? "C+" : "C-";
          for (Action a : s.chain) k += std::to_string(a) + ".";
          return k;
        } else if constexpr (std::is_same_v<T, KnownNondudKnowledge>) {
          return s.nondud ? "N" + std::to_string(*s.nondud) : "N?";
        } else if constexpr (std::is_same_v<T, DudSetKnowledge>) {
          std::string k = "D";
          for (Action a : s.duds) k += std::to_string(a) + ".";
          return k;
        } else {
          return "T" + std::to_string(s.k1.lo) + "," + std::to_string(s.k1.hi);
        }
      },
      state);
}

}  // namespace lossbound
