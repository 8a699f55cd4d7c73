#pragma once

// The five parameterized game families. Actions are 1-based integers in
// {1..A}; the hidden parameters are the ones the learner must not read
// (k; f; f; k1,k2; D). Everything else is public.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lossbound/error.hpp"
#include "lossbound/rng.hpp"
#include "lossbound/stage_game.hpp"

namespace lossbound {

using Action = int;

struct GetCloseParams {
  int n = 0;
  int k = 0;  // hidden
};

struct RpsDudsParams {
  int m = 0;
  int n = 0;
  std::vector<int> f;  // hidden; f[i - 1] is the circle position of action i
};

struct RandomOrientationRpsDudsParams {
  int m = 0;
  int n = 0;
  std::vector<int> f;  // hidden
};

struct TwoTargetsParams {
  int n = 0;
  int k1 = 0;  // hidden
  int k2 = 0;  // hidden
  double p1 = 0.5;
  double p2 = 0.5;
  double r1 = 1.0;
  double r2 = 2.0;
};

struct MpDudsParams {
  int m = 0;
  int n = 0;
  std::vector<int> duds;  // hidden; sorted, |duds| == n
};

using FamilyParams = std::variant<GetCloseParams, RpsDudsParams, RandomOrientationRpsDudsParams,
                                  TwoTargetsParams, MpDudsParams>;

enum class FamilyKind { GetClose, RpsDuds, RandomOrientationRpsDuds, TwoTargets, MpDuds };

inline FamilyKind family_kind(const FamilyParams& p) { return static_cast<FamilyKind>(p.index()); }

inline std::string_view family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::GetClose: return "get_close";
    case FamilyKind::RpsDuds: return "rps_duds";
    case FamilyKind::RandomOrientationRpsDuds: return "random_orientation_rps_duds";
    case FamilyKind::TwoTargets: return "two_targets";
    case FamilyKind::MpDuds: return "mp_duds";
  }
  return "unknown";
}

inline FamilyKind parse_family_kind(std::string_view name) {
  for (auto kind : {FamilyKind::GetClose, FamilyKind::RpsDuds,
                    FamilyKind::RandomOrientationRpsDuds, FamilyKind::TwoTargets,
                    FamilyKind::MpDuds}) {
    if (family_name(kind) == name) return kind;
  }
  throw InvalidArgument("unknown family '" + std::string(name) + "'");
}

struct NatureDraw {
  enum class Kind { None, ActiveTarget, Orientation };
  Kind kind = Kind::None;
  int value = 0;  // target index 1/2, or orientation +1/-1

  static NatureDraw none() { return {}; }
  static NatureDraw target(int j) { return {Kind::ActiveTarget, j}; }
  static NatureDraw orientation(int sign) { return {Kind::Orientation, sign}; }

  std::string to_string() const {
    switch (kind) {
      case Kind::None: return "none";
      case Kind::ActiveTarget: return "T" + std::to_string(value);
      case Kind::Orientation: return value > 0 ? "+1" : "-1";
    }
    return "?";
  }

  friend bool operator==(const NatureDraw&, const NatureDraw&) = default;
};

// Everything the learner observes after a round (a1, a2, u1, u2, nature).
struct RoundOutcome {
  Action a1 = 0;
  Action a2 = 0;
  NatureDraw nature;
  double u1 = 0.0;
  double u2 = 0.0;

  bool learner_lost() const { return u1 < u2; }
  bool learner_drew() const { return u1 == u2; }
  bool learner_won() const { return u1 > u2; }
};

inline int num_actions(const FamilyParams& params) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GetCloseParams> || std::is_same_v<T, TwoTargetsParams>)
          return p.n;
        else
          return p.m + p.n;
      },
      params);
}

namespace detail {

inline void require_permutation(const std::vector<int>& f, int size) {
  require(static_cast<int>(f.size()) == size,
          "f must list " + std::to_string(size) + " values (one per action)");
  std::vector<int> sorted = f;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < size; ++i)
    require(sorted[i] == i + 1, "f is not a bijection on {1.." + std::to_string(size) + "}");
}

inline void require_action(Action a, int count, const char* who) {
  require(a >= 1 && a <= count, std::string(who) + " action " + std::to_string(a) +
                                    " outside {1.." + std::to_string(count) + "}");
}

// +1 if player 1 wins, -1 if player 2 wins, 0 for a draw.
inline int get_close_result(Action a1, Action a2, int k) {
  const int d1 = std::abs(a1 - k);
  const int d2 = std::abs(a2 - k);
  if (d1 < d2) return 1;
  if (d2 < d1) return -1;
  if (a1 == a2 && a1 != k) return a1 < k ? 1 : -1;
  return 0;
}

// Circle result for nonduds with positions f1, f2 in {1..m}: +1 when f1 is
// one step after f2 in the given orientation.
inline int circle_result(int f1, int f2, int m, int orientation) {
  const int diff = (((f1 - f2) * orientation) % m + m) % m;
  if (diff == 1) return 1;
  if (diff == m - 1) return -1;
  return 0;
}

inline int rps_result(const std::vector<int>& f, int m, Action a1, Action a2, int orientation) {
  const int f1 = f[a1 - 1];
  const int f2 = f[a2 - 1];
  const bool dud1 = f1 > m;
  const bool dud2 = f2 > m;
  if (dud1 && !dud2) return -1;
  if (dud2 && !dud1) return 1;
  if (dud1 && dud2) return 0;
  return circle_result(f1, f2, m, orientation);
}

inline bool is_member(const std::vector<int>& sorted, int x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace detail

inline void validate(const FamilyParams& params) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GetCloseParams>) {
          require(p.n >= 1, "n must be at least 1");
          require(p.k >= 1 && p.k <= p.n, "k must lie in {1..n}");
        } else if constexpr (std::is_same_v<T, RpsDudsParams> ||
                             std::is_same_v<T, RandomOrientationRpsDudsParams>) {
          require(p.m > 2, "m must be greater than 2");
          require(p.n >= 0, "n must be nonnegative");
          detail::require_permutation(p.f, p.m + p.n);
        } else if constexpr (std::is_same_v<T, TwoTargetsParams>) {
          require(p.n >= 2, "n must be at least 2");
          require(p.k1 >= 1 && p.k1 <= p.n, "k1 must lie in {1..n}");
          require(p.k2 >= 1 && p.k2 <= p.n, "k2 must lie in {1..n}");
          require(p.k1 != p.k2, "k1 and k2 must differ");
          require(p.p1 >= 0.0 && p.p1 <= 1.0, "p1 must be a probability");
          require(p.p2 >= 0.0 && p.p2 <= 1.0, "p2 must be a probability");
          require(std::abs(p.p1 + p.p2 - 1.0) <= kProbabilityTolerance, "p1 + p2 must equal 1");
          require(p.r1 > 0.0, "r1 must be positive");
          require(p.r2 > 0.0, "r2 must be positive");
          require(p.r1 != p.r2, "r1 and r2 must differ");
        } else {
          require(p.m > 0, "m must be positive");
          require(p.n >= 0, "n must be nonnegative");
          require(static_cast<int>(p.duds.size()) == p.n, "D must contain exactly n actions");
          require(std::is_sorted(p.duds.begin(), p.duds.end()) &&
                      std::adjacent_find(p.duds.begin(), p.duds.end()) == p.duds.end(),
                  "D must be sorted without repeats");
          for (int d : p.duds) require(d >= 1 && d <= p.m + p.n, "D entry outside {1..m+n}");
        }
      },
      params);
}

inline RoundOutcome resolve_outcome(const FamilyParams& params, Action a1, Action a2,
                                    NatureDraw nature) {
  const int count = num_actions(params);
  detail::require_action(a1, count, "player 1");
  detail::require_action(a2, count, "player 2");
  RoundOutcome out{a1, a2, nature, 0.0, 0.0};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GetCloseParams>) {
          require(nature.kind == NatureDraw::Kind::None, "get_close has no Nature move");
          const int r = detail::get_close_result(a1, a2, p.k);
          out.u1 = r;
          out.u2 = -r;
        } else if constexpr (std::is_same_v<T, RpsDudsParams>) {
          require(nature.kind == NatureDraw::Kind::None, "rps_duds has no Nature move");
          const int r = detail::rps_result(p.f, p.m, a1, a2, 1);
          out.u1 = r;
          out.u2 = -r;
        } else if constexpr (std::is_same_v<T, RandomOrientationRpsDudsParams>) {
          require(nature.kind == NatureDraw::Kind::Orientation &&
                      (nature.value == 1 || nature.value == -1),
                  "random_orientation_rps_duds needs an orientation draw");
          const int r = detail::rps_result(p.f, p.m, a1, a2, nature.value);
          out.u1 = r;
          out.u2 = -r;
        } else if constexpr (std::is_same_v<T, TwoTargetsParams>) {
          require(nature.kind == NatureDraw::Kind::ActiveTarget &&
                      (nature.value == 1 || nature.value == 2),
                  "two_targets needs an active-target draw");
          const int k = nature.value == 1 ? p.k1 : p.k2;
          const double reward = nature.value == 1 ? p.r1 : p.r2;
          const int r = detail::get_close_result(a1, a2, k);
          out.u1 = r > 0 ? reward : (r == 0 ? reward / 2 : 0.0);
          out.u2 = r < 0 ? reward : (r == 0 ? reward / 2 : 0.0);
        } else {
          require(nature.kind == NatureDraw::Kind::None, "mp_duds has no Nature move");
          const bool dud1 = detail::is_member(p.duds, a1);
          const bool dud2 = detail::is_member(p.duds, a2);
          bool p1_wins;
          if (dud1 != dud2)
            p1_wins = dud2;
          else
            p1_wins = a1 != a2;
          out.u1 = p1_wins ? 1.0 : 0.0;
          out.u2 = p1_wins ? 0.0 : 1.0;
        }
      },
      params);
  return out;
}

// Nature's move and its probability; a single None draw for deterministic
// families.
inline std::vector<std::pair<NatureDraw, double>> nature_distribution(const FamilyParams& params) {
  switch (family_kind(params)) {
    case FamilyKind::RandomOrientationRpsDuds:
      return {{NatureDraw::orientation(1), 0.5}, {NatureDraw::orientation(-1), 0.5}};
    case FamilyKind::TwoTargets: {
      const auto& p = std::get<TwoTargetsParams>(params);
      return {{NatureDraw::target(1), p.p1}, {NatureDraw::target(2), p.p2}};
    }
    default:
      return {{NatureDraw::none(), 1.0}};
  }
}

inline NatureDraw sample_nature(const FamilyParams& params, Rng& rng) {
  switch (family_kind(params)) {
    case FamilyKind::RandomOrientationRpsDuds:
      return NatureDraw::orientation(uniform01(rng) < 0.5 ? 1 : -1);
    case FamilyKind::TwoTargets:
      return NatureDraw::target(uniform01(rng) < std::get<TwoTargetsParams>(params).p1 ? 1 : 2);
    default:
      return NatureDraw::none();
  }
}

// Row a1-1, column a2-1 holds the distribution of u1 over Nature's move.
inline StageGame to_stage_game(const FamilyParams& params) {
  validate(params);
  const int count = num_actions(params);
  const auto nature = nature_distribution(params);
  std::vector<Lottery> entries;
  entries.reserve(static_cast<std::size_t>(count) * count);
  for (Action a1 = 1; a1 <= count; ++a1) {
    for (Action a2 = 1; a2 <= count; ++a2) {
      Lottery lottery;
      for (const auto& [draw, prob] : nature)
        lottery.push_back({prob, resolve_outcome(params, a1, a2, draw).u1});
      entries.push_back(std::move(lottery));
    }
  }
  std::optional<double> constant_sum;
  switch (family_kind(params)) {
    case FamilyKind::TwoTargets: break;  // u1 + u2 = r_j varies with Nature
    case FamilyKind::MpDuds: constant_sum = 1.0; break;
    default: constant_sum = 0.0;
  }
  return StageGame(count, count, std::move(entries), constant_sum);
}

inline double game_value(const FamilyParams& params) {
  return solve_maximin(to_stage_game(params)).value;
}

// ---------------------------------------------------------------------------
// Sweeps over the hidden parameters of a family.

struct SweepCaps {
  int get_close_n = 32;
  int rps_actions = 7;
  int mp_duds_actions = 8;
  int two_targets_n = 8;
};

// All games sharing the public fields of `shape`; its hidden fields are
// ignored.
inline std::vector<FamilyParams> enumerate_hidden(const FamilyParams& shape,
                                                  const SweepCaps& caps = {}) {
  std::vector<FamilyParams> out;
  auto all_permutations = [](int size) {
    std::vector<std::vector<int>> perms;
    std::vector<int> f(size);
    std::iota(f.begin(), f.end(), 1);
    do perms.push_back(f);
    while (std::next_permutation(f.begin(), f.end()));
    return perms;
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GetCloseParams>) {
          if (p.n > caps.get_close_n)
            throw CapExceeded("get_close sweep limited to n <= " + std::to_string(caps.get_close_n));
          for (int k = 1; k <= p.n; ++k) out.push_back(GetCloseParams{p.n, k});
        } else if constexpr (std::is_same_v<T, RpsDudsParams> ||
                             std::is_same_v<T, RandomOrientationRpsDudsParams>) {
          if (p.m + p.n > caps.rps_actions)
            throw CapExceeded("rps sweep limited to m + n <= " + std::to_string(caps.rps_actions));
          for (auto& f : all_permutations(p.m + p.n)) out.push_back(T{p.m, p.n, std::move(f)});
        } else if constexpr (std::is_same_v<T, TwoTargetsParams>) {
          if (p.n > caps.two_targets_n)
            throw CapExceeded("two_targets sweep limited to n <= " +
                              std::to_string(caps.two_targets_n));
          for (int k1 = 1; k1 <= p.n; ++k1)
            for (int k2 = 1; k2 <= p.n; ++k2)
              if (k1 != k2) out.push_back(TwoTargetsParams{p.n, k1, k2, p.p1, p.p2, p.r1, p.r2});
        } else {
          const int total = p.m + p.n;
          if (total > caps.mp_duds_actions)
            throw CapExceeded("mp_duds sweep limited to m + n <= " +
                              std::to_string(caps.mp_duds_actions));
          for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
            if (std::popcount(mask) != p.n) continue;
            std::vector<int> duds;
            for (int i = 0; i < total; ++i)
              if (mask & (1u << i)) duds.push_back(i + 1);
            out.push_back(MpDudsParams{p.m, p.n, std::move(duds)});
          }
        }
      },
      shape);
  for (const auto& params : out) validate(params);
  return out;
}

}  // namespace lossbound
