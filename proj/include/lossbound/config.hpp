#pragma once

// Experiment configuration: a JSON document, optionally overridden field by
// field from command-line flags (flags win).
//
//   {
//     "family": "get_close",
//     "params": {"n": 16, "k": 11},
//     "learner": {"name": "binary_search", "r": 2, "wrap": false},
//     "opponent": {"name": "worst_case_dp", "script": [1, 2]},
//     "rounds": 100, "episodes": 10000, "seed": 0, "out": "run1",
//     "checks": [{"kind": "guaranteed", "bound": 4, "epsilon": 0.75,
//                 "horizons": [1, 2, 3], "c": [1, 0]}]
//   }
//
// "learner" and "opponent" may also be plain strings. Hidden parameters may
// be omitted for `sweep`.

#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lossbound/error.hpp"
#include "lossbound/families.hpp"
#include "lossbound/io.hpp"
#include "lossbound/learners.hpp"
#include "lossbound/opponents.hpp"
#include "lossbound/verify.hpp"

namespace lossbound {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct CheckSpec {
  CheckKind kind = CheckKind::Guaranteed;
  std::optional<double> bound;
  std::optional<double> epsilon;
  std::vector<int> horizons;
  std::vector<double> lemma_constants;
};

struct ExperimentConfig {
  FamilyKind family = FamilyKind::GetClose;
  FamilyParams params;  // hidden fields hold placeholders unless hidden_given
  bool hidden_given = false;
  LearnerSpec learner;
  std::string opponent = "worst_case_dp";
  std::vector<Action> opponent_script;
  int rounds = 100;
  int episodes = 10'000;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<CheckSpec> checks;
};

inline const std::vector<std::string>& opponent_names() {
  static const std::vector<std::string> names = {"worst_case_dp",  "middle_camper", "best_response",
                                                 "match_probable", "uniform_random", "scripted"};
  return names;
}

// Command-line overrides, already split into fields.
struct ConfigOverrides {
  std::optional<std::string> family;
  std::vector<std::string> params;  // "key=value"; value may be a comma list
  std::optional<std::string> learner;
  std::optional<int> budget;
  bool wrap = false;
  std::optional<std::string> opponent;
  std::optional<std::string> script_file;
  std::optional<int> rounds;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> checks;
  std::optional<double> bound;
  std::optional<double> epsilon;
  std::optional<std::string> horizons;  // "1-30" or "1,5,10"
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

inline Json parse_scalar_or_list(const std::string& text) {
  auto parse_one = [&](const std::string& s) -> Json {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return Json(v);
    } catch (const std::exception&) {
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return Json(v);
    } catch (const std::exception&) {
    }
    throw ConfigError("cannot parse number '" + s + "'");
  };
  if (text.find(',') == std::string::npos) return parse_one(text);
  Json list = Json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) list.push_back(parse_one(item));
  return list;
}

inline std::vector<int> parse_horizons(const std::string& text) {
  std::vector<int> out;
  const auto dash = text.find('-');
  try {
    if (dash != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dash));
      const int hi = std::stoi(text.substr(dash + 1));
      if (lo < 1 || hi < lo) throw ConfigError("bad horizon range '" + text + "'");
      for (int n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse horizons '" + text + "'");
  }
  for (int n : out)
    if (n < 1) throw ConfigError("horizons must be positive");
  return out;
}

}  // namespace detail

// Folds flag overrides into the JSON document.
inline Json apply_overrides(Json doc, const ConfigOverrides& o) {
  if (doc.is_null()) doc = Json::object();
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (o.family) {
    if (doc.contains("family") && doc["family"] != *o.family) doc["params"] = Json::object();
    doc["family"] = *o.family;
  }
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--param expects key=value, got '" + kv + "'");
    if (!doc.contains("params")) doc["params"] = Json::object();
    doc["params"][kv.substr(0, eq)] = detail::parse_scalar_or_list(kv.substr(eq + 1));
  }
  auto learner_obj = [&]() -> Json& {
    if (!doc.contains("learner")) doc["learner"] = Json::object();
    if (doc["learner"].is_string()) doc["learner"] = Json{{"name", doc["learner"]}};
    return doc["learner"];
  };
  if (o.learner) learner_obj()["name"] = *o.learner;
  if (o.budget) learner_obj()["r"] = *o.budget;
  if (o.wrap) learner_obj()["wrap"] = true;
  auto opponent_obj = [&]() -> Json& {
    if (!doc.contains("opponent")) doc["opponent"] = Json::object();
    if (doc["opponent"].is_string()) doc["opponent"] = Json{{"name", doc["opponent"]}};
    return doc["opponent"];
  };
  if (o.opponent) opponent_obj()["name"] = *o.opponent;
  if (o.script_file) {
    Json& opp = opponent_obj();
    opp["script"] = load_action_script(*o.script_file);
    if (!opp.contains("name")) opp["name"] = "scripted";
  }
  if (o.rounds) doc["rounds"] = *o.rounds;
  if (o.episodes) doc["episodes"] = *o.episodes;
  if (o.seed) doc["seed"] = *o.seed;
  if (o.out) doc["out"] = *o.out;
  if (!o.checks.empty()) {
    Json checks = Json::array();
    for (const auto& kind : o.checks) checks.push_back(Json{{"kind", kind}});
    doc["checks"] = checks;
  }
  if (o.bound || o.epsilon || o.horizons) {
    if (!doc.contains("checks") || doc["checks"].empty())
      throw ConfigError("--bound/--epsilon/--horizons need a --check");
    for (auto& c : doc["checks"]) {
      if (o.bound) c["bound"] = *o.bound;
      if (o.epsilon) c["epsilon"] = *o.epsilon;
      if (o.horizons) c["horizons"] = detail::parse_horizons(*o.horizons);
    }
  }
  return doc;
}

// Validates the whole document; every error names the offending field.
inline ExperimentConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(doc,
                         {"family", "params", "learner", "opponent", "rounds", "episodes", "seed",
                          "out", "checks"},
                         "config");
  ExperimentConfig cfg;
  try {
    if (!doc.contains("family") || !doc["family"].is_string())
      throw ConfigError("field 'family' is required");
    cfg.family = parse_family_kind(doc["family"].get<std::string>());
    const Json fields = doc.contains("params") ? doc["params"] : Json::object();
    cfg.params = params_from_json(cfg.family, fields, /*allow_missing_hidden=*/true);
    switch (cfg.family) {
      case FamilyKind::GetClose: cfg.hidden_given = fields.contains("k"); break;
      case FamilyKind::RpsDuds:
      case FamilyKind::RandomOrientationRpsDuds: cfg.hidden_given = fields.contains("f"); break;
      case FamilyKind::TwoTargets:
        cfg.hidden_given = fields.contains("k1") && fields.contains("k2");
        break;
      case FamilyKind::MpDuds: cfg.hidden_given = fields.contains("D"); break;
    }

    cfg.learner.name = default_learner_name(cfg.family);
    if (doc.contains("learner")) {
      const Json& l = doc["learner"];
      if (l.is_string()) {
        cfg.learner.name = l.get<std::string>();
      } else if (l.is_object()) {
        detail::reject_unknown(l, {"name", "r", "wrap"}, "learner");
        if (l.contains("name")) cfg.learner.name = l["name"].get<std::string>();
        if (l.contains("r")) cfg.learner.r = detail::json_int(l["r"], "learner.r");
        if (l.contains("wrap")) {
          if (!l["wrap"].is_boolean()) throw ConfigError("field 'learner.wrap' must be a boolean");
          cfg.learner.wrap = l["wrap"].get<bool>();
        }
      } else {
        throw ConfigError("field 'learner' must be a string or an object");
      }
    }
    // Builds the learner once so family/learner mismatches and hyperparameter
    // violations surface here.
    make_learner(cfg.learner, cfg.params);

    if (doc.contains("opponent")) {
      const Json& o = doc["opponent"];
      if (o.is_string()) {
        cfg.opponent = o.get<std::string>();
      } else if (o.is_object()) {
        detail::reject_unknown(o, {"name", "script"}, "opponent");
        if (o.contains("name")) cfg.opponent = o["name"].get<std::string>();
        if (o.contains("script")) cfg.opponent_script = detail::json_int_list(o["script"], "opponent.script");
      } else {
        throw ConfigError("field 'opponent' must be a string or an object");
      }
    }
    if (std::find(opponent_names().begin(), opponent_names().end(), cfg.opponent) ==
        opponent_names().end())
      throw ConfigError("unknown opponent '" + cfg.opponent + "'");
    if (cfg.opponent == "scripted" && cfg.opponent_script.empty())
      throw ConfigError("field 'opponent.script' is required for a scripted opponent");
    for (Action a : cfg.opponent_script)
      if (a < 1 || a > num_actions(cfg.params))
        throw ConfigError("field 'opponent.script' has action " + std::to_string(a) +
                          " outside the action set");

    if (doc.contains("rounds")) cfg.rounds = detail::json_int(doc["rounds"], "rounds");
    if (cfg.rounds < 1) throw ConfigError("field 'rounds' must be at least 1");
    if (doc.contains("episodes")) cfg.episodes = detail::json_int(doc["episodes"], "episodes");
    if (cfg.episodes < 1) throw ConfigError("field 'episodes' must be at least 1");
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
        throw ConfigError("field 'seed' must be a nonnegative integer");
      if (doc["seed"].is_number_integer() && doc["seed"].get<long long>() < 0)
        throw ConfigError("field 'seed' must be a nonnegative integer");
      cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("out")) {
      if (!doc["out"].is_string()) throw ConfigError("field 'out' must be a string");
      cfg.out = doc["out"].get<std::string>();
    }
    if (doc.contains("checks")) {
      if (!doc["checks"].is_array()) throw ConfigError("field 'checks' must be a list");
      for (const auto& c : doc["checks"]) {
        detail::reject_unknown(c, {"kind", "bound", "epsilon", "horizons", "c"}, "checks");
        CheckSpec spec;
        if (!c.contains("kind")) throw ConfigError("field 'checks.kind' is required");
        spec.kind = parse_check_kind(c["kind"].get<std::string>());
        if (c.contains("bound")) spec.bound = detail::json_real(c["bound"], "checks.bound");
        if (c.contains("epsilon")) spec.epsilon = detail::json_real(c["epsilon"], "checks.epsilon");
        if (c.contains("horizons")) {
          spec.horizons = detail::json_int_list(c["horizons"], "checks.horizons");
          for (int n : spec.horizons)
            if (n < 1) throw ConfigError("field 'checks.horizons' must be positive");
        }
        if (c.contains("c")) {
          if (!c["c"].is_array()) throw ConfigError("field 'checks.c' must be a list");
          for (const auto& x : c["c"]) spec.lemma_constants.push_back(detail::json_real(x, "checks.c"));
        }
        cfg.checks.push_back(std::move(spec));
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {}) {
  Json doc;
  try {
    doc = text.empty() ? Json::object() : Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(apply_overrides(std::move(doc), overrides));
}

}  // namespace lossbound
