#pragma once

// JSON forms of family parameters and number formatting shared by the CSV,
// report and config writers.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "json.hpp"

#include "lossbound/error.hpp"
#include "lossbound/families.hpp"

namespace lossbound {

using Json = nlohmann::ordered_json;

// Shortest round-trip representation; integral values print without a
// fractional part.
inline std::string format_number(double x) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

inline Json params_to_json(const FamilyParams& params) {
  Json j;
  j["family"] = std::string(family_name(family_kind(params)));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GetCloseParams>) {
          j["n"] = p.n;
          j["k"] = p.k;
        } else if constexpr (std::is_same_v<T, RpsDudsParams> ||
                             std::is_same_v<T, RandomOrientationRpsDudsParams>) {
          j["m"] = p.m;
          j["n"] = p.n;
          j["f"] = p.f;
        } else if constexpr (std::is_same_v<T, TwoTargetsParams>) {
          j["n"] = p.n;
          j["k1"] = p.k1;
          j["k2"] = p.k2;
          j["p1"] = p.p1;
          j["p2"] = p.p2;
          j["r1"] = p.r1;
          j["r2"] = p.r2;
        } else {
          j["m"] = p.m;
          j["n"] = p.n;
          j["D"] = p.duds;
        }
      },
      params);
  return j;
}

namespace detail {

inline int json_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw InvalidArgument("field '" + field + "' must be an integer");
  return j.get<int>();
}

inline double json_real(const Json& j, const std::string& field) {
  if (!j.is_number()) throw InvalidArgument("field '" + field + "' must be a number");
  return j.get<double>();
}

inline std::vector<int> json_int_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InvalidArgument("field '" + field + "' must be a list of integers");
  std::vector<int> out;
  for (const auto& e : j) out.push_back(json_int(e, field));
  return out;
}

}  // namespace detail

// Reads the parameter fields of `kind` from `fields`. Unknown keys are
// rejected; `allow_missing_hidden` leaves hidden parameters at a valid
// placeholder for family-wide sweeps.
inline FamilyParams params_from_json(FamilyKind kind, const Json& fields,
                                     bool allow_missing_hidden = false) {
  if (!fields.is_object()) throw InvalidArgument("family parameters must be an object");
  std::set<std::string> allowed;
  std::set<std::string> hidden;
  switch (kind) {
    case FamilyKind::GetClose: allowed = {"n", "k"}; hidden = {"k"}; break;
    case FamilyKind::RpsDuds:
    case FamilyKind::RandomOrientationRpsDuds: allowed = {"m", "n", "f"}; hidden = {"f"}; break;
    case FamilyKind::TwoTargets:
      allowed = {"n", "k1", "k2", "p1", "p2", "r1", "r2"};
      hidden = {"k1", "k2"};
      break;
    case FamilyKind::MpDuds: allowed = {"m", "n", "D"}; hidden = {"D"}; break;
  }
  for (const auto& [key, _] : fields.items())
    if (!allowed.count(key))
      throw InvalidArgument("unknown parameter '" + key + "' for family '" +
                            std::string(family_name(kind)) + "'");
  for (const auto& key : allowed) {
    if (fields.contains(key)) continue;
    if (allow_missing_hidden && hidden.count(key)) continue;
    throw InvalidArgument("missing parameter '" + key + "' for family '" +
                          std::string(family_name(kind)) + "'");
  }
  auto get_int = [&](const char* k) { return detail::json_int(fields.at(k), k); };
  auto get_real = [&](const char* k) { return detail::json_real(fields.at(k), k); };
  auto has = [&](const char* k) { return fields.contains(k); };

  FamilyParams params;
  switch (kind) {
    case FamilyKind::GetClose: {
      GetCloseParams p{get_int("n"), 0};
      p.k = has("k") ? get_int("k") : 1;
      params = p;
      break;
    }
    case FamilyKind::RpsDuds:
    case FamilyKind::RandomOrientationRpsDuds: {
      const int m = get_int("m");
      const int n = get_int("n");
      std::vector<int> f;
      if (has("f")) {
        f = detail::json_int_list(fields.at("f"), "f");
      } else {
        for (int i = 1; i <= m + n; ++i) f.push_back(i);
      }
      if (kind == FamilyKind::RpsDuds)
        params = RpsDudsParams{m, n, f};
      else
        params = RandomOrientationRpsDudsParams{m, n, f};
      break;
    }
    case FamilyKind::TwoTargets: {
      TwoTargetsParams p;
      p.n = get_int("n");
      p.k1 = has("k1") ? get_int("k1") : 1;
      p.k2 = has("k2") ? get_int("k2") : 2;
      p.p1 = get_real("p1");
      p.p2 = get_real("p2");
      p.r1 = get_real("r1");
      p.r2 = get_real("r2");
      params = p;
      break;
    }
    case FamilyKind::MpDuds: {
      MpDudsParams p{get_int("m"), get_int("n"), {}};
      if (has("D")) {
        p.duds = detail::json_int_list(fields.at("D"), "D");
        std::sort(p.duds.begin(), p.duds.end());
      } else {
        for (int i = 1; i <= p.n; ++i) p.duds.push_back(p.m + i);
      }
      params = p;
      break;
    }
  }
  validate(params);
  return params;
}

inline FamilyParams params_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw InvalidArgument("parameter object needs a 'family' string");
  Json fields = j;
  fields.erase("family");
  return params_from_json(parse_family_kind(j.at("family").get<std::string>()), fields);
}

}  // namespace lossbound
