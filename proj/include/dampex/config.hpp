#pragma once

// JSON data configs: a dimension plus u0 / u1 as lists of catalog components.
//
//   {"dimension": 2,
//    "u0": [{"family": "gaussian", "scale": 4}],
//    "u1": {"family": "dilated_translated", "center": [1, 0], "dilation": 2,
//           "base": {"family": "box", "half_width": 1}}}

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "dampex/error.hpp"
#include "dampex/initial_data.hpp"

namespace dampex {

using Json = nlohmann::json;

struct DataConfig {
  int dimension = 1;
  InitialDatum u0;
  InitialDatum u1;
};

namespace detail {

inline void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "samples" || key == "values" || key == "grid")
      throw ConfigError(where + ": sampled data is not supported, use a catalog family");
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

inline double number(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::vector<double> per_axis(const Json& j, int n, const std::string& what) {
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError(what + " must be a number or an array of length " + std::to_string(n));
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(what + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

/// One catalog term.
inline InitialDatum parse_component(const Json& j, int n, const std::string& where = "component") {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw ConfigError(where + ": missing 'family'");
  const std::string family = j.at("family").get<std::string>();
  const std::string at = where + " (" + family + ")";
  try {
    if (family == "zero") {
      detail::require_keys(j, {"family"}, at);
      return InitialDatum::zero(n);
    }
    if (family == "gaussian") {
      detail::require_keys(j, {"family", "scale", "weight"}, at);
      return InitialDatum::gaussian(n, detail::number(j, "scale", 4.0, at),
                                    detail::number(j, "weight", 1.0, at));
    }
    if (family == "gaussian_monomial") {
      detail::require_keys(j, {"family", "scale", "weight", "beta"}, at);
      if (!j.contains("beta") || !j.at("beta").is_array() || static_cast<int>(j.at("beta").size()) != n)
        throw ConfigError(at + ": 'beta' must be an array of length " + std::to_string(n));
      MultiIndex beta(n);
      for (int a = 0; a < n; ++a) {
        const auto& b = j.at("beta")[a];
        if (!b.is_number_integer() || b.get<int>() < 0)
          throw ConfigError(at + ": 'beta' entries must be nonnegative integers");
        beta.set(a, b.get<int>());
      }
      return InitialDatum::gaussian_monomial(n, detail::number(j, "scale", 4.0, at), beta,
                                             detail::number(j, "weight", 1.0, at));
    }
    if (family == "box") {
      detail::require_keys(j, {"family", "half_width", "weight"}, at);
      return InitialDatum::box(n, detail::number(j, "half_width", 1.0, at),
                               detail::number(j, "weight", 1.0, at));
    }
    if (family == "gauss_kernel") {
      detail::require_keys(j, {"family", "t"}, at);
      const double t = detail::number(j, "t", 1.0, at);
      if (!(t > 0.0)) throw ConfigError(at + ": 't' must be positive");
      return InitialDatum::gauss_kernel(n, t);
    }
    if (family == "dilated_translated") {
      detail::require_keys(j, {"family", "base", "center", "dilation", "weight"}, at);
      if (!j.contains("base")) throw ConfigError(at + ": missing 'base'");
      InitialDatum v = parse_component(j.at("base"), n, at + ".base");
      if (j.contains("dilation")) {
        const auto d = detail::per_axis(j.at("dilation"), n, at + ": 'dilation'");
        v = v.dilated(std::span<const double>(d));
      }
      if (j.contains("center")) {
        const auto c = detail::per_axis(j.at("center"), n, at + ": 'center'");
        v = v.translated(std::span<const double>(c));
      }
      return v.scaled(detail::number(j, "weight", 1.0, at));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(at + ": " + e.what());
  }
  throw ConfigError(where + ": unknown family '" + family +
                    "' (expected gaussian|gaussian_monomial|box|gauss_kernel|zero|dilated_translated)");
}

/// A component object or an array of them; absent means zero.
inline InitialDatum parse_datum(const Json& j, int n, const std::string& where) {
  InitialDatum v = InitialDatum::zero(n);
  if (j.is_null()) return v;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      v = v + parse_component(j[i], n, where + "[" + std::to_string(i) + "]");
    return v;
  }
  return parse_component(j, n, where);
}

inline DataConfig parse_data_config(const Json& j) {
  detail::require_keys(j, {"dimension", "u0", "u1", "name", "description"}, "data config");
  if (!j.contains("dimension") || !j.at("dimension").is_number_integer())
    throw ConfigError("data config: 'dimension' must be an integer");
  const int n = j.at("dimension").get<int>();
  if (n < 1 || n > kMaxDimension) throw ConfigError("data config: dimension must be 1, 2 or 3");
  DataConfig cfg;
  cfg.dimension = n;
  cfg.u0 = parse_datum(j.value("u0", Json()), n, "u0");
  cfg.u1 = parse_datum(j.value("u1", Json()), n, "u1");
  return cfg;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline DataConfig load_data_config(const std::string& path) {
  return parse_data_config(read_json_file(path));
}

inline Json to_json(const Component& c, int n) {
  Json j;
  j["family"] = to_string(c.family);
  j["weight"] = c.weight;
  if (c.family != Family::Box) j["scale"] = c.scale;
  if (c.family == Family::Box) j["half_width"] = c.half_width;
  if (c.family == Family::GaussianMonomial) j["beta"] = std::vector<int>(c.beta.begin(), c.beta.begin() + n);
  j["center"] = std::vector<double>(c.center.begin(), c.center.begin() + n);
  j["dilation"] = std::vector<double>(c.dilation.begin(), c.dilation.begin() + n);
  return j;
}

inline Json to_json(const InitialDatum& v) {
  Json arr = Json::array();
  for (const auto& c : v.components()) arr.push_back(to_json(c, v.dimension()));
  return arr;
}

}  // namespace dampex
