#ifndef KUZLAB_CONFIG_HPP_
#define KUZLAB_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kuzlab/error.hpp"
#include "kuzlab/measures.hpp"
#include "kuzlab/quadrature.hpp"

namespace kuzlab {

using json = nlohmann::ordered_json;

namespace config {

inline const json &at(const json &j, const std::string &key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing key '" + key + "'");
  return j.at(key);
}

template <typename T>
T get(const json &j, const std::string &key) {
  try {
    return at(j, key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json &j, const std::string &key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key);
}

inline MeasureModel parse_measure(const json &j) {
  const auto type = get<std::string>(j, "type");
  if (type == "subtorus") {
    return SubtorusLebesgue{get<int>(j, "n"), get<int>(j, "s"),
                            get_or<std::vector<double>>(j, "normal_offset", {})};
  }
  if (type == "digit") {
    DigitSelfSimilar d;
    d.n = get<int>(j, "n");
    for (const auto &ax : at(j, "axes")) {
      if (ax.is_string()) {
        if (ax.get<std::string>() != "full") throw ConfigError("axis must be \"full\" or an object");
        d.axes.push_back(FullAxis{});
      } else {
        d.axes.push_back(DigitAxis{get<int>(ax, "base"), get<std::vector<int>>(ax, "digits"),
                                   get_or<double>(ax, "scale", 1.0)});
      }
    }
    d.normal_offset = get_or<std::vector<double>>(j, "normal_offset", {});
    return d;
  }
  if (type == "fourier") {
    FourierWeighted f;
    const auto base = parse_measure(at(j, "base"));
    const auto *l = std::get_if<SubtorusLebesgue>(&base.variant());
    if (!l) throw ConfigError("fourier base must be a subtorus measure");
    f.base = *l;
    for (const auto &m : get_or<json>(j, "modes", json::array()))
      f.modes.push_back({get<LatticeVector>(m, "k"), get<double>(m, "amplitude")});
    return f;
  }
  if (type == "mixture") {
    Mixture m;
    for (const auto &c : at(j, "components")) m.components.push_back(parse_measure(c));
    return m;
  }
  throw ConfigError("unknown measure type '" + type + "'");
}

inline json measure_to_json(const MeasureModel &mu) {
  return std::visit(
      [](const auto &m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
          return {{"type", "subtorus"}, {"n", m.n}, {"s", m.s}, {"normal_offset", m.normal_offset}};
        } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          json axes = json::array();
          for (const auto &ax : m.axes) {
            if (const auto *d = std::get_if<DigitAxis>(&ax))
              axes.push_back({{"base", d->base}, {"digits", d->digits}, {"scale", d->scale}});
            else
              axes.push_back("full");
          }
          return {{"type", "digit"}, {"n", m.n}, {"axes", axes}, {"normal_offset", m.normal_offset}};
        } else if constexpr (std::is_same_v<T, FourierWeighted>) {
          json modes = json::array();
          for (const auto &md : m.modes) modes.push_back({{"k", md.k}, {"amplitude", md.amplitude}});
          return {{"type", "fourier"},
                  {"base", measure_to_json(MeasureModel(m.base))},
                  {"modes", modes}};
        } else {
          json comps = json::array();
          for (const auto &c : m.components) comps.push_back(measure_to_json(c));
          return {{"type", "mixture"}, {"components", comps}};
        }
      },
      mu.variant());
}

// A grid is either {"values": [...]} or {"lo", "hi", "per_decade"} (geometric,
// optionally with "factor" as the multiplicative period instead of 10), or
// {"lo", "hi", "points"} (log-uniform).
inline std::vector<double> parse_grid(const json &j) {
  std::vector<double> g;
  if (j.is_array()) {
    g = j.get<std::vector<double>>();
  } else if (j.contains("values")) {
    g = get<std::vector<double>>(j, "values");
  } else {
    const double lo = get<double>(j, "lo"), hi = get<double>(j, "hi");
    if (!(lo > 0 && hi >= lo)) throw ConfigError("grid requires 0 < lo <= hi");
    if (j.contains("points")) {
      g = log_grid(lo, hi, get<std::size_t>(j, "points"));
    } else {
      const double per = get<double>(j, "per_decade");
      const double factor = get_or<double>(j, "factor", 10.0);
      if (!(per >= 1 && factor > 1)) throw ConfigError("grid requires per_decade >= 1 and factor > 1");
      g = geometric_grid(lo, hi, per, factor);
    }
  }
  if (g.empty()) throw ConfigError("grid is empty");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw ConfigError("grid values must be strictly increasing");
  return g;
}

inline json load_file(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  try {
    return json::parse(f, nullptr, true, true);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

}  // namespace config
}  // namespace kuzlab

#endif  // KUZLAB_CONFIG_HPP_
