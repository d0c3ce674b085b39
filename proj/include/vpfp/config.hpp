#pragma once

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "vpfp/core.hpp"
#include "vpfp/io.hpp"

namespace vpfp {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key.empty() ? what : "config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/**
 * INI-style config ("[section]" headers, "key = value" lines). Every lookup
 * marks the key as used; finish() rejects whatever was never read, so a
 * misspelt key is an error rather than a silently ignored default.
 */
class Config {
 public:
  Config() = default;

  static Config from_string(const std::string& text) {
    Config c;
    std::istringstream is(text);
    try {
      boost::property_tree::read_ini(is, c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("", std::string("malformed config: ") + e.message() + " (line " +
                                std::to_string(e.line()) + ")");
    }
    return c;
  }

  static Config from_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path))
      throw ConfigError("", "config file '" + path.string() + "' does not exist");
    Config c;
    try {
      boost::property_tree::read_ini(path.string(), c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("", std::string("malformed config: ") + e.message() + " (line " +
                                std::to_string(e.line()) + ")");
    }
    return c;
  }

  bool has(const std::string& key) const { return tree_.get_child_optional(path(key)).has_value(); }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto v = tree_.get_optional<std::string>(path(key));
    return v ? trim(*v) : fallback;
  }

  std::string require_string(const std::string& key) {
    if (!has(key)) throw ConfigError(key, "is required");
    return get_string(key, "");
  }

  double get_double(const std::string& key, double fallback) {
    if (!has(key)) return (used_.insert(key), fallback);
    return parse(key, get_string(key, ""));
  }

  int get_int(const std::string& key, int fallback) {
    if (!has(key)) return (used_.insert(key), fallback);
    const double x = parse(key, get_string(key, ""));
    if (x != static_cast<double>(static_cast<int>(x))) throw ConfigError(key, "must be an integer");
    return static_cast<int>(x);
  }

  bool get_bool(const std::string& key, bool fallback) {
    if (!has(key)) return (used_.insert(key), fallback);
    const std::string s = get_string(key, "");
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, "must be true or false");
  }

  /// Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return (used_.insert(key), fallback);
    std::vector<double> out;
    std::stringstream ss(get_string(key, ""));
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse(key, trim(item)));
    if (out.empty()) throw ConfigError(key, "list is empty");
    return out;
  }

  std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) {
    std::vector<double> d(fallback.begin(), fallback.end());
    d = get_list(key, d);
    std::vector<int> out;
    for (double x : d) {
      if (x != static_cast<double>(static_cast<int>(x))) throw ConfigError(key, "entries must be integers");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

  /// Throws on the first key present in the file that no lookup consumed.
  void finish() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty()) {
        if (!used_.count(section)) throw ConfigError(section, "unknown key");
        continue;
      }
      for (const auto& [key, value] : body) {
        const std::string full = section + "." + key;
        if (!used_.count(full)) throw ConfigError(full, "unknown key");
      }
    }
  }

 private:
  static boost::property_tree::ptree::path_type path(const std::string& key) {
    return boost::property_tree::ptree::path_type(key, '.');
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static double parse(const std::string& key, const std::string& text) {
    try {
      return parse_double(text);
    } catch (const Error&) {
      throw ConfigError(key, "'" + text + "' is not a number");
    }
  }

  boost::property_tree::ptree tree_;
  std::set<std::string> used_;
};

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "fixed") return Algorithm::fixed_step;
  if (s == "linesearch") return Algorithm::line_search;
  throw ConfigError("collision.algorithm", "must be 'fixed' or 'linesearch', got '" + s + "'");
}

inline LinearSolverKind parse_linear_solver(const std::string& s) {
  if (s == "direct") return LinearSolverKind::direct;
  if (s == "cg") return LinearSolverKind::conjugate_gradient;
  throw ConfigError("collision.linear_solver", "must be 'direct' or 'cg', got '" + s + "'");
}

/// Reads the [collision] section.
inline CollisionParams read_collision(Config& c, CollisionParams p = {}) {
  p.algorithm = parse_algorithm(c.get_string("collision.algorithm", to_string(p.algorithm)));
  p.gamma = c.get_double("collision.gamma", p.gamma);
  p.theta = c.get_double("collision.theta", p.theta);
  p.tol = c.get_double("collision.tol", p.tol);
  p.max_iter = c.get_int("collision.max_iter", p.max_iter);
  p.positivity_floor = c.get_double("collision.positivity_floor", p.positivity_floor);
  p.linear_solver = parse_linear_solver(
      c.get_string("collision.linear_solver",
                   p.linear_solver == LinearSolverKind::direct ? "direct" : "cg"));
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError("collision", e.what());
  }
  return p;
}

}  // namespace vpfp
