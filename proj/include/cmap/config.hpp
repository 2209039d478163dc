#pragma once

// Minimal INI-style configuration: [section] headers, key = value lines,
// comments with '#' or ';'. Consumers declare the keys a section may hold via
// restrict_keys, so a typo in an experiment file fails loudly instead of
// silently running defaults.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cmap/common.hpp"

namespace cmap {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

struct Config {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }

  const std::string& get_raw(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end() || !s->second.count(key))
      fail(errc::config_parse, "missing key [" + sec + "] " + key);
    return s->second.at(key);
  }

  std::string get_string(const std::string& sec, const std::string& key,
                         const std::string& def) const {
    return has(sec, key) ? get_raw(sec, key) : def;
  }

  double get_double(const std::string& sec, const std::string& key) const {
    const std::string& v = get_raw(sec, key);
    std::size_t idx = 0;
    double out;
    try {
      out = std::stod(v, &idx);
    } catch (const std::exception&) {
      fail(errc::config_parse, "not a number: [" + sec + "] " + key + " = " + v);
    }
    if (idx != v.size())
      fail(errc::config_parse, "trailing characters: [" + sec + "] " + key + " = " + v);
    return out;
  }
  double get_double(const std::string& sec, const std::string& key, double def) const {
    return has(sec, key) ? get_double(sec, key) : def;
  }

  long long get_int(const std::string& sec, const std::string& key) const {
    const std::string& v = get_raw(sec, key);
    std::size_t idx = 0;
    long long out;
    try {
      out = std::stoll(v, &idx);
    } catch (const std::exception&) {
      fail(errc::config_parse, "not an integer: [" + sec + "] " + key + " = " + v);
    }
    if (idx != v.size())
      fail(errc::config_parse, "trailing characters: [" + sec + "] " + key + " = " + v);
    return out;
  }
  long long get_int(const std::string& sec, const std::string& key, long long def) const {
    return has(sec, key) ? get_int(sec, key) : def;
  }

  bool get_bool(const std::string& sec, const std::string& key, bool def) const {
    if (!has(sec, key)) return def;
    std::string v = get_raw(sec, key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(errc::config_parse, "not a boolean: [" + sec + "] " + key + " = " + v);
  }

  /// Rejects keys outside the consumer's schema for one section.
  void restrict_keys(const std::string& sec, const std::set<std::string>& allowed) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return;
    for (const auto& kv : s->second)
      if (!allowed.count(kv.first))
        fail(errc::config_parse, "unknown key [" + sec + "] " + kv.first);
  }

  /// Rejects sections the consumer does not know about.
  void restrict_sections(const std::set<std::string>& allowed) const {
    for (const auto& sec : sections)
      if (!allowed.count(sec.first)) fail(errc::config_parse, "unknown section [" + sec.first + "]");
  }
};

inline Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        fail(errc::config_parse, "line " + std::to_string(lineno) + ": unterminated section");
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section.empty())
        fail(errc::config_parse, "line " + std::to_string(lineno) + ": empty section name");
      cfg.sections[section];  // record even if it stays empty
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      fail(errc::config_parse, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    if (key.empty())
      fail(errc::config_parse, "line " + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.sections[section];
    if (sec.count(key))
      fail(errc::config_parse, "line " + std::to_string(lineno) + ": duplicate key " + key);
    sec[key] = val;
  }
  return cfg;
}

inline Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Dyadic scale ladder {top, top/2, ..., top/2^(count-1)}.
inline std::vector<double> dyadic_scales(double top, int count) {
  if (!(top > 0.0) || count < 1) fail(errc::invalid_argument, "bad scale ladder");
  std::vector<double> out;
  double r = top;
  for (int k = 0; k < count; ++k, r *= 0.5) out.push_back(r);
  return out;
}

}  // namespace cmap
