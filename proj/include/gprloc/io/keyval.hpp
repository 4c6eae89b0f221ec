#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/io/text.hpp"

namespace gprloc {

// Flat "key = value" config format with optional repeated [section] blocks.
// Lines starting with '#' are comments. Values keep their raw text; typed
// getters parse on demand so error messages can carry the key name.
struct KeyValSection {
  std::string name;
  std::map<std::string, std::string> values;
};

class KeyValDoc {
 public:
  std::map<std::string, std::string> root;
  std::vector<KeyValSection> sections;

  static KeyValDoc parse(std::istream& in, const std::string& origin) {
    KeyValDoc doc;
    std::string line;
    KeyValSection* current = nullptr;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto s = trim(line);
      if (s.empty() || s.front() == '#') continue;
      if (s.front() == '[') {
        if (s.back() != ']')
          throw ConfigError(origin + ":" + format_int(lineno) + ": unterminated section header");
        doc.sections.push_back({std::string(trim(s.substr(1, s.size() - 2))), {}});
        current = &doc.sections.back();
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(origin + ":" + format_int(lineno) + ": expected 'key = value'");
      std::string key(trim(s.substr(0, eq)));
      std::string value(trim(s.substr(eq + 1)));
      if (key.empty())
        throw ConfigError(origin + ":" + format_int(lineno) + ": empty key");
      auto& dest = current ? current->values : doc.root;
      dest[key] = value;
    }
    return doc;
  }

  static KeyValDoc load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse(in, path);
  }

  std::string dump() const {
    std::ostringstream out;
    for (const auto& [k, v] : root) out << k << " = " << v << "\n";
    for (const auto& sec : sections) {
      out << "\n[" << sec.name << "]\n";
      for (const auto& [k, v] : sec.values) out << k << " = " << v << "\n";
    }
    return out.str();
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << dump();
  }
};

inline bool kv_has(const std::map<std::string, std::string>& m, const std::string& key) {
  return m.count(key) != 0;
}

inline std::string kv_get(const std::map<std::string, std::string>& m, const std::string& key,
                          const std::string& fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

inline double kv_get(const std::map<std::string, std::string>& m, const std::string& key,
                     double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : parse_double(it->second, "key '" + key + "'");
}

inline std::int64_t kv_get(const std::map<std::string, std::string>& m, const std::string& key,
                           std::int64_t fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : parse_int(it->second, "key '" + key + "'");
}

inline int kv_get(const std::map<std::string, std::string>& m, const std::string& key, int fallback) {
  return static_cast<int>(kv_get(m, key, static_cast<std::int64_t>(fallback)));
}

inline bool kv_get(const std::map<std::string, std::string>& m, const std::string& key, bool fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected boolean, got '" + v + "'");
}

inline double kv_require(const std::map<std::string, std::string>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw ConfigError("missing required key '" + key + "'");
  return parse_double(it->second, "key '" + key + "'");
}

inline std::vector<double> kv_get_list(const std::map<std::string, std::string>& m,
                                       const std::string& key, std::vector<double> fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  std::vector<double> out;
  std::istringstream ss(it->second);
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(tok, "key '" + key + "'"));
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace gprloc
