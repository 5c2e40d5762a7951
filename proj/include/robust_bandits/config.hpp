#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "robust_bandits/core.hpp"

namespace robust_bandits {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find(sep, start), s.size());
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

/// %.12g, the one real-number format used in every output file.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

enum class ValueType { integer, real, boolean, text, real_list, text_list, integer_list };

struct KeySpec {
  std::string_view key;
  ValueType type;
  std::string_view default_value;  // empty: no default
};

// clang-format off
inline constexpr KeySpec kConfigKeys[] = {
    {"instance.kind", ValueType::text, ""},
    {"instance.d", ValueType::integer, "5"},
    {"instance.k", ValueType::integer, "25"},
    {"instance.eta", ValueType::real_list, "0"},
    {"instance.noise_variance", ValueType::real, "0.05"},
    {"instance.seed", ValueType::text, "trial"},
    {"instance.features", ValueType::text, ""},
    {"instance.theta", ValueType::text, ""},
    {"instance.header", ValueType::boolean, "false"},
    {"instance.strict", ValueType::boolean, "false"},
    {"instance.sample_k", ValueType::integer, "0"},
    {"instance.fixture", ValueType::text, ""},
    {"instance.variant", ValueType::integer, "0"},
    {"instance.rbar0", ValueType::real, ""},
    {"learner.kind", ValueType::text_list, ""},
    {"learner.mode", ValueType::text, "practical_unknown"},
    {"learner.delta", ValueType::real, ""},
    {"learner.nu", ValueType::real, ""},
    {"learner.lambda", ValueType::real, "1"},
    {"learner.ucb_delta", ValueType::real, "0.1"},
    {"learner.prior_variance", ValueType::real, "0.5"},
    {"learner.noise_variance", ValueType::real, "1"},
    {"learner.arm", ValueType::integer, "0"},
    {"adversary.kind", ValueType::text_list, "none"},
    {"adversary.budget", ValueType::real_list, "0"},
    {"adversary.target", ValueType::integer, "0"},
    {"adversary.v_target", ValueType::real, "-1"},
    {"adversary.eps0", ValueType::real, "0.01"},
    {"adversary.top_n", ValueType::integer, "3"},
    {"adversary.shift", ValueType::real, "0"},
    {"adversary.theta_target", ValueType::real_list, ""},
    {"adversary.theta_target_seed", ValueType::text, "trial"},
    {"adversary.delayed_start", ValueType::text, "auto"},
    {"run.horizon", ValueType::integer, "1000"},
    {"run.trials", ValueType::integer, "10"},
    {"run.seed", ValueType::integer, "1"},
    {"run.checkpoints", ValueType::integer_list, ""},
    {"run.workers", ValueType::integer, "0"},
    {"run.worst", ValueType::integer, "0"},
    {"run.full_trace", ValueType::boolean, "false"},
    {"run.diagnostics", ValueType::boolean, "false"},
    {"run.out", ValueType::text, ""},
};
// clang-format on

inline const KeySpec* find_key(std::string_view key) {
  for (const auto& spec : kConfigKeys) {
    if (spec.key == key) return &spec;
  }
  return nullptr;
}

inline std::optional<long long> parse_integer(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::size_t pos = 0;
  try {
    const long long v = std::stoll(t, &pos);
    if (pos == t.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

inline std::optional<double> parse_real(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::size_t pos = 0;
  try {
    const double v = std::stod(t, &pos);
    if (pos == t.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

inline std::optional<bool> parse_bool(std::string_view s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  return std::nullopt;
}

/// Flat key-value configuration. Files use `[section]` headers, `key = value`
/// lines, and `#` comments; keys are stored fully qualified (`section.key`).
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>") {
    Config cfg;
    std::string line, section;
    std::vector<std::string> errors;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      const auto hash = line.find('#');
      const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') {
          errors.push_back(source + ":" + std::to_string(lineno) + ": malformed section header");
          continue;
        }
        section = trim(std::string_view(body).substr(1, body.size() - 2));
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        errors.push_back(source + ":" + std::to_string(lineno) + ": expected key = value");
        continue;
      }
      std::string key = trim(std::string_view(body).substr(0, eq));
      if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
      cfg.values_[key] = trim(std::string_view(body).substr(eq + 1));
    }
    if (!errors.empty()) throw ValidationError(join(errors));
    return cfg;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  /// Reads a config file, or the `# cfg` lines embedded in an output CSV.
  static Config load(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open config file: " + path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
      std::ostringstream embedded;
      std::string line;
      while (std::getline(in, line)) {
        if (line.rfind("# cfg ", 0) == 0) embedded << line.substr(6) << '\n';
      }
      std::istringstream body(embedded.str());
      return parse(body, path);
    }
    return parse(in, path);
  }

  void set(const std::string& key, const std::string& value) { values_[trim(key)] = trim(value); }

  /// `key=value` override.
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    require(eq != std::string::npos && eq > 0, "override must look like key=value: '" + assignment + "'");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  /// Explicit value or the schema default.
  std::string get(const std::string& key) const {
    if (auto v = raw(key)) return *v;
    const KeySpec* spec = find_key(key);
    require(spec != nullptr, "unknown config key: " + key);
    return std::string(spec->default_value);
  }

  long long get_integer(const std::string& key) const { return *parse_integer(get(key)); }
  double get_real(const std::string& key) const { return *parse_real(get(key)); }
  bool get_bool(const std::string& key) const { return *parse_bool(get(key)); }
  std::vector<std::string> get_list(const std::string& key) const { return split_list(get(key)); }
  std::vector<double> get_reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : get_list(key)) out.push_back(*parse_real(item));
    return out;
  }

  /// Every problem at once: unknown keys and unparsable values.
  void validate() const {
    std::vector<std::string> errors;
    for (const auto& [key, value] : values_) {
      const KeySpec* spec = find_key(key);
      if (spec == nullptr) {
        errors.push_back("unknown key '" + key + "'");
        continue;
      }
      if (!type_ok(spec->type, value)) {
        errors.push_back("bad value for '" + key + "': '" + value + "'");
      }
    }
    if (!errors.empty()) throw ValidationError(join(errors));
  }

  /// All keys: explicit values plus schema defaults, in schema order.
  Config resolved() const {
    Config out = *this;
    for (const auto& spec : kConfigKeys) {
      if (!out.has(std::string(spec.key))) out.values_[std::string(spec.key)] = std::string(spec.default_value);
    }
    return out;
  }

  /// Serialized in sections, keys sorted; `prefix` is prepended to every line.
  std::string serialize(std::string_view prefix = "") const {
    std::ostringstream out;
    std::string section;
    for (const auto& [key, value] : values_) {
      const auto dot = key.find('.');
      const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
      if (sec != section) {
        section = sec;
        out << prefix << '[' << section << "]\n";
      }
      out << prefix << (dot == std::string::npos ? key : key.substr(dot + 1)) << " = " << value << '\n';
    }
    return out.str();
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static bool type_ok(ValueType type, const std::string& value) {
    switch (type) {
      case ValueType::integer:
        return value.empty() || parse_integer(value).has_value();
      case ValueType::real:
        return value.empty() || parse_real(value).has_value();
      case ValueType::boolean:
        return parse_bool(value).has_value();
      case ValueType::text:
      case ValueType::text_list:
        return true;
      case ValueType::real_list:
        for (const auto& item : split_list(value)) {
          if (!parse_real(item)) return false;
        }
        return true;
      case ValueType::integer_list:
        for (const auto& item : split_list(value)) {
          if (!parse_integer(item)) return false;
        }
        return true;
    }
    return false;
  }

  static std::string join(const std::vector<std::string>& errors) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
    return msg;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace robust_bandits
