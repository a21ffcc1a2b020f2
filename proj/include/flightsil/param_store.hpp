#ifndef FLIGHTSIL_PARAM_STORE_HPP
#define FLIGHTSIL_PARAM_STORE_HPP

#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>

#include "flightsil/types.hpp"

namespace flightsil {

/// Typed name -> value store with registered defaults.
///
/// Reads of unknown names and writes of the wrong type fail. Every
/// successful write bumps the revision counter so consumers (e.g. the
/// mixer loader) can detect changes cheaply.
class ParamStore {
 public:
  using Value = std::variant<std::int64_t, double>;

  void define_int(const std::string& name, std::int64_t default_value) {
    values_.insert_or_assign(name, Value(default_value));
  }

  void define_real(const std::string& name, double default_value) {
    values_.insert_or_assign(name, Value(default_value));
  }

  bool contains(const std::string& name) const { return values_.count(name) != 0; }

  bool is_int(const std::string& name) const {
    return std::holds_alternative<std::int64_t>(at(name));
  }

  std::int64_t get_int(const std::string& name) const {
    const Value& v = at(name);
    if (!std::holds_alternative<std::int64_t>(v))
      throw Error("param '" + name + "' is not an integer");
    return std::get<std::int64_t>(v);
  }

  double get_real(const std::string& name) const {
    const Value& v = at(name);
    if (!std::holds_alternative<double>(v))
      throw Error("param '" + name + "' is not a real");
    return std::get<double>(v);
  }

  std::optional<std::int64_t> try_get_int(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end() || !std::holds_alternative<std::int64_t>(it->second))
      return std::nullopt;
    return std::get<std::int64_t>(it->second);
  }

  std::optional<double> try_get_real(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end() || !std::holds_alternative<double>(it->second))
      return std::nullopt;
    return std::get<double>(it->second);
  }

  void set_int(const std::string& name, std::int64_t value) {
    Value& v = mutable_at(name);
    if (!std::holds_alternative<std::int64_t>(v))
      throw Error("param '" + name + "' is not an integer");
    v = value;
    ++revision_;
  }

  void set_real(const std::string& name, double value) {
    Value& v = mutable_at(name);
    if (!std::holds_alternative<double>(v))
      throw Error("param '" + name + "' is not a real");
    v = value;
    ++revision_;
  }

  /// Set from text, coercing to the registered type. Integer text is
  /// accepted for real params; fractional text for an int param fails.
  void set_from_text(const std::string& name, const std::string& text) {
    Value& v = mutable_at(name);
    std::size_t used = 0;
    if (std::holds_alternative<std::int64_t>(v)) {
      std::int64_t parsed = 0;
      try {
        parsed = std::stoll(text, &used);
      } catch (const std::exception&) {
        throw Error("param '" + name + "': '" + text + "' is not an integer");
      }
      if (used != text.size())
        throw Error("param '" + name + "': '" + text + "' is not an integer");
      v = parsed;
    } else {
      double parsed = 0;
      try {
        parsed = std::stod(text, &used);
      } catch (const std::exception&) {
        throw Error("param '" + name + "': '" + text + "' is not a real");
      }
      if (used != text.size())
        throw Error("param '" + name + "': '" + text + "' is not a real");
      v = parsed;
    }
    ++revision_;
  }

  std::uint64_t revision() const { return revision_; }
  std::size_t size() const { return values_.size(); }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [name, value] : values_) fn(name, value);
  }

  /// Writes `name value` lines, sorted by name.
  void dump(std::ostream& os) const {
    for (const auto& [name, value] : values_) {
      os << name << ' ';
      if (std::holds_alternative<std::int64_t>(value)) {
        os << std::get<std::int64_t>(value);
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(value));
        os << buf;
      }
      os << '\n';
    }
  }

  /// Reads `name value` lines. Known names are type-coerced; unknown names
  /// are defined with a type inferred from the value text.
  /// Blank lines and lines starting with '#' are skipped.
  void load(std::istream& is) {
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto sep = line.find_first_of(" \t", first);
      if (sep == std::string::npos)
        throw Error("param file line " + std::to_string(line_no) + ": expected 'name value'");
      const std::string name = line.substr(first, sep - first);
      const auto vstart = line.find_first_not_of(" \t", sep);
      if (vstart == std::string::npos)
        throw Error("param file line " + std::to_string(line_no) + ": missing value");
      auto vend = line.find_last_not_of(" \t\r");
      const std::string text = line.substr(vstart, vend - vstart + 1);
      if (contains(name)) {
        set_from_text(name, text);
      } else if (looks_real(text)) {
        define_real(name, 0.0);
        set_from_text(name, text);
      } else {
        define_int(name, 0);
        set_from_text(name, text);
      }
    }
  }

 private:
  static bool looks_real(const std::string& text) {
    return text.find_first_of(".eEnN") != std::string::npos ||
           text.find("inf") != std::string::npos;
  }

  const Value& at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error("unknown param '" + name + "'");
    return it->second;
  }

  Value& mutable_at(const std::string& name) {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error("unknown param '" + name + "'");
    return it->second;
  }

  std::map<std::string, Value> values_;
  std::uint64_t revision_ = 0;
};

}  // namespace flightsil

#endif  // FLIGHTSIL_PARAM_STORE_HPP
