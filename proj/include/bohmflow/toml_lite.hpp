#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bohmflow::toml_lite {

// Reader for the subset of TOML used by simulation configs:
//   # comments, [section] headers (one level), key = value pairs,
//   values: booleans, integers, floats (incl. exponent, inf/nan rejected),
//   "basic strings" with \" \\ \n \t escapes, and arrays of those
//   (arrays may span lines, trailing comma allowed).
// Everything else (dotted keys, inline tables, dates, literal strings) is a
// parse error reported with its line number.

struct Value {
  enum class Kind { boolean, integer, floating, string, array };

  Kind kind = Kind::integer;
  bool boolean = false;
  std::int64_t integer = 0;
  double floating = 0.0;
  std::string string;
  std::vector<Value> array;
  int line = 0;

  bool is_number() const { return kind == Kind::integer || kind == Kind::floating; }
  double as_number() const { return kind == Kind::integer ? static_cast<double>(integer) : floating; }
};

class Document {
 public:
  /// Throws ConfigError with the 1-based line of the first syntax error.
  static Document parse(std::string_view text, std::string source = "<config>");

  const std::string& source() const { return source_; }
  bool has_section(const std::string& section) const;
  const Value* find(const std::string& section, const std::string& key) const;

  /// Typed accessors. A missing key yields the fallback (or throws if none);
  /// a value of the wrong type throws ConfigError at the value's line.
  double get_number(const std::string& section, const std::string& key,
                    std::optional<double> fallback = std::nullopt) const;
  std::int64_t get_integer(const std::string& section, const std::string& key,
                           std::optional<std::int64_t> fallback = std::nullopt) const;
  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = std::nullopt) const;
  bool get_bool(const std::string& section, const std::string& key,
                std::optional<bool> fallback = std::nullopt) const;
  std::vector<double> get_number_array(const std::string& section, const std::string& key) const;

  /// Throws ConfigError at the first key or section never read by an accessor.
  void reject_unread() const;

  int section_line(const std::string& section) const;

 private:
  const Value& require(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Value>> tables_;
  std::map<std::string, int> section_lines_;
  mutable std::set<std::pair<std::string, std::string>> read_;
};

}  // namespace bohmflow::toml_lite
