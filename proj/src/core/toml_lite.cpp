#include "bohmflow/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "bohmflow/errors.hpp"

namespace bohmflow::toml_lite {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::string& source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source_, line_, msg); }
  [[noreturn]] void fail_at(int line, const std::string& msg) const {
    throw ConfigError(source_, line, msg);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }

  // Inside arrays newlines and comments are insignificant.
  void skip_space_and_newlines() {
    for (;;) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      return;
    }
  }

  void expect_line_end() {
    skip_inline_space();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "' after value");
    ++pos_;
    ++line_;
  }

  std::string parse_bare_key() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-'))
      ++pos_;
    if (pos_ == start) fail("expected a key");
    if (peek() == '.') fail("dotted keys are not supported");
    return std::string(text_.substr(start, pos_ - start));
  }

  Value parse_value() {
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '"') {
      v.kind = Value::Kind::string;
      v.string = parse_string();
      return v;
    }
    if (c == '[') {
      ++pos_;
      v.kind = Value::Kind::array;
      skip_space_and_newlines();
      while (peek() != ']') {
        if (at_end()) fail_at(v.line, "unterminated array");
        v.array.push_back(parse_value());
        skip_space_and_newlines();
        if (peek() == ',') {
          ++pos_;
          skip_space_and_newlines();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      ++pos_;
      return v;
    }
    if (c == '{') fail("inline tables are not supported");
    if (c == '\'') fail("literal strings are not supported; use double quotes");

    const std::size_t start = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != '\n' &&
           peek() != ' ' && peek() != '\t' && peek() != '\r')
      ++pos_;
    std::string token(text_.substr(start, pos_ - start));
    if (token.empty()) fail("missing value");
    if (token == "true" || token == "false") {
      v.kind = Value::Kind::boolean;
      v.boolean = token == "true";
      return v;
    }
    std::string digits;
    digits.reserve(token.size());
    for (char ch : token)
      if (ch != '_') digits.push_back(ch);
    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    const char* first = digits.data();
    const char* last = digits.data() + digits.size();
    if (*first == '+') ++first;
    if (is_float) {
      double d = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || ptr != last || !std::isfinite(d))
        fail("invalid number '" + token + "'");
      v.kind = Value::Kind::floating;
      v.floating = d;
    } else {
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(first, last, i);
      if (ec != std::errc() || ptr != last) fail("invalid value '" + token + "'");
      v.kind = Value::Kind::integer;
      v.integer = i;
    }
    return v;
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape sequence");
      const char e = text_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
  }

  void run(std::map<std::string, std::map<std::string, Value>>& tables,
           std::map<std::string, int>& section_lines) {
    std::string section;
    section_lines[section] = 0;
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (at_end()) break;
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_inline_space();
        std::string name = parse_bare_key();
        skip_inline_space();
        if (peek() != ']') fail("expected ']' to close section header");
        ++pos_;
        if (section_lines.count(name) && name != "") fail("duplicate section [" + name + "]");
        section = name;
        section_lines[section] = line_;
        tables[section];
        expect_line_end();
        continue;
      }
      const int key_line = line_;
      std::string key = parse_bare_key();
      skip_inline_space();
      if (peek() != '=') fail("expected '=' after key '" + key + "'");
      ++pos_;
      skip_inline_space();
      Value v = parse_value();
      auto& table = tables[section];
      if (table.count(key)) fail_at(key_line, "duplicate key '" + key + "'");
      v.line = key_line;
      table.emplace(std::move(key), std::move(v));
      expect_line_end();
    }
  }

 private:
  std::string_view text_;
  const std::string& source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

const char* kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::boolean: return "boolean";
    case Value::Kind::integer: return "integer";
    case Value::Kind::floating: return "float";
    case Value::Kind::string: return "string";
    case Value::Kind::array: return "array";
  }
  return "?";
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

}  // namespace

Document Document::parse(std::string_view text, std::string source) {
  Document doc;
  doc.source_ = std::move(source);
  Parser(text, doc.source_).run(doc.tables_, doc.section_lines_);
  return doc;
}

bool Document::has_section(const std::string& section) const { return tables_.count(section) > 0; }

int Document::section_line(const std::string& section) const {
  auto it = section_lines_.find(section);
  return it == section_lines_.end() ? 0 : it->second;
}

const Value* Document::find(const std::string& section, const std::string& key) const {
  auto t = tables_.find(section);
  if (t == tables_.end()) return nullptr;
  auto v = t->second.find(key);
  if (v == t->second.end()) return nullptr;
  read_.insert({section, key});
  return &v->second;
}

const Value& Document::require(const std::string& section, const std::string& key) const {
  const Value* v = find(section, key);
  if (v == nullptr) {
    throw ConfigError(source_, section_line(section),
                      "missing required key '" + qualified(section, key) + "'");
  }
  return *v;
}

double Document::get_number(const std::string& section, const std::string& key,
                            std::optional<double> fallback) const {
  const Value* v = find(section, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    v = &require(section, key);
  }
  if (!v->is_number())
    throw ConfigError(source_, v->line,
                      "'" + qualified(section, key) + "' must be a number, got " + kind_name(v->kind));
  return v->as_number();
}

std::int64_t Document::get_integer(const std::string& section, const std::string& key,
                                   std::optional<std::int64_t> fallback) const {
  const Value* v = find(section, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    v = &require(section, key);
  }
  if (v->kind != Value::Kind::integer)
    throw ConfigError(source_, v->line,
                      "'" + qualified(section, key) + "' must be an integer, got " +
                          kind_name(v->kind));
  return v->integer;
}

std::string Document::get_string(const std::string& section, const std::string& key,
                                 std::optional<std::string> fallback) const {
  const Value* v = find(section, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    v = &require(section, key);
  }
  if (v->kind != Value::Kind::string)
    throw ConfigError(source_, v->line,
                      "'" + qualified(section, key) + "' must be a string, got " + kind_name(v->kind));
  return v->string;
}

bool Document::get_bool(const std::string& section, const std::string& key,
                        std::optional<bool> fallback) const {
  const Value* v = find(section, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    v = &require(section, key);
  }
  if (v->kind != Value::Kind::boolean)
    throw ConfigError(source_, v->line,
                      "'" + qualified(section, key) + "' must be a boolean, got " + kind_name(v->kind));
  return v->boolean;
}

std::vector<double> Document::get_number_array(const std::string& section,
                                               const std::string& key) const {
  const Value& v = require(section, key);
  if (v.kind != Value::Kind::array)
    throw ConfigError(source_, v.line,
                      "'" + qualified(section, key) + "' must be an array, got " + kind_name(v.kind));
  std::vector<double> out;
  out.reserve(v.array.size());
  for (const auto& e : v.array) {
    if (!e.is_number())
      throw ConfigError(source_, e.line,
                        "'" + qualified(section, key) + "' must contain only numbers");
    out.push_back(e.as_number());
  }
  return out;
}

void Document::reject_unread() const {
  for (const auto& [section, table] : tables_) {
    for (const auto& [key, value] : table) {
      if (!read_.count({section, key}))
        throw ConfigError(source_, value.line, "unknown key '" + qualified(section, key) + "'");
    }
  }
}

}  // namespace bohmflow::toml_lite
