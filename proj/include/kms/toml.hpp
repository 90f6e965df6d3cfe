#pragma once

// Reader and writer for the TOML subset used by experiment configs:
// comments, [table] and [a.b] headers, bare / quoted / dotted keys, basic and
// literal strings, integers, floats (incl. inf/nan), booleans, arrays
// (multi-line, trailing comma) and inline tables.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kms/error.hpp"
#include "kms/numeric.hpp"

namespace kms::toml {

struct Value;
using Table = std::map<std::string, Value>;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array, Table> v;

  Value() : v(Table{}) {}
  Value(std::string s) : v(std::move(s)) {}
  Value(const char* s) : v(std::string(s)) {}
  Value(std::int64_t i) : v(i) {}
  Value(int i) : v(static_cast<std::int64_t>(i)) {}
  Value(double d) : v(d) {}
  Value(bool b) : v(b) {}
  Value(Array a) : v(std::move(a)) {}
  Value(Table t) : v(std::move(t)) {}

  bool is_table() const { return std::holds_alternative<Table>(v); }
  bool is_array() const { return std::holds_alternative<Array>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_float() const { return std::holds_alternative<double>(v); }
  bool is_number() const { return is_integer() || is_float(); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }

  const Table& table() const { return std::get<Table>(v); }
  Table& table() { return std::get<Table>(v); }
  const Array& array() const { return std::get<Array>(v); }
  const std::string& string() const { return std::get<std::string>(v); }
  std::int64_t integer() const { return std::get<std::int64_t>(v); }
  bool boolean() const { return std::get<bool>(v); }
  double number() const { return is_integer() ? static_cast<double>(integer()) : std::get<double>(v); }

  friend bool operator==(const Value&, const Value&) = default;
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  Table document() {
    Table root;
    Table* current = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        auto path = key_path();
        skip_spaces();
        expect(']');
        current = &open_table(root, path);
      } else {
        auto path = key_path();
        skip_spaces();
        expect('=');
        skip_spaces();
        auto val = value();
        assign(*current, path, std::move(val));
      }
      skip_spaces();
      skip_comment();
      if (!eof() && peek() != '\n') fail("expected end of line");
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("config: " + msg, line, col);
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        ++pos_;
        continue;
      }
      return;
    }
  }

  std::string key() {
    if (eof()) fail("expected key");
    if (peek() == '"' || peek() == '\'') return string_literal();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) k += s_[pos_++];
    if (k.empty()) fail("expected key");
    return k;
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{key()};
    for (;;) {
      skip_spaces();
      if (eof() || peek() != '.') return path;
      ++pos_;
      skip_spaces();
      path.push_back(key());
    }
  }

  Table& open_table(Table& root, const std::vector<std::string>& path) {
    Table* t = &root;
    for (const auto& k : path) {
      auto [it, inserted] = t->try_emplace(k, Table{});
      if (!it->second.is_table()) fail("key '" + k + "' is not a table");
      t = &it->second.table();
    }
    return *t;
  }

  void assign(Table& t, const std::vector<std::string>& path, Value val) {
    Table* cur = &t;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto [it, inserted] = cur->try_emplace(path[i], Table{});
      if (!it->second.is_table()) fail("key '" + path[i] + "' is not a table");
      cur = &it->second.table();
    }
    if (cur->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    cur->emplace(path.back(), std::move(val));
  }

  std::string string_literal() {
    const char q = peek();
    ++pos_;
    std::string out;
    while (!eof() && peek() != q) {
      char c = s_[pos_++];
      if (c == '\n') fail("unterminated string");
      if (q == '"' && c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: --pos_; fail(std::string("unknown escape '\\") + e + "'");
        }
        continue;
      }
      out += c;
    }
    if (eof()) fail("unterminated string");
    ++pos_;
    return out;
  }

  void skip_ws_newlines() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        ++pos_;
        continue;
      }
      return;
    }
  }

  Value value() {
    if (eof()) fail("expected value");
    const char c = peek();
    if (c == '"' || c == '\'') return Value(string_literal());
    if (c == '[') {
      ++pos_;
      Array a;
      for (;;) {
        skip_ws_newlines();
        if (eof()) fail("unterminated array");
        if (peek() == ']') {
          ++pos_;
          return Value(std::move(a));
        }
        a.push_back(value());
        skip_ws_newlines();
        if (!eof() && peek() == ',') {
          ++pos_;
          continue;
        }
        skip_ws_newlines();
        expect(']');
        return Value(std::move(a));
      }
    }
    if (c == '{') {
      ++pos_;
      Table t;
      skip_spaces();
      if (!eof() && peek() == '}') {
        ++pos_;
        return Value(std::move(t));
      }
      for (;;) {
        skip_spaces();
        auto path = key_path();
        skip_spaces();
        expect('=');
        skip_spaces();
        assign(t, path, value());
        skip_spaces();
        if (!eof() && peek() == ',') {
          ++pos_;
          continue;
        }
        expect('}');
        return Value(std::move(t));
      }
    }
    const std::size_t start = pos_;
    std::string tok;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_'))
      tok += s_[pos_++];
    if (tok == "true") return Value(true);
    if (tok == "false") return Value(false);
    std::string clean;
    for (char ch : tok)
      if (ch != '_') clean += ch;
    if (clean.empty()) fail("expected value");
    if (clean == "inf" || clean == "+inf") return Value(HUGE_VAL);
    if (clean == "-inf") return Value(-HUGE_VAL);
    if (clean == "nan" || clean == "+nan" || clean == "-nan") return Value(std::nan(""));
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    try {
      if (is_float) return Value(numeric::parse_double(clean));
      std::size_t used = 0;
      const long long v = std::stoll(clean, &used, 10);
      if (used != clean.size()) throw DomainError("trailing characters");
      return Value(static_cast<std::int64_t>(v));
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed value '" + tok + "'");
    }
  }
};

inline bool bare_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

inline std::string render_key(const std::string& k) { return bare_key(k) ? k : quote(k); }

inline std::string render_float(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  std::string s = numeric::format_double(d);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

inline std::string render_inline(const Value& v) {
  if (v.is_string()) return quote(v.string());
  if (v.is_integer()) return std::to_string(v.integer());
  if (v.is_float()) return render_float(v.number());
  if (v.is_bool()) return v.boolean() ? "true" : "false";
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.array().size(); ++i) s += (i ? ", " : "") + render_inline(v.array()[i]);
    return s + "]";
  }
  std::string s = "{";
  bool first = true;
  for (const auto& [k, x] : v.table()) {
    s += (first ? " " : ", ") + render_key(k) + " = " + render_inline(x);
    first = false;
  }
  return s + (first ? "}" : " }");
}

inline void render_table(std::ostringstream& os, const Table& t, const std::string& prefix) {
  for (const auto& [k, v] : t)
    if (!v.is_table()) os << render_key(k) << " = " << render_inline(v) << '\n';
  for (const auto& [k, v] : t) {
    if (!v.is_table()) continue;
    const std::string name = prefix.empty() ? render_key(k) : prefix + "." + render_key(k);
    os << "\n[" << name << "]\n";
    render_table(os, v.table(), name);
  }
}

}  // namespace detail

inline Table parse(std::string_view text) { return detail::Reader(text).document(); }

/// Canonical text: scalar keys first (sorted), then sub-tables as [headers].
inline std::string render(const Table& t) {
  std::ostringstream os;
  detail::render_table(os, t, "");
  return os.str();
}

}  // namespace kms::toml
