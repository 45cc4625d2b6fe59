#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "oct/errors.hpp"

namespace oct {

/// Shortest decimal representation that parses back to the same double.
/// Locale-independent, so text outputs are byte-stable across machines.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Strict full-token parse; leading/trailing blanks must be trimmed first.
inline bool try_parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

struct KeyValueLine {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Splits `key = value` text into entries; `#` starts a comment, blank lines
/// are skipped. Malformed lines raise InputError naming `source:line`.
inline std::vector<KeyValueLine> parse_key_value_lines(std::string_view text, std::string_view source) {
  std::vector<KeyValueLine> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InputError(where + "expected 'key = value'");
    KeyValueLine kv{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    if (kv.key.empty()) throw InputError(where + "missing key");
    if (kv.value.empty()) throw InputError(where + "missing value for '" + kv.key + "'");
    out.push_back(std::move(kv));
  }
  return out;
}

}  // namespace oct
