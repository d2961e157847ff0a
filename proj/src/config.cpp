#include "immunokinetics/config.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "immunokinetics/errors.hpp"

namespace immunokinetics {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream msg;
  msg << "config line " << line << ": " << what;
  throw ConfigError(msg.str());
}

// Drops a trailing comment, ignoring '#' inside quotes.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

double parse_number(const std::string& raw, int line) {
  std::string s;
  for (char c : raw) {
    if (c != '_') s.push_back(c);
  }
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(line, "cannot parse value '" + raw + "'");
  }
  return v;
}

TomlValue parse_value(const std::string& raw, int line) {
  if (raw.empty()) fail(line, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
    return raw.substr(1, raw.size() - 2);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated array");
    std::vector<double> out;
    std::stringstream body(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(body, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;  // trailing comma
      out.push_back(parse_number(t, line));
    }
    return out;
  }
  return parse_number(raw, line);
}

}  // namespace

TomlDocument parse_toml(const std::string& text) {
  TomlDocument doc;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::string pending;  // multi-line arrays
  int pending_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (!pending.empty()) {
      pending += " " + s;
      if (s.find(']') == std::string::npos) continue;
      s = pending;
      pending.clear();
    }
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(line, "empty section name");
      if (doc.count(section)) fail(line, "duplicate section [" + section + "]");
      doc[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (!value.empty() && value.front() == '[' && value.find(']') == std::string::npos) {
      pending = s;
      pending_line = line;
      continue;
    }
    if (section.empty()) fail(line, "key '" + key + "' outside any section");
    auto& table = doc[section];
    if (table.count(key)) fail(line, "duplicate key '" + key + "'");
    table[key] = parse_value(value, line);
  }
  if (!pending.empty()) fail(pending_line, "unterminated array");
  return doc;
}

}  // namespace immunokinetics
