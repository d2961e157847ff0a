#pragma once

// Minimal reader for the TOML subset used by scenario files: [section]
// headers, key = value pairs with numbers, quoted strings, booleans and flat
// numeric arrays, and # comments.

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace immunokinetics {

using TomlValue = std::variant<double, std::string, bool, std::vector<double>>;
using TomlSection = std::map<std::string, TomlValue>;
using TomlDocument = std::map<std::string, TomlSection>;

/// Throws ConfigError with the offending line number.
TomlDocument parse_toml(const std::string& text);

}  // namespace immunokinetics
