#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rlvr/common/jsonl.hpp"

namespace rlvr {

/// Invalid or unknown configuration. Raised before any input is read.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError if `j` is not an object or has a key outside `allowed`.
void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                std::string_view context);

/// Reads j[key] as T if present, else returns `fallback`. Type mismatches become
/// ConfigError naming `context.key`.
template <typename T>
T config_value(const json& j, const char* key, T fallback, std::string_view context) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(context) + "." + key + ": wrong type");
  }
}

/// Parses "p/q" or a decimal in [0, 1] into numerator/denominator.
struct Fraction {
  long long num = 0;
  long long den = 1;
};
Fraction parse_fraction(const json& value, std::string_view context);

}  // namespace rlvr
