#include "rlvr/common/config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rlvr {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(std::string(context) + ": unknown key \"" + it.key() + "\"");
  }
}

Fraction parse_fraction(const json& value, std::string_view context) {
  const std::string where(context);
  Fraction f;
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) throw std::invalid_argument(s);
      std::size_t used = 0;
      f.num = std::stoll(s.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(s);
      const std::string rest = s.substr(slash + 1);
      f.den = std::stoll(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError(where + ": expected \"p/q\", got \"" + s + "\"");
    }
  } else if (value.is_number_integer()) {
    f.num = value.get<long long>();
  } else if (value.is_number()) {
    // Decimals are read with a fixed denominator; 1e6 is plenty for thresholds.
    const double d = value.get<double>();
    f.den = 1000000;
    f.num = std::llround(d * 1e6);
  } else {
    throw ConfigError(where + ": expected a fraction");
  }
  if (f.den <= 0 || f.num < 0 || f.num > f.den)
    throw ConfigError(where + ": fraction must lie in [0, 1]");
  const long long g = std::gcd(f.num, f.den);
  if (g > 1) f.num /= g, f.den /= g;
  return f;
}

}  // namespace rlvr
