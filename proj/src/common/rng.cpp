#include "rlvr/common/rng.hpp"

namespace rlvr {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x85157af5ULL));
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view key, std::uint64_t a) noexcept {
  return derive_seed(master, fnv1a64(key), a);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling avoids modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace rlvr
