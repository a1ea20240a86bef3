// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/rng.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace detfun::rng {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t h = mix64(seed ^ 0xD1B54A32D192ED03ULL);
  h = mix64(h ^ stream);
  h = mix64(h ^ counter);
  return h;
}

std::uint64_t mode_stream(Channel ch, int k1, int k2, int slot) {
  if (k1 < -4096 || k1 > 4095 || k2 < -4096 || k2 > 4095)
    throw ConfigError("rng::mode_stream: wavevector out of encodable range");
  const std::uint64_t a = static_cast<std::uint64_t>(k1 + 4096);
  const std::uint64_t b = static_cast<std::uint64_t>(k2 + 4096);
  return (static_cast<std::uint64_t>(ch) << 56) | (a << 43) | (b << 30) |
         static_cast<std::uint64_t>(static_cast<unsigned>(slot) & 0x3FFFFFFFu);
}

double uniform_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t bits = hash3(seed, stream, counter);
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t counter) {
  const std::uint64_t bits1 = hash3(seed, stream, counter);
  const std::uint64_t bits2 = mix64(bits1 ^ 0xA0761D6478BD642FULL);
  const double u1 = (static_cast<double>(bits1 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(bits2 >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace detfun::rng
