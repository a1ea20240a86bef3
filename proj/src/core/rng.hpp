// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_RNG_HPP
#define DETFUN_CORE_RNG_HPP

#include <cstdint>
#include <utility>

namespace detfun::rng {

// Counter-based Gaussian streams.
//
// Every random draw in the toolkit is a pure function of
// (seed, stream, counter), where the stream id encodes the consumer
// (channel) and, for per-mode noise, the wavevector. Ensemble members,
// restarts and grid refinements therefore reproduce bit-exactly and
// independently of evaluation order or thread count. The mixer is the
// splitmix64 finalizer applied in a short chain, which has full
// avalanche over the 192-bit input.

enum class Channel : std::uint64_t {
  wiener = 1,       // Wiener increments
  ou_extra = 2,     // conditional remainder of the OU convolution
  stationary = 3,   // stationary OU samples
  init_cond = 4,    // initial-condition sampling on spheres
  field_sample = 5, // generic random test/audit fields
};

std::uint64_t mix64(std::uint64_t x);

// Combined hash of the triple; statistically independent outputs for
// distinct triples.
std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Stream id for a per-mode channel. Wavevector components must lie in
// [-4096, 4095]; `slot` distinguishes multiple draws per (channel, mode).
std::uint64_t mode_stream(Channel ch, int k1, int k2, int slot = 0);

// Uniform in (0, 1] (never zero, safe for log).
double uniform_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Standard normal pair via Box-Muller; one counter consumes one pair.
std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t counter);

}  // namespace detfun::rng

#endif
