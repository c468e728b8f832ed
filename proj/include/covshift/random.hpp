#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace covshift {

using Rng = std::mt19937_64;

/// Engine seeded from a tuple of 64-bit keys (e.g. run seed, dataset index,
/// repetition, stream id). Distinct tuples give independent streams.
inline Rng make_rng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * keys.size());
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace covshift
