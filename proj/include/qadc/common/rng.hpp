#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace qadc {

using Rng = std::mt19937_64;

/// Independent generator for the stream identified by `ids` under `seed`.
/// Same (seed, ids) always yields the same sequence.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (ids.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto id : ids) push(id);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Stream tags, so that different consumers of one seed never share a stream.
namespace stream {
inline constexpr std::uint64_t quantum = 0x51;
inline constexpr std::uint64_t classical = 0xC1;
inline constexpr std::uint64_t sweep = 0x5E;
inline constexpr std::uint64_t matching = 0x3A;
inline constexpr std::uint64_t perturbation = 0x9E;
inline constexpr std::uint64_t bootstrap = 0xB0;
inline constexpr std::uint64_t training = 0x7A;
inline constexpr std::uint64_t data = 0xDA;
}  // namespace stream

}  // namespace qadc
