#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tapmein {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream identified by (master, i0, i1, ...). Different index
/// paths yield unrelated seeds.
inline std::uint64_t StreamSeed(std::uint64_t master,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = MixSeed(master);
  for (std::uint64_t p : path) s = MixSeed(s ^ MixSeed(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng MakeStream(std::uint64_t master,
                      std::initializer_list<std::uint64_t> path) {
  return Rng(StreamSeed(master, path));
}

}  // namespace tapmein
