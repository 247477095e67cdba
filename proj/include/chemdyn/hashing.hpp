#pragma once

#include <cstdint>
#include <string_view>

namespace chemdyn {

// Fixed 64-bit mixer (splitmix64 finalizer). Every hashed quantity in the
// library (fingerprints, the mock encoder, split bucketing) goes through
// this function so that outputs are identical across platforms and runs.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

constexpr std::uint64_t hash_string(std::string_view s, std::uint64_t seed = 0) {
  std::uint64_t h = mix64(seed ^ 0xcbf29ce484222325ULL);
  for (char c : s) {
    h = hash_combine(h, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  }
  return h;
}

// Maps a hash to a double in [-1, 1).
constexpr double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

}  // namespace chemdyn
