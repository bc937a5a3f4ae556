#include "ghostsim/rng.hpp"

namespace ghostsim {

std::uint64_t stable_label_hash(std::string_view label) {
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t mix_bits(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ull;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t shard) {
  std::uint64_t s = seed ^ stable_label_hash(label);
  return mix_bits(mix_bits(s) + shard);
}

}  // namespace ghostsim
