#pragma once
#include <cstdint>
#include <string_view>

namespace ghostsim {

/// FNV-1a hash of a sub-task label. Stable across platforms and runs, so a
/// campaign split into named sub-tasks (z-points, audit arms, batches) always
/// derives the same per-task seeds.
std::uint64_t stable_label_hash(std::string_view label);

/// splitmix64 finalizer; decorrelates nearby seed values.
std::uint64_t mix_bits(std::uint64_t v);

/// Seed for shard `shard` of the sub-task named `label`:
/// base seed XOR label hash, then mixed together with the shard index.
/// Every Monte Carlo stream in the library is seeded through this function,
/// which makes results independent of how shards are scheduled.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t shard = 0);

/// Fixed batch size defining the shard layout of pair-sampling campaigns.
inline constexpr std::uint64_t kPairBatch = 1u << 16;

}  // namespace ghostsim
