#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace clustergen {

/// Random stream used throughout the library. Every sampling routine takes
/// one by reference; independent work gets independent streams.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a(std::string_view text) noexcept;

/// Per-dataset seed derived from (master seed, archetype name, dataset
/// index). Stable across versions and platforms:
///   splitmix64(splitmix64(master ^ fnv1a(name)) + index)
std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                          std::uint64_t index) noexcept;

/// Seed for a child stream; consumes one draw from `parent`.
inline std::uint64_t child_seed(Rng& parent) { return splitmix64(parent()); }

}  // namespace clustergen
