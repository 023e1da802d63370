#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mfg {

/// Stable 64-bit seed for the stream `label` derived from the master seed.
std::uint64_t streamSeed(std::uint64_t masterSeed, std::string_view label);

/// Independent generator per logical task; the same (seed, label) always yields the same stream.
std::mt19937_64 taskStream(std::uint64_t masterSeed, std::string_view label);

}  // namespace mfg
