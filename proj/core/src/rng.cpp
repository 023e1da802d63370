#include "mfg/rng.hpp"

namespace mfg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t streamSeed(std::uint64_t masterSeed, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(masterSeed ^ splitmix64(h));
}

std::mt19937_64 taskStream(std::uint64_t masterSeed, std::string_view label) {
    return std::mt19937_64(streamSeed(masterSeed, label));
}

}  // namespace mfg
