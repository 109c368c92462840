#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace adlink {

using Rng = std::mt19937_64;

/// One step of the splitmix64 sequence. Advances `state`.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// The `index`-th value of the splitmix64 sequence started at `master`.
/// Used to expand one seed into independent per-tree / per-stage seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master + index * 0x9e3779b97f4a7c15ULL;
    return splitmix64(state);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform_real(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline bool bernoulli(Rng& rng, double p) { return uniform_real(rng) < p; }

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[uniform_index(rng, v.size())];
}

template <class T>
void shuffle(Rng& rng, std::vector<T>& v) {
    // Explicit Fisher-Yates keeps the permutation independent of the
    // standard library's std::shuffle implementation.
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_index(rng, i)]);
    }
}

}  // namespace adlink
