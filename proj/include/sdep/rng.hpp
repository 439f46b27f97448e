#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace sdep {

/// One step of SplitMix64; advances `state`.
[[nodiscard]] inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the independent stream `stream` split off `base`.
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = a ^ (stream * 0xD1B54A32D192ED03ULL);
    return splitmix64(t);
}

using Engine = std::mt19937_64;

/// `count` iid N(0, 1) draws from the stream seeded with `seed`.
[[nodiscard]] inline Eigen::VectorXd standard_normals(std::uint64_t seed, Eigen::Index count) {
    Engine engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(count);
    for (Eigen::Index i = 0; i < count; ++i) z[i] = normal(engine);
    return z;
}

}  // namespace sdep
