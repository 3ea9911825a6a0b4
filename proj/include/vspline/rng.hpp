#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace vspline {

// splitmix64 step; used to derive independent substream seeds from a user
// seed plus context tags.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> tags);

// Deterministic random source on top of mt19937_64 (whose output sequence is
// pinned by the standard). Normals come from Box-Muller over 53-bit uniforms
// rather than std::normal_distribution, which is implementation-defined, so
// simulation output is byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform();                      // (0, 1)
    double normal();                       // standard normal
    std::uint64_t bounded(std::uint64_t n);  // unbiased draw from [0, n)

    // k distinct values from [0, n), in selection order.
    std::vector<int> sample_without_replacement(int n, int k);

private:
    std::mt19937_64 eng_;
};

}  // namespace vspline
