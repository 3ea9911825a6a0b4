#include "vspline/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vspline {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> tags) {
    std::uint64_t state = 0x853c49e6748fea9bULL;
    for (std::uint64_t tag : tags) state = mix64(state ^ tag);
    return state;
}

double Rng::uniform() {
    // 53 random bits, offset by half a step to stay inside (0, 1).
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::bounded(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::bounded: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
    if (k < 0 || k > n)
        throw std::invalid_argument("Rng::sample_without_replacement: k out of range");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(bounded(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace vspline
