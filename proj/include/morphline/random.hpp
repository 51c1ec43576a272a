#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace morphline {

/// SplitMix64 finalizer; bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a master seed and a path of integers,
/// e.g. derive_seed(seed, {generation, attempt}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded stream with platform-independent output. The engine sequence is fixed by the
/// C++ standard; the distributions are implemented here because std:: distributions are not.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller.
    double normal();

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace morphline
