#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace secbeam {

// Deterministic random source. std::mt19937_64 is bit-exact across
// implementations; the uniform/normal mappings below are implemented by hand so
// that generated scenarios do not depend on standard-library distribution
// internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Independent sub-stream: hashes (seed, stream_id) through splitmix64 so
    // that per-entity draws are stable under reordering of generation loops.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1] (safe as a logarithm argument).
    double uniform_pos() { return 1.0 - uniform(); }

    // Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double t = 2.0 * pi() * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Circularly symmetric complex normal with E|z|^2 = 1.
    std::complex<double> cnormal() {
        const double r = std::sqrt(-std::log(uniform_pos()));
        const double t = 2.0 * pi() * uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }

    std::uint64_t raw() { return eng_(); }

private:
    static constexpr double pi() { return 3.141592653589793238462643383279502884; }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace secbeam
