#ifndef CDESIM_RNG_HPP_
#define CDESIM_RNG_HPP_

#include <complex>
#include <cstdint>
#include <random>

namespace cdesim {

// Purpose tag of a derived random stream. Every random quantity in a Monte
// Carlo iteration comes from its own stream keyed by
// (master seed, iteration, lane, purpose), so results do not depend on the
// order in which iterations execute.
enum class StreamPurpose : std::uint64_t {
    channel_taps = 1,
    cfo = 2,
    data_bits = 3,
    noise = 4,
    channel_error = 5,
    generic = 6,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t word) {
    return splitmix64(seed ^ (word + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

}  // namespace detail

// Deterministic random stream. The scalar transforms are implemented here
// (not via std::*_distribution) so that byte-identical output does not depend
// on the standard library version.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    RandomStream(std::uint64_t master_seed, std::uint64_t iteration, std::uint64_t lane,
                 StreamPurpose purpose)
        : engine_(detail::mix(
              detail::mix(detail::mix(master_seed, iteration), lane),
              static_cast<std::uint64_t>(purpose))) {}

    std::uint64_t word() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(word() >> 11) * 0x1.0p-53; }

    // Uniform on [-1, 1).
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    // Standard normal pair via Box-Muller.
    void gaussian_pair(double& a, double& b) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        a = r * std::cos(phi);
        b = r * std::sin(phi);
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_gaussian(double variance) {
        double a, b;
        gaussian_pair(a, b);
        const double s = std::sqrt(variance / 2.0);
        return {s * a, s * b};
    }

    bool bit() { return (word() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace cdesim

#endif  // CDESIM_RNG_HPP_
