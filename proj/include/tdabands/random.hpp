#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tdabands/errors.hpp"

// Deterministic, counter-based randomness. Every consumer derives its own
// stream from a (key, index) pair, so results never depend on evaluation
// order or thread count. The uniform source is the splitmix64 sequence;
// normals come from the AS241 inverse CDF applied to 53-bit uniforms.
// These transforms are part of the output contract: never change them.

namespace tdabands {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Key for the index-th child stream of `key`. Domain-separated from the
// in-stream values below so a stream and its children never collide.
inline std::uint64_t substream(std::uint64_t key, std::uint64_t index) {
    return mix64((key ^ 0xD2B74407B1CE6E93ull) + (index + 1) * kGolden);
}

// Map to (0,1): 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
inline double to_unit_open(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1p-53;
}

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16).
// Accurate to about 1e-16 over (0,1); no libm calls beyond log/sqrt.
inline double normal_icdf(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return q < 0 ? -val : val;
}

// splitmix64 stream seeded by a key.
class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    double uniform01() { return to_unit_open(next_u64()); }

    double normal() { return normal_icdf(uniform01()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Bounded draw; the modulo bias is below 2^-50 for any bound we use.
    std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

private:
    std::uint64_t state_;
};

inline void fill_normals(Rng& rng, std::span<double> out) {
    for (double& v : out) v = rng.normal();
}

// m distinct indices from {0..population-1}, partial Fisher-Yates.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t population,
                                                           std::size_t m) {
    if (m > population)
        throw ValidationError("subsample size exceeds population size");
    std::vector<std::size_t> idx(population);
    for (std::size_t i = 0; i < population; ++i) idx[i] = i;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    return idx;
}

inline std::vector<std::size_t> sample_with_replacement(Rng& rng, std::size_t population,
                                                        std::size_t m) {
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i)
        idx[i] = static_cast<std::size_t>(rng.below(population));
    return idx;
}

} // namespace tdabands
