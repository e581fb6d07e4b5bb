#include "mildito/random.hpp"

#include <algorithm>
#include <cmath>

namespace mildito {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::array<std::uint32_t, 2> derive_key(std::uint64_t seed, StreamTag tag) noexcept {
    const std::uint64_t k = splitmix64(seed ^ (static_cast<std::uint64_t>(tag) << 56));
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

// Maps 32 random bits to the open interval (0,1).
inline double to_open_unit(std::uint32_t bits) noexcept {
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-32;
}

// Central branch of AS241, |q| <= 0.425 with q = p - 1/2.
inline double quantile_central(double q) noexcept {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
             6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
           1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
         1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
    const double den =
        ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
             3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
           5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
         4.2313330701600911252e+1) * r + 1.0;
    return q * num / den;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) noexcept {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

double normal_quantile(double p) noexcept {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) return quantile_central(q);
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                 2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
               3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
             4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
        const double den =
            ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
               6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
             2.05319162663775882187e+0) * r + 1.0;
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
               2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
             5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
        const double den =
            ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
               1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
             5.99832206555887937690e-1) * r + 1.0;
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

std::array<double, 4> normal4(std::uint64_t seed, StreamTag tag, std::uint64_t stream,
                              std::uint64_t index) noexcept {
    const auto bits = philox4x32({static_cast<std::uint32_t>(stream),
                                  static_cast<std::uint32_t>(stream >> 32),
                                  static_cast<std::uint32_t>(index),
                                  static_cast<std::uint32_t>(index >> 32)},
                                 derive_key(seed, tag));
    return {normal_quantile(to_open_unit(bits[0])), normal_quantile(to_open_unit(bits[1])),
            normal_quantile(to_open_unit(bits[2])), normal_quantile(to_open_unit(bits[3]))};
}

void normal_fill(std::uint64_t seed, StreamTag tag, std::uint64_t stream, std::uint64_t first_block,
                 std::span<double> out) noexcept {
    constexpr std::size_t kChunk = 64;
    const auto key = derive_key(seed, tag);
    const std::array<std::uint32_t, 2> lanes = {static_cast<std::uint32_t>(stream),
                                                 static_cast<std::uint32_t>(stream >> 32)};
    std::array<double, kChunk> u;
    std::array<double, kChunk> z;
    for (std::size_t begin = 0; begin < out.size(); begin += kChunk) {
        const std::size_t count = std::min(kChunk, out.size() - begin);
        for (std::size_t i = 0; i < count; i += 4) {
            const std::uint64_t index = first_block + (begin + i) / 4;
            const auto bits = philox4x32(
                {lanes[0], lanes[1], static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)}, key);
            for (std::size_t c = 0; c < 4 && i + c < count; ++c) u[i + c] = to_open_unit(bits[c]);
        }
        // Evaluate the central branch everywhere (vectorisable), then redo the tails.
        for (std::size_t i = 0; i < count; ++i) z[i] = quantile_central(u[i] - 0.5);
        for (std::size_t i = 0; i < count; ++i)
            out[begin + i] = std::fabs(u[i] - 0.5) <= 0.425 ? z[i] : normal_quantile(u[i]);
    }
}

std::array<std::uint32_t, 4> NormalStream::next_block() noexcept {
    const std::uint64_t index = counter_++;
    return philox4x32({static_cast<std::uint32_t>(stream_),
                       static_cast<std::uint32_t>(stream_ >> 32),
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32)},
                      derive_key(seed_, tag_));
}

double NormalStream::normal() noexcept {
    if (normal_pos_ == 4) {
        const auto bits = next_block();
        for (int i = 0; i < 4; ++i) normals_[i] = normal_quantile(to_open_unit(bits[i]));
        normal_pos_ = 0;
    }
    return normals_[normal_pos_++];
}

double NormalStream::uniform() noexcept {
    if (bits_pos_ == 4) {
        bits_ = next_block();
        bits_pos_ = 0;
    }
    return to_open_unit(bits_[bits_pos_++]);
}

}  // namespace mildito
