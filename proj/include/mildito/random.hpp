#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace mildito {

/// Stream tags keep draws for different purposes independent under one master seed.
enum class StreamTag : std::uint32_t {
    wiener = 1,
    gamma_mc = 2,
    instances = 3,
    sobolev = 4,
};

/// Philox4x32-10 counter-based generator. The output is a pure function of
/// (key, counter); there is no hidden state, so draws can be evaluated in
/// any order and on any worker.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Inverse of the standard normal CDF (Wichura, AS 241), p in (0,1).
double normal_quantile(double p) noexcept;

/// Four standard normals keyed by (seed, tag, stream, index).
std::array<double, 4> normal4(std::uint64_t seed, StreamTag tag, std::uint64_t stream,
                              std::uint64_t index) noexcept;

/// Sequential normal/uniform source over one (seed, tag, stream) key.
/// Cheap to construct; use one per sample or per path.
/// Fills `out` with the normals of blocks first_block, first_block + 1, ...
/// of one stream, in order. Same values as repeated normal4 calls.
void normal_fill(std::uint64_t seed, StreamTag tag, std::uint64_t stream, std::uint64_t first_block,
                 std::span<double> out) noexcept;

class NormalStream {
public:
    NormalStream(std::uint64_t seed, StreamTag tag, std::uint64_t stream) noexcept
        : seed_(seed), tag_(tag), stream_(stream) {}

    double normal() noexcept;
    double uniform() noexcept;

private:
    std::array<std::uint32_t, 4> next_block() noexcept;

    std::uint64_t seed_;
    StreamTag tag_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<double, 4> normals_{};
    int normal_pos_ = 4;
    std::array<std::uint32_t, 4> bits_{};
    int bits_pos_ = 4;
};

}  // namespace mildito
