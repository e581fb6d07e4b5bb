#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace mildito {

/// Runs body(i) for i in [0, count) on `workers` threads using a static
/// contiguous partition. Results must be written to per-index slots; the
/// caller reduces them afterwards so the outcome does not depend on the
/// worker count. The first exception (lowest index among those observed)
/// is rethrown.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(count, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise (cascade) summation in a fixed tree order.
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_mean = 0.0;
};

/// Mean, unbiased variance and standard error, all reduced pairwise.
inline SampleStats sample_stats(std::span<const double> values) {
    SampleStats s;
    const std::size_t n = values.size();
    if (n == 0) return s;
    s.mean = pairwise_sum(values) / static_cast<double>(n);
    if (n < 2) return s;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - s.mean) * (values[i] - s.mean);
    s.variance = pairwise_sum(sq) / static_cast<double>(n - 1);
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(n));
    return s;
}

}  // namespace mildito
