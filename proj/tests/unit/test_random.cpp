#include "mildito/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace mildito;

TEST(Philox, KnownAnswer) {
    // Random123 reference vector for philox4x32-10 with zero counter and key.
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
    const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(NormalQuantile, KnownValues) {
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
    EXPECT_NEAR(normal_quantile(0.025), -1.959963984540054, 1e-13);
    EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-11);
    EXPECT_NEAR(normal_quantile(0.8413447460685429), 1.0, 1e-12);
}

TEST(NormalStream, SameKeysSameNumbers) {
    NormalStream a(7, StreamTag::wiener, 3), b(7, StreamTag::wiener, 3), c(7, StreamTag::wiener, 4);
    bool differs = false;
    for (int i = 0; i < 10; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        differs |= x != c.normal();
    }
    EXPECT_TRUE(differs);
}

TEST(NormalStream, Moments) {
    NormalStream s(1, StreamTag::instances, 0);
    const int n = 200000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        m1 += x;
        m2 += x * x;
    }
    m1 /= n;
    m2 /= n;
    EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(NormalStream, UniformInOpenInterval) {
    NormalStream s(3, StreamTag::instances, 1);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.uniform();
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}
