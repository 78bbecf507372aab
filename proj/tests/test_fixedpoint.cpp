#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qisomap/fixedpoint.hpp"

using namespace qisomap::fixedpoint;

TEST(FixedPoint, EncodeZero) {
    FpFormat fmt{8, 2};
    EXPECT_EQ(encode(0.0, fmt).raw, 0u);
}

TEST(FixedPoint, TwosComplementNegative) {
    FpFormat fmt{4, 0};
    EXPECT_EQ(encode(-2.0, fmt).raw, 0b1110u);
    EXPECT_DOUBLE_EQ(decode({0b1110u, fmt}), -2.0);
}

TEST(FixedPoint, FractionScaling) {
    FpFormat fmt{8, 2};
    FpCode c = encode(1.5, fmt);
    EXPECT_EQ(c.raw, 0b00000110u);
    EXPECT_DOUBLE_EQ(decode(c), 1.5);
}

TEST(FixedPoint, SentinelDecodesToInfinity) {
    FpFormat fmt{8, 2};
    EXPECT_TRUE(std::isinf(decode({fmt.sentinel_max(), fmt})));
    EXPECT_EQ(encode(kInfinityMarker, fmt).raw, fmt.sentinel_max());
}

TEST(FixedPoint, OverflowThrows) {
    FpFormat fmt{8, 2};
    EXPECT_THROW(encode(40.0, fmt), qisomap::OverflowError);
    EXPECT_THROW(encode(-40.0, fmt), qisomap::OverflowError);
}

TEST(FixedPoint, ChooseFormatBound) {
    // l >= f + ceil(log2(4*N*max)) + 2
    FpFormat a = choose_format(1.0, 4, 4);
    EXPECT_GE(a.total_bits, 10);
    EXPECT_EQ(a.fraction_bits, 4);
    FpFormat b = choose_format(0.5, 2, 0);
    EXPECT_GE(b.total_bits, 4);
}

TEST(FixedPoint, RoundTripProperty) {
    FpFormat fmt{12, 5};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-fmt.range() * 0.999, fmt.range() * 0.999);
    double ulp_half = 0.5 / fmt.scale();
    for (int trial = 0; trial < 5000; ++trial) {
        double v = dist(rng);
        // the code just below zero is reserved as the sentinel; values that
        // would round onto it are nudged and miss the half-ulp bound
        if (std::fabs(v + 1.0 / fmt.scale()) <= ulp_half) continue;
        double back = decode(encode(v, fmt));
        EXPECT_LE(std::fabs(back - v), ulp_half + 1e-15) << "v=" << v;
    }
}

TEST(FixedPoint, MonotoneProperty) {
    FpFormat fmt{10, 3};
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dist(0.0, fmt.range() * 0.999);
    for (int trial = 0; trial < 2000; ++trial) {
        double a = dist(rng), b = dist(rng);
        if (a > b) std::swap(a, b);
        EXPECT_LE(decode(encode(a, fmt)), decode(encode(b, fmt)));
    }
}

TEST(FixedPoint, SentinelDominatesFiniteDistances) {
    FpFormat fmt = choose_format(3.0, 8, 4);
    // any finite nonnegative distance the pipeline can produce stays below
    // the sentinel in raw code space
    double path_bound = 2.0 * 8 * 3.0;
    FpCode c = encode(path_bound, fmt);
    EXPECT_LT(c.raw, fmt.sentinel_max());
}

TEST(FixedPoint, SignedHelpersSkipSentinel) {
    FpFormat fmt{8, 3};
    std::uint64_t raw = encode_signed(-1.5, fmt);
    EXPECT_DOUBLE_EQ(decode_signed(raw, fmt), -1.5);
    // all-ones is an ordinary value for signed registers
    EXPECT_DOUBLE_EQ(decode_signed(fmt.sentinel_max(), fmt), -1.0 / fmt.scale());
}
