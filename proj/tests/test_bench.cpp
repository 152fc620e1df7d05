#include <gtest/gtest.h>

#include "ptgrid/bench.hpp"

using namespace ptgrid;
using namespace ptgrid::bench;

TEST(Bench, EncodingIsRoughlyLinear) {
    const auto b = bench_encoding({20000, 60000, 200000, 600000}, 128, 3);
    ASSERT_EQ(b.rows.size(), 4u);
    for (const auto& row : b.rows) {
        EXPECT_EQ(row.seconds.size(), 3u);
        EXPECT_GT(row.median, 0.0);
    }
    EXPECT_GT(b.exponent(), 0.6);
    EXPECT_LT(b.exponent(), 1.4);
}

TEST(Bench, RepeatCountDoesNotShiftMedianMuch) {
    const auto one = bench_encoding({100000, 300000}, 128, 1);
    const auto five = bench_encoding({100000, 300000}, 128, 5);
    for (std::size_t i = 0; i < 2; ++i) {
        const double ratio = one.rows[i].median / five.rows[i].median;
        EXPECT_GT(ratio, 0.33);
        EXPECT_LT(ratio, 3.0);
    }
}

TEST(Bench, ReconstructionHasGridTerm) {
    const auto b = bench_reconstruction(20000, {64, 512, 1024, 1536}, 3);
    EXPECT_EQ(b.rows.size(), 4u);
    EXPECT_GT(b.r2_coefficient(), 0.0);
}

TEST(Bench, RejectsBadArguments) {
    EXPECT_THROW((void)bench_encoding({1000}, 64, 1), ValidationError);
    EXPECT_THROW((void)bench_encoding({1000, 2000}, 64, 0), ValidationError);
    EXPECT_THROW((void)bench_reconstruction(100, {8, 16}, 1), ValidationError);
}
