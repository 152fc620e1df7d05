#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "ptgrid/info_content.hpp"

using namespace ptgrid;
using namespace ptgrid::info;

namespace {

/// Exact log2 of sum_{q=1}^{qmax} C(n, q) for small n, in integers.
double exact_binary_bits(std::uint64_t n, std::uint64_t qmax) {
    std::uint64_t total = 0, c = 1;
    for (std::uint64_t q = 1; q <= qmax; ++q) {
        c = c * (n - q + 1) / q;
        total += c;
    }
    return std::log2(static_cast<double>(total));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Log2Binomial, SmallExactCases) {
    EXPECT_NEAR(log2_binomial(1, 1), 0.0, 1e-12);
    EXPECT_NEAR(log2_binomial(4, 2), std::log2(6.0), 1e-12);
    EXPECT_NEAR(log2_binomial(10, 0), 0.0, 1e-12);
    EXPECT_NEAR(log2_binomial(52, 5), std::log2(2598960.0), 1e-9);
}

TEST(Log2Binomial, LargeArgument) { EXPECT_LT(rel(log2_binomial(4e6, 2000), 24.81e3), 0.005); }

TEST(Log2Binomial, DomainErrors) {
    EXPECT_THROW((void)log2_binomial(2, 3), DomainError);
    EXPECT_THROW((void)log2_binomial(2, -1), DomainError);
}

TEST(InfoRaw, PublishedValueAndEdges) {
    EXPECT_LT(rel(info_raw(2000, 1e-3), 24.81e3), 0.005);
    EXPECT_NEAR(info_raw(1, 2.0), 0.0, 1e-12);
    EXPECT_THROW((void)info_raw(2, 2.0), DomainError);
    EXPECT_THROW((void)info_raw(2, 0.0), DomainError);
}

TEST(InfoBinary, PublishedValueAndEdges) {
    EXPECT_LT(rel(info_binary(2000, 128), 8.72e3), 0.005);
    EXPECT_NEAR(info_binary(1, 2), 0.0, 1e-12);
    const double ret = info_binary(1000, 128) / info_raw(1000, 1e-3);
    EXPECT_NEAR(ret, 0.40, 0.01);
}

TEST(InfoBinary, MatchesExactIntegerSum) {
    for (std::size_t r : {3u, 4u, 5u, 6u}) {
        const std::uint64_t cells = (r - 1) * (r - 1);
        for (std::size_t n : {1u, 2u, 7u, 30u}) {
            const std::uint64_t qmax = std::min<std::uint64_t>(n, cells);
            EXPECT_NEAR(info_binary(n, r), exact_binary_bits(cells, qmax), 1e-9) << "r=" << r << " N=" << n;
        }
    }
}

TEST(InfoBinary, StableForMillionTerms) {
    const double b = info_binary(2000000, 1001);
    EXPECT_TRUE(std::isfinite(b));
    // q runs over all 1e6 cells: the sum is 2^(1e6) - 1.
    EXPECT_NEAR(b, 1e6, 1e-6 * 1e6);
}

TEST(InfoCount, PublishedValueAndEdges) {
    EXPECT_LT(rel(info_count(2000, 128), 9.07e3), 0.005);
    EXPECT_NEAR(info_count(1, 2), 0.0, 1e-12);
    const double ret = info_count(1000, 128) / info_raw(1000, 1e-3);
    EXPECT_NEAR(ret, 0.41, 0.01);
    // Stars and bars, small case: 3 points in 4 cells -> C(6,3) = 20.
    EXPECT_NEAR(info_count(3, 3), std::log2(20.0), 1e-12);
}

TEST(InfoProposed, PublishedValueAndEdges) {
    EXPECT_LT(rel(info_proposed(2000, 128, 1e-3, 0.01), 21.21e3), 0.005);
    EXPECT_NEAR(info_proposed(2000, 128, 1e-3, 0.0), info_raw(2000, 1e-3), 1e-9);
    const double ret = info_proposed(1000, 128, 1e-3, 0.01) / info_raw(1000, 1e-3);
    EXPECT_NEAR(ret, 0.87, 0.01);
    EXPECT_THROW((void)info_proposed(2000, 3, 1e-3, 1.0), DomainError);
    EXPECT_THROW((void)info_proposed(20, 3, 1e-3, -1.0), DomainError);
}

TEST(InfoContent, OrderingAndRetentionAtReferenceParameters) {
    const auto r = compare_encodings(2000, 128, 1e-3, 0.01);
    EXPECT_LT(r.binary_bits, r.count_bits);
    EXPECT_LT(r.count_bits, r.proposed_bits);
    EXPECT_LT(r.proposed_bits, r.raw_bits);
    EXPECT_NEAR(r.retention_proposed, 0.85, 0.01);
    EXPECT_NEAR(r.retention_binary, 0.35, 0.01);
    EXPECT_DOUBLE_EQ(r.h, 2.0 / 127.0);
    for (double ret : {r.retention_binary, r.retention_count, r.retention_proposed}) {
        EXPECT_GE(ret, 0.0);
        EXPECT_LE(ret, 1.0 + 1e-12);
    }
}

TEST(InfoContent, MonotoneInResolution) {
    for (std::size_t n : {10u, 500u, 2000u}) {
        double pb = -1.0, pc = -1.0, pg = -1.0;
        for (std::size_t r = 8; r <= 512; r *= 2) {
            const double b = info_binary(n, r), c = info_count(n, r), g = info_proposed(n, r, 1e-3, 0.01);
            EXPECT_GE(b, pb);
            EXPECT_GE(c, pc);
            EXPECT_GE(g, pg);
            EXPECT_LE(g, info_raw(n, 1e-3) + 1e-9);
            pb = b;
            pc = c;
            pg = g;
        }
    }
}

TEST(GridSpacing, Values) {
    EXPECT_EQ(grid_spacing(3), 1.0);
    EXPECT_EQ(grid_spacing(128), 2.0 / 127.0);
    EXPECT_EQ(grid_spacing(257), 1.0 / 128.0);
    EXPECT_THROW((void)grid_spacing(1), DomainError);
}
