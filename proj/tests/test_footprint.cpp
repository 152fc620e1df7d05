#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ptgrid/footprint.hpp"

using namespace ptgrid;

TEST(GridIndex, Boundaries) {
    EXPECT_EQ(to_grid_index(-1.0, 128), 0.0);
    EXPECT_EQ(to_grid_index(1.0, 128), 127.0);
    EXPECT_EQ(to_grid_index(0.0, 4), 1.5);
}

TEST(GridIndex, RejectsOutOfDomain) {
    EXPECT_THROW(to_grid_index(1.0000001, 8), DomainError);
    EXPECT_THROW(to_grid_index(-2.0, 8), DomainError);
    EXPECT_THROW(to_grid_index(std::numeric_limits<double>::quiet_NaN(), 8), DomainError);
    EXPECT_THROW(to_grid_index(0.0, 1), ValidationError);
}

// Coordinate whose continuous index along an r-vertex axis is t.
static double coord_at(double t, std::size_t r) { return 2.0 * t / static_cast<double>(r - 1) - 1.0; }

TEST(Footprint, CellCenter2D) {
    const std::size_t r = 5;
    const std::vector<double> p{coord_at(1.5, r), coord_at(1.5, r)};
    const auto fp = footprint_of(p, r);
    EXPECT_EQ(fp.base[0], 1);
    EXPECT_EQ(fp.base[1], 1);
    for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(fp.weights[k], 0.25);
}

TEST(Footprint, OnVertex2D) {
    const std::size_t r = 6;
    const std::vector<double> p{coord_at(2.0, r), coord_at(3.0, r)};
    const auto fp = footprint_of(p, r);
    EXPECT_EQ(fp.base[0], 2);
    EXPECT_EQ(fp.base[1], 3);
    EXPECT_DOUBLE_EQ(fp.weights[0], 1.0);
    for (int k = 1; k < 4; ++k) EXPECT_DOUBLE_EQ(fp.weights[k], 0.0);
    EXPECT_EQ(corner_index(fp, 0, 2, r), 2 * r + 3);
}

TEST(Footprint, CellCenter3D) {
    const std::size_t r = 4;
    const std::vector<double> p{coord_at(0.5, r), coord_at(1.5, r), coord_at(2.5, r)};
    const auto fp = footprint_of(p, r);
    for (int k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(fp.weights[k], 0.125);
}

TEST(Footprint, UpperBoundaryClampsIntoLastCell) {
    const std::size_t r = 8;
    const std::vector<double> p{1.0, -1.0};
    const auto fp = footprint_of(p, r);
    EXPECT_EQ(fp.base[0], static_cast<int>(r) - 2);
    EXPECT_EQ(fp.offset[0], 1.0);
    EXPECT_EQ(fp.base[1], 0);
    // Bit 0 set = high vertex on axis 0; axis 1 low.
    EXPECT_EQ(fp.weights[1], 1.0);
    EXPECT_EQ(corner_index(fp, 1, 2, r), (r - 1) * r);
}

TEST(Footprint, WeightsAreProductsOfAxisFactors) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> p{uni(rng), uni(rng), uni(rng)};
        const auto fp = footprint_of(p, 9);
        for (int k = 0; k < 8; ++k) {
            double w = 1.0;
            for (int a = 0; a < 3; ++a) w *= ((k >> a) & 1) ? fp.offset[a] : 1.0 - fp.offset[a];
            EXPECT_EQ(fp.weights[k], w);
            EXPECT_GE(fp.weights[k], 0.0);
        }
        for (int a = 0; a < 3; ++a) {
            EXPECT_GE(fp.offset[a], 0.0);
            EXPECT_LE(fp.offset[a], 1.0);
            EXPECT_GE(fp.base[a], 0);
            EXPECT_LE(fp.base[a], 7);
        }
    }
}

TEST(Footprint, PartitionOfUnityWithinFourUlp) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double tol = 4.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t r : {2u, 3u, 17u, 128u, 1025u}) {
        for (int dim : {2, 3}) {
            for (int trial = 0; trial < 2000; ++trial) {
                std::vector<double> p(static_cast<std::size_t>(dim));
                for (double& v : p) v = uni(rng);
                const auto fp = footprint_of(p, r);
                double s = 0.0;
                for (int k = 0; k < (1 << dim); ++k) s += fp.weights[k];
                ASSERT_NEAR(s, 1.0, tol) << "r=" << r << " dim=" << dim;
            }
        }
    }
}

TEST(Footprint, TableCoversEveryPoint) {
    PointCloudBatch c;
    c.dim = 2;
    c.samples = {{{0.0, 0.0, 0.5, -0.5, 1.0, 1.0}, {}}, {{-1.0, -1.0}, {}}};
    const auto t = footprint(c, 5);
    ASSERT_EQ(t.samples.size(), 2u);
    EXPECT_EQ(t.samples[0].size(), 3u);
    EXPECT_EQ(t.samples[1].size(), 1u);
    EXPECT_EQ(t.samples[1][0].weights[0], 1.0);
}

TEST(Footprint, RejectsBadCloud) {
    PointCloudBatch c;
    c.dim = 2;
    c.samples = {{{0.0, 1.5}, {}}};
    try {
        (void)footprint(c, 5);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("sample 0"), std::string::npos);
        EXPECT_NE(msg.find("point 0"), std::string::npos);
        EXPECT_NE(msg.find("axis 1"), std::string::npos);
    }
    c.dim = 4;
    EXPECT_THROW((void)footprint(c, 5), ValidationError);
}
