#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ptgrid/io/container.hpp"

using namespace ptgrid;
using namespace ptgrid::io;

namespace {

GridFieldBatch random_grid(std::uint64_t seed, int dim = 2, std::size_t r = 5, std::size_t c = 2, std::size_t m = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 10.0);
    auto g = GridFieldBatch::zeros(dim, r, c, m, GridKind::response);
    for (double& v : g.values) v = nd(rng);
    return g;
}

PointCloudBatch sample_cloud() {
    PointCloudBatch c;
    c.dim = 3;
    c.channels = 2;
    c.samples = {{{0.1, -0.2, 0.3, 1.0, -1.0, 0.0}, {1.5, -2.0, 3.25, 4.0}}, {{0.5, 0.5, 0.5}, {0.0, 1e-300}}};
    c.shift.mode = ShiftMode::minmax;
    c.shift.scope = ShiftScope::per_sample;
    c.shift.channels = 2;
    c.shift.params = {{-2.0, 4.0}, {0.0, 3.0}, {1.0, 2.0}, {0.0, 0.0}};
    c.rescale = {{0.0, 8.0}, {-3.0, 3.0}, {1.0, 2.0}};
    return c;
}

FormatErrc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const FormatError& e) {
        return e.code();
    }
    ADD_FAILURE() << "no FormatError thrown";
    return FormatErrc::io;
}

template <typename T>
void poke(std::vector<std::uint8_t>& b, std::size_t at, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) b[at + i] = static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
}

} // namespace

TEST(Crc32, CheckValue) {
    const std::string s = "123456789";
    EXPECT_EQ(crc32(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())), 0xCBF43926u);
}

TEST(GridContainer, RoundTripIsBitIdentical) {
    for (int dim : {2, 3}) {
        const auto g = random_grid(1, dim);
        const auto bytes = grid_to_bytes(g);
        const auto back = grid_from_bytes(bytes);
        EXPECT_TRUE(back.same_shape(g));
        EXPECT_EQ(back.scalar, ScalarType::f64);
        ASSERT_EQ(back.values.size(), g.values.size());
        EXPECT_EQ(std::memcmp(back.values.data(), g.values.data(), g.values.size() * sizeof(double)), 0);
        EXPECT_EQ(grid_to_bytes(back), bytes);
    }
}

TEST(GridContainer, ExactLayout) {
    const auto g = random_grid(2, 3, 4, 2, 1);
    const auto b = grid_to_bytes(g);
    const std::size_t header = 4 + 2 + 1 + 1 + 4 * 3 + 4 + 2;
    ASSERT_EQ(b.size(), header + 2 * 64 * 8 + 4);
    EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "GRD1");
    EXPECT_EQ(b[4], 1);  // version, little-endian
    EXPECT_EQ(b[5], 0);
    EXPECT_EQ(b[6], 2);  // f64
    EXPECT_EQ(b[7], 3);  // dim
    for (int a = 0; a < 3; ++a) EXPECT_EQ(b[8 + 4 * a], 4);
    EXPECT_EQ(b[20], 1);  // samples
    EXPECT_EQ(b[24], 2);  // channels
    double first = 0.0;
    std::uint64_t raw = 0;
    for (int i = 0; i < 8; ++i) raw |= static_cast<std::uint64_t>(b[header + i]) << (8 * i);
    std::memcpy(&first, &raw, 8);
    EXPECT_EQ(first, g.values[0]);
    std::uint32_t crc = 0;
    for (int i = 0; i < 4; ++i) crc |= static_cast<std::uint32_t>(b[b.size() - 4 + i]) << (8 * i);
    EXPECT_EQ(crc, crc32(std::span(b).subspan(header, b.size() - header - 4)));
}

TEST(GridContainer, NarrowingPolicy) {
    const auto g = random_grid(3);
    EXPECT_EQ(code_of([&] { (void)grid_to_bytes(g, ScalarType::f32); }), FormatErrc::narrowing);
    const auto bytes = grid_to_bytes(g, ScalarType::f32, true);
    const auto back = grid_from_bytes(bytes);
    EXPECT_EQ(back.scalar, ScalarType::f32);
    for (std::size_t i = 0; i < g.values.size(); ++i) EXPECT_EQ(back.values[i], static_cast<double>(static_cast<float>(g.values[i])));
    // An f32 grid round-trips as f32 without further permission, and widening is always allowed.
    EXPECT_EQ(grid_to_bytes(back), bytes);
    EXPECT_NO_THROW((void)grid_to_bytes(back, ScalarType::f64));
}

TEST(GridContainer, DistinctErrorCodes) {
    const auto good = grid_to_bytes(random_grid(4));

    auto magic = good;
    magic[0] = 'X';
    EXPECT_EQ(code_of([&] { (void)grid_from_bytes(magic); }), FormatErrc::bad_magic);

    auto crc = good;
    crc.back() ^= 0x01;
    EXPECT_EQ(code_of([&] { (void)grid_from_bytes(crc); }), FormatErrc::checksum_mismatch);

    auto payload = good;
    payload[40] ^= 0x10;
    EXPECT_EQ(code_of([&] { (void)grid_from_bytes(payload); }), FormatErrc::checksum_mismatch);

    for (std::size_t cut : {std::size_t{2}, std::size_t{10}, good.size() - 1, good.size() - 50}) {
        const std::vector<std::uint8_t> trunc(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
        EXPECT_EQ(code_of([&] { (void)grid_from_bytes(trunc); }), FormatErrc::truncated) << cut;
    }

    auto trailing = good;
    trailing.push_back(0);
    EXPECT_EQ(code_of([&] { (void)grid_from_bytes(trailing); }), FormatErrc::size_mismatch);

    auto version = good;
    poke<std::uint16_t>(version, 4, 9);
    EXPECT_EQ(code_of([&] { (void)grid_from_bytes(version); }), FormatErrc::unsupported);

    auto scalar = good;
    scalar[6] = 7;
    EXPECT_EQ(code_of([&] { (void)grid_from_bytes(scalar); }), FormatErrc::unsupported);

    auto uneven = good;
    poke<std::uint32_t>(uneven, 12, 6);
    EXPECT_EQ(code_of([&] { (void)grid_from_bytes(uneven); }), FormatErrc::unsupported);
}

TEST(GridContainer, FileRoundTripAndKind) {
    const auto dir = std::filesystem::temp_directory_path() / "ptgrid_container_test";
    std::filesystem::create_directories(dir);
    const auto g = random_grid(5);
    write_grid(dir / "g.grd", g);
    const auto back = read_grid(dir / "g.grd", GridKind::topology);
    EXPECT_EQ(back.kind, GridKind::topology);
    EXPECT_EQ(back.values, g.values);
    EXPECT_EQ(code_of([&] { (void)read_grid(dir / "missing.grd"); }), FormatErrc::io);
    std::filesystem::remove_all(dir);
}

TEST(CloudContainer, RoundTripWithMetadata) {
    const auto c = sample_cloud();
    const auto bytes = cloud_to_bytes(c);
    const auto back = cloud_from_bytes(bytes);
    EXPECT_EQ(back.dim, 3);
    EXPECT_EQ(back.channels, 2u);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.samples[0].coords, c.samples[0].coords);
    EXPECT_EQ(back.samples[1].channels, c.samples[1].channels);
    EXPECT_EQ(back.shift.mode, ShiftMode::minmax);
    EXPECT_EQ(back.shift.scope, ShiftScope::per_sample);
    ASSERT_EQ(back.shift.params.size(), 4u);
    EXPECT_EQ(back.shift.params[1].b, 3.0);
    ASSERT_EQ(back.rescale.size(), 3u);
    EXPECT_EQ(back.rescale[0].hi, 8.0);
    EXPECT_FALSE(back.raw_range);
    EXPECT_EQ(cloud_to_bytes(back), bytes);
}

TEST(CloudContainer, RawRangeFlag) {
    PointCloudBatch c;
    c.dim = 2;
    c.raw_range = true;
    c.samples = {{{0.0, 8.0, 3.0, 5.0}, {}}};
    const auto back = cloud_from_bytes(cloud_to_bytes(c));
    EXPECT_TRUE(back.raw_range);
    EXPECT_EQ(back.samples[0].coords[1], 8.0);
    c.raw_range = false;
    EXPECT_THROW((void)cloud_to_bytes(c), DomainError);
}

TEST(CloudContainer, OutOfRangeWithoutFlagIsRejectedOnRead) {
    PointCloudBatch c;
    c.dim = 2;
    c.samples = {{{0.0, 0.5}, {}}};
    auto bytes = cloud_to_bytes(c);
    // Overwrite the second coordinate with 2.0 and fix the CRC.
    const std::size_t payload = bytes.size() - 4 - 16;
    const std::uint64_t two = std::bit_cast<std::uint64_t>(2.0);
    poke<std::uint64_t>(bytes, payload + 8, two);
    poke<std::uint32_t>(bytes, bytes.size() - 4, crc32(std::span(bytes).subspan(payload, 16)));
    EXPECT_THROW((void)cloud_from_bytes(bytes), DomainError);
}

TEST(CloudContainer, ErrorsAndNarrowing) {
    const auto c = sample_cloud();
    EXPECT_EQ(code_of([&] { (void)cloud_to_bytes(c, ScalarType::f32); }), FormatErrc::narrowing);
    const auto f32 = cloud_from_bytes(cloud_to_bytes(c, ScalarType::f32, true));
    EXPECT_EQ(f32.samples[0].coords[0], static_cast<double>(0.1f));

    const auto good = cloud_to_bytes(c);
    auto magic = good;
    magic[3] = '2';
    EXPECT_EQ(code_of([&] { (void)cloud_from_bytes(magic); }), FormatErrc::bad_magic);
    auto crc = good;
    crc[crc.size() - 2] ^= 0xFF;
    EXPECT_EQ(code_of([&] { (void)cloud_from_bytes(crc); }), FormatErrc::checksum_mismatch);
    const std::vector<std::uint8_t> trunc(good.begin(), good.end() - 9);
    EXPECT_EQ(code_of([&] { (void)cloud_from_bytes(trunc); }), FormatErrc::truncated);
    // A huge sample count must fail as truncation, not allocate.
    auto huge = good;
    poke<std::uint32_t>(huge, 9, 0xFFFFFFFFu);
    EXPECT_EQ(code_of([&] { (void)cloud_from_bytes(huge); }), FormatErrc::truncated);
}
