#pragma once

// GRD1 grid and PTC1 point-cloud containers.
//
// Both are little-endian, fixed layout, followed by a CRC32 of the payload.
//
// GRD1:  "GRD1" | u16 version | u8 scalar | u8 dim | u32 resolution[dim]
//        | u32 samples | u16 channels | payload | u32 crc
//        payload = samples*channels*prod(resolution) scalars, row-major
//        (sample, channel, axis0, ..., axis_{dim-1})
//
// PTC1:  "PTC1" | u16 version | u8 scalar | u8 dim | u8 flags
//        | u32 samples | u32 counts[samples] | u16 channels
//        | shift record: u8 mode | u8 scope | u32 n | f64 (a, b)[n]
//        | rescale record: u8 axes | f64 (lo, hi)[axes]
//        | payload | u32 crc
//        payload = every sample's coords (N_m x dim), then every sample's
//        channels (N_m x channels), in sample order.
//        flags bit 0: raw range (coordinates not yet mapped into [-1,1]).

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <zlib.h>

#include "ptgrid/types.hpp"

namespace ptgrid::io {

inline constexpr std::uint16_t kGridVersion = 1;
inline constexpr std::uint16_t kCloudVersion = 1;
inline constexpr std::uint8_t kFlagRawRange = 0x01;

inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large buffers in chunks.
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const std::size_t chunk = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
        crc = ::crc32(crc, bytes.data() + pos, static_cast<uInt>(chunk));
        pos += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

namespace detail {

class ByteWriter {
public:
    template <typename T>
    void put(T v) {
        static_assert(std::is_integral_v<T>);
        using U = std::make_unsigned_t<T>;
        auto u = static_cast<U>(v);
        for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xFF));
    }
    void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void put_f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
    void put_scalar(double v, ScalarType t) {
        if (t == ScalarType::f64) put_f64(v);
        else put_f32(static_cast<float>(v));
    }
    void put_raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

    [[nodiscard]] std::size_t size() const { return bytes_.size(); }
    [[nodiscard]] std::span<const std::uint8_t> from(std::size_t offset) const {
        return std::span<const std::uint8_t>(bytes_).subspan(offset);
    }
    [[nodiscard]] const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        using U = std::make_unsigned_t<T>;
        U u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }
    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    double get_scalar(ScalarType t) {
        return t == ScalarType::f64 ? get_f64() : static_cast<double>(std::bit_cast<float>(get<std::uint32_t>()));
    }
    std::string get_raw(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw FormatError(FormatErrc::truncated, what_ + ": needs " + std::to_string(n) + " more bytes at offset " +
                                                         std::to_string(pos_) + ", file has " + std::to_string(bytes_.size()));
        }
    }
    [[nodiscard]] std::size_t pos() const { return pos_; }
    [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }
    [[nodiscard]] std::span<const std::uint8_t> span(std::size_t offset, std::size_t n) const {
        return bytes_.subspan(offset, n);
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::string what_;
};

inline std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatErrc::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatErrc::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError(FormatErrc::io, "write failed for " + path.string());
}

inline ScalarType parse_scalar(std::uint8_t tag, const std::string& what) {
    if (tag == static_cast<std::uint8_t>(ScalarType::f32)) return ScalarType::f32;
    if (tag == static_cast<std::uint8_t>(ScalarType::f64)) return ScalarType::f64;
    throw FormatError(FormatErrc::unsupported, what + ": unknown scalar tag " + std::to_string(tag));
}

inline void check_narrowing(ScalarType native, ScalarType target, bool allow_narrowing, const std::string& what) {
    if (native == ScalarType::f64 && target == ScalarType::f32 && !allow_narrowing) {
        throw FormatError(FormatErrc::narrowing, what + ": f64 data written as f32 requires explicit narrowing");
    }
}

inline void finish_payload(ByteReader& rd, std::size_t payload_start, const std::string& what) {
    const std::size_t payload_len = rd.pos() - payload_start;
    const auto expected = rd.get<std::uint32_t>();
    if (rd.remaining() != 0) {
        throw FormatError(FormatErrc::size_mismatch, what + ": " + std::to_string(rd.remaining()) + " trailing bytes");
    }
    const auto actual = crc32(rd.span(payload_start, payload_len));
    if (actual != expected) throw FormatError(FormatErrc::checksum_mismatch, what + ": payload CRC32 does not match");
}

} // namespace detail

/// Serializes a grid. `as` defaults to the grid's own scalar type; writing an
/// f64 grid as f32 throws unless `allow_narrowing` is set.
inline std::vector<std::uint8_t> grid_to_bytes(const GridFieldBatch& g, std::optional<ScalarType> as = std::nullopt,
                                               bool allow_narrowing = false) {
    g.check_consistent();
    const ScalarType target = as.value_or(g.scalar);
    detail::check_narrowing(g.scalar, target, allow_narrowing, "GRD1");
    detail::ByteWriter w;
    w.put_raw("GRD1");
    w.put<std::uint16_t>(kGridVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(target));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(g.dim));
    for (int a = 0; a < g.dim; ++a) w.put<std::uint32_t>(static_cast<std::uint32_t>(g.resolution));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g.samples));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(g.channels));
    const std::size_t start = w.size();
    for (double v : g.values) w.put_scalar(v, target);
    const auto crc = crc32(w.from(start));
    w.put<std::uint32_t>(crc);
    return w.bytes();
}

/// Parses a GRD1 byte stream. The container does not record what the grid
/// means, so the caller supplies `kind`.
inline GridFieldBatch grid_from_bytes(std::span<const std::uint8_t> bytes, GridKind kind = GridKind::response) {
    const std::string what = "GRD1";
    detail::ByteReader rd(bytes, what);
    if (rd.get_raw(4) != "GRD1") throw FormatError(FormatErrc::bad_magic, "not a GRD1 grid container");
    const auto version = rd.get<std::uint16_t>();
    if (version != kGridVersion) throw FormatError(FormatErrc::unsupported, "GRD1 version " + std::to_string(version));
    GridFieldBatch g;
    g.kind = kind;
    g.scalar = detail::parse_scalar(rd.get<std::uint8_t>(), what);
    g.dim = rd.get<std::uint8_t>();
    if (g.dim != 2 && g.dim != 3) throw FormatError(FormatErrc::unsupported, "GRD1 dimension " + std::to_string(g.dim));
    std::array<std::uint32_t, kMaxDim> res{};
    for (int a = 0; a < g.dim; ++a) res[a] = rd.get<std::uint32_t>();
    for (int a = 1; a < g.dim; ++a) {
        if (res[a] != res[0]) throw FormatError(FormatErrc::unsupported, "GRD1 non-uniform per-axis resolution");
    }
    if (res[0] < 2) throw FormatError(FormatErrc::unsupported, "GRD1 resolution below 2");
    g.resolution = res[0];
    g.samples = rd.get<std::uint32_t>();
    g.channels = rd.get<std::uint16_t>();
    const std::size_t count = g.samples * g.channels * g.vertices();
    const std::size_t start = rd.pos();
    rd.need(count * scalar_size(g.scalar) + 4);
    g.values.resize(count);
    for (double& v : g.values) v = rd.get_scalar(g.scalar);
    detail::finish_payload(rd, start, what);
    return g;
}

inline void write_grid(const std::filesystem::path& path, const GridFieldBatch& g,
                       std::optional<ScalarType> as = std::nullopt, bool allow_narrowing = false) {
    detail::spit(path, grid_to_bytes(g, as, allow_narrowing));
}

inline GridFieldBatch read_grid(const std::filesystem::path& path, GridKind kind = GridKind::response) {
    const auto bytes = detail::slurp(path);
    return grid_from_bytes(bytes, kind);
}

/// Serializes a cloud. Clouds are always f64 in memory; writing f32 needs
/// `allow_narrowing`.
inline std::vector<std::uint8_t> cloud_to_bytes(const PointCloudBatch& cloud, ScalarType as = ScalarType::f64,
                                                bool allow_narrowing = false) {
    validate(cloud, !cloud.raw_range);
    detail::check_narrowing(ScalarType::f64, as, allow_narrowing, "PTC1");
    detail::ByteWriter w;
    w.put_raw("PTC1");
    w.put<std::uint16_t>(kCloudVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(as));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(cloud.dim));
    w.put<std::uint8_t>(cloud.raw_range ? kFlagRawRange : 0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cloud.size()));
    for (std::size_t m = 0; m < cloud.size(); ++m) w.put<std::uint32_t>(static_cast<std::uint32_t>(cloud.points(m)));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(cloud.channels));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(cloud.shift.mode));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(cloud.shift.scope));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cloud.shift.params.size()));
    for (const auto& p : cloud.shift.params) {
        w.put_f64(p.a);
        w.put_f64(p.b);
    }
    w.put<std::uint8_t>(static_cast<std::uint8_t>(cloud.rescale.size()));
    for (const auto& ax : cloud.rescale) {
        w.put_f64(ax.lo);
        w.put_f64(ax.hi);
    }
    const std::size_t start = w.size();
    for (const auto& s : cloud.samples) for (double v : s.coords) w.put_scalar(v, as);
    for (const auto& s : cloud.samples) for (double v : s.channels) w.put_scalar(v, as);
    const auto crc = crc32(w.from(start));
    w.put<std::uint32_t>(crc);
    return w.bytes();
}

inline PointCloudBatch cloud_from_bytes(std::span<const std::uint8_t> bytes) {
    const std::string what = "PTC1";
    detail::ByteReader rd(bytes, what);
    if (rd.get_raw(4) != "PTC1") throw FormatError(FormatErrc::bad_magic, "not a PTC1 point-cloud container");
    const auto version = rd.get<std::uint16_t>();
    if (version != kCloudVersion) throw FormatError(FormatErrc::unsupported, "PTC1 version " + std::to_string(version));
    const ScalarType scalar = detail::parse_scalar(rd.get<std::uint8_t>(), what);
    PointCloudBatch cloud;
    cloud.dim = rd.get<std::uint8_t>();
    if (cloud.dim != 2 && cloud.dim != 3) {
        throw FormatError(FormatErrc::unsupported, "PTC1 dimension " + std::to_string(cloud.dim));
    }
    const auto flags = rd.get<std::uint8_t>();
    cloud.raw_range = (flags & kFlagRawRange) != 0;
    const auto samples = rd.get<std::uint32_t>();
    rd.need(static_cast<std::size_t>(samples) * 4);
    std::vector<std::size_t> counts(samples);
    for (auto& n : counts) n = rd.get<std::uint32_t>();
    cloud.channels = rd.get<std::uint16_t>();

    const auto mode = rd.get<std::uint8_t>();
    const auto scope = rd.get<std::uint8_t>();
    if (mode > static_cast<std::uint8_t>(ShiftMode::minmax) || scope > static_cast<std::uint8_t>(ShiftScope::per_sample)) {
        throw FormatError(FormatErrc::unsupported, "PTC1 unknown shift mode/scope");
    }
    cloud.shift.mode = static_cast<ShiftMode>(mode);
    cloud.shift.scope = static_cast<ShiftScope>(scope);
    cloud.shift.channels = cloud.channels;
    const auto n_params = rd.get<std::uint32_t>();
    rd.need(static_cast<std::size_t>(n_params) * 16);
    cloud.shift.params.resize(n_params);
    for (auto& p : cloud.shift.params) {
        p.a = rd.get_f64();
        p.b = rd.get_f64();
    }
    const auto axes = rd.get<std::uint8_t>();
    cloud.rescale.resize(axes);
    for (auto& ax : cloud.rescale) {
        ax.lo = rd.get_f64();
        ax.hi = rd.get_f64();
    }

    const auto d = static_cast<std::size_t>(cloud.dim);
    std::size_t total = 0;
    for (std::size_t n : counts) total += n;
    const std::size_t start = rd.pos();
    rd.need(total * (d + cloud.channels) * scalar_size(scalar) + 4);
    cloud.samples.resize(samples);
    for (std::size_t m = 0; m < samples; ++m) {
        cloud.samples[m].coords.resize(counts[m] * d);
        for (double& v : cloud.samples[m].coords) v = rd.get_scalar(scalar);
    }
    for (std::size_t m = 0; m < samples; ++m) {
        cloud.samples[m].channels.resize(counts[m] * cloud.channels);
        for (double& v : cloud.samples[m].channels) v = rd.get_scalar(scalar);
    }
    detail::finish_payload(rd, start, what);
    validate(cloud, !cloud.raw_range);
    return cloud;
}

inline void write_cloud(const std::filesystem::path& path, const PointCloudBatch& cloud,
                        ScalarType as = ScalarType::f64, bool allow_narrowing = false) {
    detail::spit(path, cloud_to_bytes(cloud, as, allow_narrowing));
}

inline PointCloudBatch read_cloud(const std::filesystem::path& path) {
    const auto bytes = detail::slurp(path);
    return cloud_from_bytes(bytes);
}

} // namespace ptgrid::io
