#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "elastoblow/core_types.hpp"

namespace elastoblow::io {

/// Binary checkpoint layout (all integers and floats little-endian):
///
///   offset  size  field
///   0       8     magic "ELBLCKPT"
///   8       4     uint32 format version
///   12      4     uint32 header length (128)
///   16      48    float64 A, gamma, mu, lambda, rho_bar, R
///   64      12    int32 n1, n2, n3
///   76      4     reserved (zero)
///   80      8     float64 half_width
///   88      8     float64 time
///   96      32    reserved (zero)
///   128     ...   13 float64 fields (rho, m1..m3, Q11..Q33 row-major), each x-fastest
namespace checkpoint {

inline constexpr std::array<char, 8> kMagic = {'E', 'L', 'B', 'L', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 128;

struct Header {
    std::uint32_t version = kVersion;
    PhysParams params;
    Grid grid;
    double time = 0.0;
};

inline auto payload_size(const Grid& g) -> std::size_t { return 13 * g.size() * 8; }

namespace detail {

inline void put_u32(std::vector<unsigned char>& buf, std::size_t off, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf[off + b] = static_cast<unsigned char>(v >> (8 * b));
}

inline void put_f64(std::vector<unsigned char>& buf, std::size_t off, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) buf[off + b] = static_cast<unsigned char>(bits >> (8 * b));
}

inline auto get_u32(const unsigned char* p) -> std::uint32_t {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
    return v;
}

inline auto get_f64(const unsigned char* p) -> double {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(v);
}

} // namespace detail

inline auto encode(const ConservedState& c, const PhysParams& p, const Grid& g) -> std::vector<unsigned char> {
    if (c.size() != g.size()) throw Error(ErrorCode::IoFailure, "state size does not match the grid");
    std::vector<unsigned char> buf(kHeaderSize + payload_size(g), 0);
    std::memcpy(buf.data(), kMagic.data(), kMagic.size());
    detail::put_u32(buf, 8, kVersion);
    detail::put_u32(buf, 12, static_cast<std::uint32_t>(kHeaderSize));
    const double params[6] = {p.A, p.gamma, p.mu, p.lambda, p.rho_bar, p.R};
    for (int i = 0; i < 6; ++i) detail::put_f64(buf, 16 + 8 * i, params[i]);
    for (int d = 0; d < 3; ++d) detail::put_u32(buf, 64 + 4 * d, static_cast<std::uint32_t>(g.n(d)));
    detail::put_f64(buf, 80, g.half_width());
    detail::put_f64(buf, 88, c.t);
    std::size_t off = kHeaderSize;
    for (const auto& field : c.comp) {
        for (double v : field) {
            detail::put_f64(buf, off, v);
            off += 8;
        }
    }
    return buf;
}

inline auto decode(const std::vector<unsigned char>& buf, Header& header) -> ConservedState {
    if (buf.size() < kMagic.size()) throw Error(ErrorCode::TruncatedFile, "checkpoint shorter than its magic bytes");
    if (std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
        throw Error(ErrorCode::BadMagic, "not an elastoblow checkpoint");
    }
    if (buf.size() < kHeaderSize) throw Error(ErrorCode::TruncatedFile, "checkpoint header is truncated");
    header.version = detail::get_u32(buf.data() + 8);
    if (header.version != kVersion) {
        throw Error(ErrorCode::VersionMismatch, "checkpoint version " + std::to_string(header.version) +
                                                    ", expected " + std::to_string(kVersion));
    }
    if (detail::get_u32(buf.data() + 12) != kHeaderSize) {
        throw Error(ErrorCode::VersionMismatch, "unexpected checkpoint header length");
    }
    double params[6];
    for (int i = 0; i < 6; ++i) params[i] = detail::get_f64(buf.data() + 16 + 8 * i);
    header.params = PhysParams{params[0], params[1], params[2], params[3], params[4], params[5]};
    std::array<int, 3> n{};
    for (int d = 0; d < 3; ++d) n[d] = static_cast<int>(detail::get_u32(buf.data() + 64 + 4 * d));
    header.grid = Grid(n, detail::get_f64(buf.data() + 80));
    header.time = detail::get_f64(buf.data() + 88);
    const std::size_t expected = kHeaderSize + payload_size(header.grid);
    if (buf.size() < expected) throw Error(ErrorCode::TruncatedFile, "checkpoint payload is truncated");
    if (buf.size() > expected) throw Error(ErrorCode::IoFailure, "checkpoint has trailing bytes");
    ConservedState c(header.grid.size());
    c.t = header.time;
    std::size_t off = kHeaderSize;
    for (auto& field : c.comp) {
        for (double& v : field) {
            v = detail::get_f64(buf.data() + off);
            off += 8;
        }
    }
    return c;
}

} // namespace checkpoint

inline void write_checkpoint(const ConservedState& c, const PhysParams& p, const Grid& g,
                             const std::filesystem::path& path) {
    const auto buf = checkpoint::encode(c, p, g);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

inline auto read_checkpoint(const std::filesystem::path& path, checkpoint::Header& header) -> ConservedState {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return checkpoint::decode(buf, header);
}

} // namespace elastoblow::io
