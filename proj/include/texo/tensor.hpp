#pragma once

// Minimal bit-exact tensor container for embedding matrices:
//   magic "TEXO" | u32le version=1 | u8 dtype=1 (f32le) | u8 ndim=2 |
//   u64le rows | u64le dim | row-major f32le payload
// The header is exactly 26 bytes.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace texo {

inline constexpr std::size_t kTensorHeaderSize = 26;
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint8_t kTensorDtypeF32 = 1;

struct EmbeddingMatrix {
    std::uint64_t rows = 0;
    std::uint64_t dim = 0;
    std::vector<float> data;  // rows * dim, row-major

    const float* row(std::uint64_t i) const { return data.data() + i * dim; }
    float* row(std::uint64_t i) { return data.data() + i * dim; }
};

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFFu);
}

inline void put_u64le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFFu);
}

inline std::uint32_t get_u32le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline std::uint64_t get_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace detail

inline void write_tensor(const std::string& path, const EmbeddingMatrix& m) {
    if (m.data.size() != m.rows * m.dim) {
        throw std::runtime_error("matrix data length " + std::to_string(m.data.size()) +
                                 " does not match " + std::to_string(m.rows) + "x" +
                                 std::to_string(m.dim));
    }
    for (float v : m.data) {
        if (!std::isfinite(v)) throw std::runtime_error("matrix contains a non-finite value");
    }
    std::string buf;
    buf.reserve(kTensorHeaderSize + m.data.size() * 4);
    buf += "TEXO";
    detail::put_u32le(buf, kTensorVersion);
    buf += static_cast<char>(kTensorDtypeF32);
    buf += static_cast<char>(2);  // ndim
    detail::put_u64le(buf, m.rows);
    detail::put_u64le(buf, m.dim);
    for (float v : m.data) detail::put_u32le(buf, std::bit_cast<std::uint32_t>(v));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open tensor file for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("I/O error while writing " + path);
}

inline EmbeddingMatrix read_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("I/O error while reading " + path);
    if (buf.size() < kTensorHeaderSize) {
        throw std::runtime_error(path + ": truncated header: expected at least " +
                                 std::to_string(kTensorHeaderSize) + " bytes, got " +
                                 std::to_string(buf.size()));
    }
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    if (std::memcmp(p, "TEXO", 4) != 0) throw std::runtime_error(path + ": bad magic");
    if (detail::get_u32le(p + 4) != kTensorVersion) {
        throw std::runtime_error(path + ": unsupported version " +
                                 std::to_string(detail::get_u32le(p + 4)));
    }
    if (p[8] != kTensorDtypeF32) {
        throw std::runtime_error(path + ": unsupported dtype " + std::to_string(p[8]));
    }
    if (p[9] != 2) throw std::runtime_error(path + ": unsupported ndim " + std::to_string(p[9]));

    EmbeddingMatrix m;
    m.rows = detail::get_u64le(p + 10);
    m.dim = detail::get_u64le(p + 18);
    if (m.dim != 0 && m.rows > std::numeric_limits<std::uint64_t>::max() / m.dim) {
        throw std::runtime_error(path + ": implausible dimensions");
    }
    const std::uint64_t count = m.rows * m.dim;
    const std::uint64_t expected = kTensorHeaderSize + count * 4;
    if (buf.size() != expected) {
        throw std::runtime_error(path + ": payload size mismatch: expected " +
                                 std::to_string(expected) + " bytes, got " +
                                 std::to_string(buf.size()));
    }
    m.data.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        float v = std::bit_cast<float>(detail::get_u32le(p + kTensorHeaderSize + i * 4));
        if (!std::isfinite(v)) {
            throw std::runtime_error(path + ": non-finite value at element " + std::to_string(i));
        }
        m.data[i] = v;
    }
    return m;
}

}  // namespace texo
