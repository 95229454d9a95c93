// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "gc2/errors.hpp"

namespace gc2 {

namespace {

constexpr char k_magic[4] = {'G', 'C', 'T', '1'};
constexpr std::uint32_t k_max_rank = 8;

std::uint32_t load_u32_le(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

void store_u32_le(std::uint32_t v, unsigned char* p) {
    p[0] = static_cast<unsigned char>(v);
    p[1] = static_cast<unsigned char>(v >> 8);
    p[2] = static_cast<unsigned char>(v >> 16);
    p[3] = static_cast<unsigned char>(v >> 24);
}

void read_exact(std::istream& in, unsigned char* dst, std::size_t count, const char* what) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw FormatError(std::string("tensor: truncated ") + what);
}

} // namespace

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("tensor: cannot open " + path.string());

    unsigned char header[8];
    read_exact(in, header, sizeof header, "header");
    if (std::memcmp(header, k_magic, 4) != 0)
        throw FormatError("tensor: bad magic in " + path.string());

    const std::uint32_t rank = load_u32_le(header + 4);
    if (rank == 0 || rank > k_max_rank)
        throw FormatError("tensor: unsupported rank " + std::to_string(rank));

    Tensor t;
    t.dims.resize(rank);
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        unsigned char buf[4];
        read_exact(in, buf, sizeof buf, "dims");
        t.dims[i] = load_u32_le(buf);
        if (t.dims[i] == 0)
            throw FormatError("tensor: zero dimension");
        count *= t.dims[i];
        if (count > (std::uint64_t(1) << 32))
            throw FormatError("tensor: implausible element count");
    }

    t.data.resize(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        unsigned char buf[4];
        read_exact(in, buf, sizeof buf, "payload");
        t.data[i] = std::bit_cast<float>(load_u32_le(buf));
        if (!std::isfinite(t.data[i]))
            throw DataError("tensor: non-finite value at index " + std::to_string(i));
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError("tensor: trailing bytes after payload");
    return t;
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
    if (t.dims.empty() || t.dims.size() > k_max_rank)
        throw ShapeError("tensor: rank must be in [1, 8]");
    std::uint64_t count = 1;
    for (auto d : t.dims) {
        if (d == 0)
            throw ShapeError("tensor: zero dimension");
        count *= d;
    }
    if (count != t.data.size())
        throw ShapeError("tensor: dims/payload length mismatch");
    for (std::size_t i = 0; i < t.data.size(); ++i)
        if (!std::isfinite(t.data[i]))
            throw DataError("tensor: non-finite value at index " + std::to_string(i));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("tensor: cannot open " + path.string() + " for writing");

    std::vector<unsigned char> buf(8 + 4 * t.dims.size() + 4 * t.data.size());
    std::memcpy(buf.data(), k_magic, 4);
    store_u32_le(static_cast<std::uint32_t>(t.dims.size()), buf.data() + 4);
    std::size_t off = 8;
    for (auto d : t.dims) {
        store_u32_le(d, buf.data() + off);
        off += 4;
    }
    for (float v : t.data) {
        store_u32_le(std::bit_cast<std::uint32_t>(v), buf.data() + off);
        off += 4;
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("tensor: write failed for " + path.string());
}

} // namespace gc2
