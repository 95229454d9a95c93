// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gc2 {

// Dense row-major float tensor, the unit of file exchange.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t size() const {
        std::size_t n = 1;
        for (auto d : dims)
            n *= d;
        return dims.empty() ? 0 : n;
    }
};

// Binary container: magic "GCT1", u32 LE rank, rank u32 LE dims, f32 LE payload.
// Throws FormatError on malformed bytes, DataError on non-finite payload,
// IoError when the file cannot be opened or written.
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& t, const std::filesystem::path& path);

} // namespace gc2
