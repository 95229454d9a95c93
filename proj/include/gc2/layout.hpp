// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

namespace gc2 {

// Dynamic-cropping geometry: an a x b arrangement of crops, each encoded as an
// h x w patch-token grid (the thumbnail uses the same h x w grid).
struct CropLayout {
    std::uint32_t rows = 1;       // a
    std::uint32_t cols = 1;       // b
    std::uint32_t patch_rows = 1; // h
    std::uint32_t patch_cols = 1; // w

    std::size_t crops() const { return std::size_t(rows) * cols; }
    std::size_t tokens_per_view() const { return std::size_t(patch_rows) * patch_cols; }
};

// Half-open cell rectangle [row0, row1) x [col0, col1) in thumbnail coordinates.
struct Region {
    std::uint32_t row0 = 0, col0 = 0, row1 = 0, col1 = 0;

    std::size_t height() const { return row1 - row0; }
    std::size_t width() const { return col1 - col0; }
    std::size_t cells() const { return height() * width(); }
};

// Picks the crop grid for an image of the given pixel size against the
// candidate templates {2x2, 1x2, 1x3, 1x4, 2x1, 3x1, 4x1}: keep the template
// whose aspect-preserving fit retains the most effective resolution, breaking
// ties toward fewer crops, then fewer rows. `base` is the per-crop pixel size;
// the patch grid is base/14 per side (ViT patch 14).
CropLayout select_grid(std::uint32_t width, std::uint32_t height, std::uint32_t base);

// Thumbnail cells covered by crop j (row-major crop order). Throws IndexError.
Region crop_region_of(const CropLayout& layout, std::size_t j);

} // namespace gc2
