// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/layout.hpp"

#include <array>
#include <string>

#include "gc2/errors.hpp"

namespace gc2 {

namespace {

struct Template {
    std::uint32_t a, b;
};

constexpr std::array<Template, 7> k_templates = {
    {{2, 2}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {3, 1}, {4, 1}}};

// Exact rational comparison of min(scale, 1) for two templates, where
// scale = min(base*b / width, base*a / height). Returns <0, 0, >0.
int compare_effective_scale(const Template& lhs, const Template& rhs, std::uint64_t width,
                            std::uint64_t height, std::uint64_t base) {
    // scale as numerator/denominator, capped at 1.
    auto capped = [&](const Template& t) {
        // base*b/width vs base*a/height: cross-compare b*height vs a*width.
        std::uint64_t num, den;
        if (std::uint64_t(t.b) * height <= std::uint64_t(t.a) * width) {
            num = base * t.b;
            den = width;
        } else {
            num = base * t.a;
            den = height;
        }
        if (num > den) { // fit would upscale; effective resolution caps at 1
            num = 1;
            den = 1;
        }
        return std::pair<std::uint64_t, std::uint64_t>(num, den);
    };
    auto [ln, ld] = capped(lhs);
    auto [rn, rd] = capped(rhs);
    const auto l = static_cast<unsigned __int128>(ln) * rd;
    const auto r = static_cast<unsigned __int128>(rn) * ld;
    if (l < r)
        return -1;
    return l > r ? 1 : 0;
}

} // namespace

CropLayout select_grid(std::uint32_t width, std::uint32_t height, std::uint32_t base) {
    if (width == 0 || height == 0 || base == 0)
        throw RangeError("select_grid: width, height, and base must be positive");

    Template best = k_templates[0];
    for (std::size_t i = 1; i < k_templates.size(); ++i) {
        const Template& cand = k_templates[i];
        const int cmp = compare_effective_scale(cand, best, width, height, base);
        if (cmp > 0) {
            best = cand;
        } else if (cmp == 0) {
            const std::uint32_t cand_crops = cand.a * cand.b;
            const std::uint32_t best_crops = best.a * best.b;
            if (cand_crops < best_crops || (cand_crops == best_crops && cand.a < best.a))
                best = cand;
        }
    }

    // ViT patch size 14: a 336px crop encodes to 24x24 tokens, 384px to 27x27.
    const std::uint32_t side = base / 14 > 0 ? base / 14 : 1;
    return CropLayout{best.a, best.b, side, side};
}

Region crop_region_of(const CropLayout& layout, std::size_t j) {
    if (j >= layout.crops())
        throw IndexError("crop_region_of: crop index " + std::to_string(j) + " out of range");
    const std::uint64_t r = j / layout.cols;
    const std::uint64_t c = j % layout.cols;
    const std::uint64_t h = layout.patch_rows;
    const std::uint64_t w = layout.patch_cols;
    Region region;
    region.row0 = static_cast<std::uint32_t>(r * h / layout.rows);
    region.row1 = static_cast<std::uint32_t>((r + 1) * h / layout.rows);
    region.col0 = static_cast<std::uint32_t>(c * w / layout.cols);
    region.col1 = static_cast<std::uint32_t>((c + 1) * w / layout.cols);
    return region;
}

} // namespace gc2
