// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gc2/budget.hpp"
#include "gc2/config.hpp"
#include "gc2/layout.hpp"
#include "gc2/scoring.hpp"

namespace gc2 {

struct ViewSelection {
    double ratio = 0.0;                 // retention ratio applied to this view
    std::vector<std::size_t> retained;  // kept token indices, ascending
};

struct SelectionResult {
    ViewSelection thumbnail;
    std::vector<ViewSelection> crops;

    std::size_t total_retained() const;
};

// Align-corners bilinear interpolation to a grid at least as large on each
// axis (ShapeError otherwise); singleton axes replicate. Output corners equal
// input corners exactly, and same-size requests return the input unchanged.
ScoreGrid bilinear_upsample(const ScoreGrid& src, std::size_t dst_h, std::size_t dst_w);

// alpha * global + (1 - alpha) * local, elementwise over equal-shape grids.
ScoreGrid holistic_scores(const ScoreGrid& global_interp, const ScoreGrid& local, double alpha);

// Indices of the k largest scores (ties to the lower index), returned sorted
// ascending. k may not exceed the grid size (RangeError).
std::vector<std::size_t> topk_select(const ScoreGrid& scores, std::size_t k);

// Thumbnail view keeps round(R * N) tokens by score.
ViewSelection compress_thumbnail(const ScoreGrid& thumb_scores, double retention_ratio);

// Whole-image pipeline: thumbnail selection, adaptive per-crop budgets from
// region richness, thumbnail upsampled to (a*h) x (b*w) and sliced per crop,
// global/local blend, per-crop top-k. When the scorer is not cls_attention the
// two maps are min-max normalized per view before blending (mixed scales);
// cls_attention maps blend raw.
SelectionResult compress_image(const ScoreGrid& thumb_scores,
                               std::span<const ScoreGrid> crop_local_scores,
                               const CropLayout& layout, const CompressionConfig& cfg);

// Stable-key JSON with shortest round-trip floats; byte-identical across runs.
std::string to_json(const SelectionResult& result);

} // namespace gc2
