// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gc2/config.hpp"
#include "gc2/scoring.hpp"
#include "gc2/selector.hpp"
#include "gc2/tensor.hpp"

namespace gc2 {

// T frames of N x D token embeddings, all frames the same shape.
struct VideoSequence {
    std::vector<TokenMatrix> frames;

    std::size_t frame_count() const { return frames.size(); }
    std::size_t tokens_per_frame() const { return frames.empty() ? 0 : frames.front().rows; }
    std::size_t dim() const { return frames.empty() ? 0 : frames.front().cols; }
};

struct VideoSelection {
    std::vector<ViewSelection> frames;

    std::size_t total_retained() const;
};

// Reinterprets a rank-3 [T, N, D] tensor as a sequence (ShapeError otherwise).
VideoSequence video_from_tensor(const Tensor& t);

// Mean token over all frames.
std::vector<double> global_pool(const VideoSequence& video);

// Per-frame 1 x N grids of -cos(token, global mean token).
std::vector<ScoreGrid> video_global_scores(const VideoSequence& video);

// Per-frame 1 x N grids of -cos(token, own-frame mean token).
std::vector<ScoreGrid> video_local_scores(const VideoSequence& video);

// Frame budgets from softmax-weighted global-score sums (temperature tau),
// then per-frame top-k on the alpha-blended global/local scores. Blending is
// raw: both maps are negative cosines. Conserves round(R * N * T) tokens.
VideoSelection compress_video(const VideoSequence& video, const CompressionConfig& cfg);

std::string to_json(const VideoSelection& result);

} // namespace gc2
