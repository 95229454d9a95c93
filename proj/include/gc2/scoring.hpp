// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gc2 {

// Row-major matrix of token data (embeddings, keys, or attention rows).
struct TokenMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const float> row(std::size_t r) const {
        return std::span<const float>(data).subspan(r * cols, cols);
    }
};

// Per-token importance map over an h x w patch grid. Values are double: the
// softmax/cosine scores feed tolerance-sensitive comparisons downstream.
struct ScoreGrid {
    std::size_t h = 0;
    std::size_t w = 0;
    std::vector<double> values;

    std::size_t size() const { return h * w; }
    double at(std::size_t y, std::size_t x) const { return values[y * w + x]; }
    double& at(std::size_t y, std::size_t x) { return values[y * w + x]; }
};

// softmax_i(q . k_i / sqrt(D)) over the N = h*w patch keys.
ScoreGrid cls_attention_scores(std::span<const float> cls_query, const TokenMatrix& keys,
                               std::size_t h, std::size_t w);

// attention is N x N, row i = token i's attention distribution; score_i is
// the negated mean attention token i pays to the other N-1 tokens.
ScoreGrid neg_patch_attention_scores(const TokenMatrix& attention, std::size_t h, std::size_t w);

// Negative cosine between each token and the mean token; near-zero norms
// (product below 1e-12) score 0.
ScoreGrid neg_global_mean_similarity_scores(const TokenMatrix& tokens, std::size_t h,
                                            std::size_t w);

} // namespace gc2
