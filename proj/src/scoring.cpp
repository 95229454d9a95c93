// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gc2/errors.hpp"

namespace gc2 {

namespace {

void check_grid_tokens(std::size_t n_tokens, std::size_t h, std::size_t w, const char* op) {
    if (h == 0 || w == 0)
        throw ShapeError(std::string(op) + ": grid dims must be positive");
    if (n_tokens != h * w)
        throw ShapeError(std::string(op) + ": " + std::to_string(n_tokens) +
                         " tokens cannot fill a " + std::to_string(h) + "x" + std::to_string(w) +
                         " grid");
}

double dot_f(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += double(a[i]) * double(b[i]);
    return acc;
}

} // namespace

ScoreGrid cls_attention_scores(std::span<const float> cls_query, const TokenMatrix& keys,
                               std::size_t h, std::size_t w) {
    check_grid_tokens(keys.rows, h, w, "cls_attention_scores");
    if (cls_query.empty() || keys.cols != cls_query.size())
        throw ShapeError("cls_attention_scores: query/key width mismatch");

    const std::size_t n = keys.rows;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(keys.cols));
    std::vector<double> logits(n);
    for (std::size_t i = 0; i < n; ++i)
        logits[i] = dot_f(cls_query, keys.row(i)) * inv_sqrt_d;

    const double peak = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    ScoreGrid grid{h, w, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        grid.values[i] = std::exp(logits[i] - peak);
        denom += grid.values[i];
    }
    for (double& v : grid.values)
        v /= denom;
    return grid;
}

ScoreGrid neg_patch_attention_scores(const TokenMatrix& attention, std::size_t h, std::size_t w) {
    check_grid_tokens(attention.rows, h, w, "neg_patch_attention_scores");
    if (attention.cols != attention.rows)
        throw ShapeError("neg_patch_attention_scores: attention matrix must be square");
    if (attention.rows < 2)
        throw ShapeError("neg_patch_attention_scores: needs at least 2 tokens");

    const std::size_t n = attention.rows;
    ScoreGrid grid{h, w, std::vector<double>(n)};
    // Row mean excluding the diagonal: how much token i attends to the others.
    // Heavy attenders mostly aggregate their neighbors, so they score low.
    for (std::size_t i = 0; i < n; ++i) {
        double given = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                given += attention.at(i, j);
        grid.values[i] = -given / static_cast<double>(n - 1);
    }
    return grid;
}

ScoreGrid neg_global_mean_similarity_scores(const TokenMatrix& tokens, std::size_t h,
                                            std::size_t w) {
    check_grid_tokens(tokens.rows, h, w, "neg_global_mean_similarity_scores");
    if (tokens.cols == 0)
        throw ShapeError("neg_global_mean_similarity_scores: zero-dim embeddings");

    const std::size_t n = tokens.rows;
    const std::size_t d = tokens.cols;
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            mean[c] += tokens.at(i, c);
    for (double& v : mean)
        v /= static_cast<double>(n);

    double mean_sq = 0.0;
    for (double v : mean)
        mean_sq += v * v;
    const double mean_norm = std::sqrt(mean_sq);

    ScoreGrid grid{h, w, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0, sq = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double v = tokens.at(i, c);
            dot += v * mean[c];
            sq += v * v;
        }
        const double norms = std::sqrt(sq) * mean_norm;
        const double cos = norms < 1e-12 ? 0.0 : dot / norms;
        grid.values[i] = -std::clamp(cos, -1.0, 1.0);
    }
    return grid;
}

} // namespace gc2
