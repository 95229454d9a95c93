// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/video.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "gc2/budget.hpp"
#include "gc2/errors.hpp"

namespace gc2 {

namespace {

void check_video(const VideoSequence& video, const char* op) {
    if (video.frames.empty())
        throw ShapeError(std::string(op) + ": empty sequence");
    const std::size_t n = video.frames.front().rows;
    const std::size_t d = video.frames.front().cols;
    if (n == 0 || d == 0)
        throw ShapeError(std::string(op) + ": degenerate frame shape");
    for (const auto& f : video.frames)
        if (f.rows != n || f.cols != d || f.data.size() != n * d)
            throw ShapeError(std::string(op) + ": frames disagree in shape");
}

// -cos(token, reference) with the degenerate-norm convention (0 when the norm
// product underflows 1e-12).
double neg_cosine(std::span<const float> token, std::span<const double> reference,
                  double ref_norm) {
    double dot = 0.0, sq = 0.0;
    for (std::size_t c = 0; c < token.size(); ++c) {
        const double v = token[c];
        dot += v * reference[c];
        sq += v * v;
    }
    const double norms = std::sqrt(sq) * ref_norm;
    if (norms < 1e-12)
        return 0.0;
    return -std::clamp(dot / norms, -1.0, 1.0);
}

double norm_of(std::span<const double> v) {
    double sq = 0.0;
    for (double x : v)
        sq += x * x;
    return std::sqrt(sq);
}

std::vector<double> frame_mean(const TokenMatrix& frame) {
    std::vector<double> mean(frame.cols, 0.0);
    for (std::size_t i = 0; i < frame.rows; ++i)
        for (std::size_t c = 0; c < frame.cols; ++c)
            mean[c] += frame.at(i, c);
    for (double& v : mean)
        v /= static_cast<double>(frame.rows);
    return mean;
}

std::vector<ScoreGrid> score_against(const VideoSequence& video,
                                     const std::vector<double>& reference) {
    const double ref_norm = norm_of(reference);
    std::vector<ScoreGrid> grids;
    grids.reserve(video.frame_count());
    for (const auto& frame : video.frames) {
        ScoreGrid g{1, frame.rows, std::vector<double>(frame.rows)};
        for (std::size_t i = 0; i < frame.rows; ++i)
            g.values[i] = neg_cosine(frame.row(i), reference, ref_norm);
        grids.push_back(std::move(g));
    }
    return grids;
}

} // namespace

std::size_t VideoSelection::total_retained() const {
    std::size_t n = 0;
    for (const auto& f : frames)
        n += f.retained.size();
    return n;
}

VideoSequence video_from_tensor(const Tensor& t) {
    if (t.dims.size() != 3)
        throw ShapeError("video_from_tensor: expected a rank-3 [T, N, D] tensor, got rank " +
                         std::to_string(t.dims.size()));
    const std::size_t frames = t.dims[0];
    const std::size_t n = t.dims[1];
    const std::size_t d = t.dims[2];
    VideoSequence video;
    video.frames.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        TokenMatrix m{n, d, {}};
        const auto begin = t.data.begin() + static_cast<std::ptrdiff_t>(f * n * d);
        m.data.assign(begin, begin + static_cast<std::ptrdiff_t>(n * d));
        video.frames.push_back(std::move(m));
    }
    return video;
}

std::vector<double> global_pool(const VideoSequence& video) {
    check_video(video, "global_pool");
    const std::size_t d = video.dim();
    std::vector<double> mean(d, 0.0);
    for (const auto& frame : video.frames)
        for (std::size_t i = 0; i < frame.rows; ++i)
            for (std::size_t c = 0; c < d; ++c)
                mean[c] += frame.at(i, c);
    const double count = static_cast<double>(video.frame_count() * video.tokens_per_frame());
    for (double& v : mean)
        v /= count;
    return mean;
}

std::vector<ScoreGrid> video_global_scores(const VideoSequence& video) {
    check_video(video, "video_global_scores");
    return score_against(video, global_pool(video));
}

std::vector<ScoreGrid> video_local_scores(const VideoSequence& video) {
    check_video(video, "video_local_scores");
    std::vector<ScoreGrid> grids;
    grids.reserve(video.frame_count());
    for (const auto& frame : video.frames) {
        const std::vector<double> mean = frame_mean(frame);
        const double ref_norm = norm_of(mean);
        ScoreGrid g{1, frame.rows, std::vector<double>(frame.rows)};
        for (std::size_t i = 0; i < frame.rows; ++i)
            g.values[i] = neg_cosine(frame.row(i), mean, ref_norm);
        grids.push_back(std::move(g));
    }
    return grids;
}

VideoSelection compress_video(const VideoSequence& video, const CompressionConfig& cfg) {
    cfg.validate();
    check_video(video, "compress_video");

    const std::vector<ScoreGrid> global = video_global_scores(video);
    const std::vector<ScoreGrid> local = video_local_scores(video);

    // Frame richness is the sum of its global distinctiveness scores; budgets
    // then follow the same softmax-weighted allocation the image path uses.
    RichnessVector richness(video.frame_count());
    for (std::size_t f = 0; f < richness.size(); ++f)
        richness[f] = std::accumulate(global[f].values.begin(), global[f].values.end(), 0.0);

    const std::vector<double> weights = importance_weights(richness, cfg.tau, cfg.epsilon);
    const std::vector<double> ratios = allocate_ratios(weights, cfg.retention_ratio);
    const std::size_t n_tokens = video.tokens_per_frame();
    const auto total_target = static_cast<std::size_t>(
        std::llround(cfg.retention_ratio * static_cast<double>(n_tokens) *
                     static_cast<double>(video.frame_count())));
    const std::vector<std::size_t> counts =
        apportion_counts(ratios, n_tokens, total_target, cfg.rounding);

    VideoSelection result;
    result.frames.resize(video.frame_count());
    for (std::size_t f = 0; f < video.frame_count(); ++f) {
        // Both maps are negative cosines, already on a common scale.
        const ScoreGrid blended = holistic_scores(global[f], local[f], cfg.alpha);
        result.frames[f] = ViewSelection{ratios[f], topk_select(blended, counts[f])};
    }
    return result;
}

std::string to_json(const VideoSelection& result) {
    nlohmann::ordered_json j;
    j["frames"] = nlohmann::ordered_json::array();
    for (std::size_t f = 0; f < result.frames.size(); ++f)
        j["frames"].push_back({{"index", f},
                               {"ratio", result.frames[f].ratio},
                               {"retained", result.frames[f].retained}});
    return j.dump(2);
}

} // namespace gc2
