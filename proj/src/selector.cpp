// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "gc2/errors.hpp"

namespace gc2 {

namespace {

// Sample coordinate for align-corners interpolation, kept in exact integer
// form: position = idx * (src - 1) / (dst - 1) = lo + rem/den.
struct AxisSample {
    std::size_t lo;
    std::size_t hi;
    double w_lo; // (den - rem) / den
    double w_hi; // rem / den
};

AxisSample axis_sample(std::size_t idx, std::size_t src, std::size_t dst) {
    if (src == 1 || dst == 1)
        return {0, 0, 1.0, 0.0};
    const std::size_t den = dst - 1;
    const std::size_t num = idx * (src - 1);
    const std::size_t lo = num / den;
    const std::size_t rem = num % den;
    if (rem == 0)
        return {lo, lo, 1.0, 0.0};
    // Both weights are computed as their own division (not 1 - other) so that
    // mirrored sample positions produce bitwise-identical weight pairs.
    return {lo, lo + 1, static_cast<double>(den - rem) / static_cast<double>(den),
            static_cast<double>(rem) / static_cast<double>(den)};
}

double min_max_gap(const ScoreGrid& g, double& lo, double& hi) {
    lo = g.values.front();
    hi = g.values.front();
    for (double v : g.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

// Min-max normalization to [0,1]; constant grids collapse to all zeros.
ScoreGrid min_max_normalized(const ScoreGrid& g) {
    double lo, hi;
    const double gap = min_max_gap(g, lo, hi);
    ScoreGrid out{g.h, g.w, std::vector<double>(g.values.size(), 0.0)};
    if (gap > 0.0)
        for (std::size_t i = 0; i < g.values.size(); ++i)
            out.values[i] = (g.values[i] - lo) / gap;
    return out;
}

} // namespace

std::size_t SelectionResult::total_retained() const {
    std::size_t n = thumbnail.retained.size();
    for (const auto& c : crops)
        n += c.retained.size();
    return n;
}

ScoreGrid bilinear_upsample(const ScoreGrid& src, std::size_t dst_h, std::size_t dst_w) {
    if (src.h == 0 || src.w == 0 || src.values.size() != src.h * src.w)
        throw ShapeError("bilinear_upsample: malformed source grid");
    if (dst_h < src.h || dst_w < src.w)
        throw ShapeError("bilinear_upsample: target must not shrink any axis");
    if (dst_h == src.h && dst_w == src.w)
        return src;

    ScoreGrid dst{dst_h, dst_w, std::vector<double>(dst_h * dst_w)};
    std::vector<AxisSample> cols(dst_w);
    for (std::size_t x = 0; x < dst_w; ++x)
        cols[x] = axis_sample(x, src.w, dst_w);

    for (std::size_t y = 0; y < dst_h; ++y) {
        const AxisSample ys = axis_sample(y, src.h, dst_h);
        for (std::size_t x = 0; x < dst_w; ++x) {
            const AxisSample& xs = cols[x];
            const double v00 = src.at(ys.lo, xs.lo);
            const double v01 = src.at(ys.lo, xs.hi);
            const double v10 = src.at(ys.hi, xs.lo);
            const double v11 = src.at(ys.hi, xs.hi);
            double v = ys.w_lo * (xs.w_lo * v00 + xs.w_hi * v01) +
                       ys.w_hi * (xs.w_lo * v10 + xs.w_hi * v11);
            // Convex combination; trim the odd last-ulp overshoot so outputs
            // never leave the hull of their support values.
            const double lo = std::min(std::min(v00, v01), std::min(v10, v11));
            const double hi = std::max(std::max(v00, v01), std::max(v10, v11));
            dst.at(y, x) = std::clamp(v, lo, hi);
        }
    }
    return dst;
}

ScoreGrid holistic_scores(const ScoreGrid& global_interp, const ScoreGrid& local, double alpha) {
    if (global_interp.h != local.h || global_interp.w != local.w)
        throw ShapeError("holistic_scores: grid shape mismatch");
    if (!(alpha >= 0.0) || alpha > 1.0)
        throw RangeError("holistic_scores: alpha must be in [0, 1]");

    ScoreGrid out{local.h, local.w, std::vector<double>(local.values.size())};
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = alpha * global_interp.values[i] + (1.0 - alpha) * local.values[i];
    return out;
}

std::vector<std::size_t> topk_select(const ScoreGrid& scores, std::size_t k) {
    const std::size_t n = scores.values.size();
    if (scores.h * scores.w != n)
        throw ShapeError("topk_select: malformed grid");
    if (k > n)
        throw RangeError("topk_select: k exceeds token count");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores.values[a] != scores.values[b])
                              return scores.values[a] > scores.values[b];
                          return a < b;
                      });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

ViewSelection compress_thumbnail(const ScoreGrid& thumb_scores, double retention_ratio) {
    if (!(retention_ratio > 0.0) || retention_ratio > 1.0)
        throw RangeError("compress_thumbnail: retention ratio must be in (0, 1]");
    const auto k = static_cast<std::size_t>(
        std::llround(retention_ratio * static_cast<double>(thumb_scores.values.size())));
    return ViewSelection{retention_ratio, topk_select(thumb_scores, k)};
}

SelectionResult compress_image(const ScoreGrid& thumb_scores,
                               std::span<const ScoreGrid> crop_local_scores,
                               const CropLayout& layout, const CompressionConfig& cfg) {
    cfg.validate();
    const std::size_t h = layout.patch_rows;
    const std::size_t w = layout.patch_cols;
    if (thumb_scores.h != h || thumb_scores.w != w)
        throw ShapeError("compress_image: thumbnail grid does not match layout");
    if (crop_local_scores.size() != layout.crops())
        throw ShapeError("compress_image: expected " + std::to_string(layout.crops()) +
                         " crop grids, got " + std::to_string(crop_local_scores.size()));
    for (const auto& g : crop_local_scores)
        if (g.h != h || g.w != w)
            throw ShapeError("compress_image: crop grid does not match layout");

    SelectionResult result;
    result.thumbnail = compress_thumbnail(thumb_scores, cfg.retention_ratio);

    const RichnessVector richness =
        strategy_richness(thumb_scores, layout, cfg.strategy, cfg.retention_ratio);
    const BudgetPlan plan = plan_budgets(richness, layout.tokens_per_view(), cfg);

    const ScoreGrid up = bilinear_upsample(thumb_scores, layout.rows * h, layout.cols * w);
    // cls_attention puts both maps on the same probability scale; the other
    // scorers mix scales, so each view's pair is min-max normalized first.
    const bool normalize = cfg.scorer != Scorer::ClsAttention;

    result.crops.resize(layout.crops());
    for (std::size_t j = 0; j < layout.crops(); ++j) {
        const std::size_t r = j / layout.cols;
        const std::size_t c = j % layout.cols;
        ScoreGrid global_sub{h, w, std::vector<double>(h * w)};
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x)
                global_sub.at(y, x) = up.at(r * h + y, c * w + x);

        ScoreGrid blended =
            normalize ? holistic_scores(min_max_normalized(global_sub),
                                        min_max_normalized(crop_local_scores[j]), cfg.alpha)
                      : holistic_scores(global_sub, crop_local_scores[j], cfg.alpha);
        result.crops[j] = ViewSelection{plan.ratios[j], topk_select(blended, plan.counts[j])};
    }
    return result;
}

std::string to_json(const SelectionResult& result) {
    nlohmann::ordered_json j;
    j["thumbnail"] = {{"ratio", result.thumbnail.ratio}, {"retained", result.thumbnail.retained}};
    j["crops"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < result.crops.size(); ++i)
        j["crops"].push_back({{"index", i},
                              {"ratio", result.crops[i].ratio},
                              {"retained", result.crops[i].retained}});
    return j.dump(2);
}

} // namespace gc2
