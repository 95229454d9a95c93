// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/budget.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gc2/errors.hpp"

namespace gc2 {

namespace {

void check_layout_grid(const ScoreGrid& thumb, const CropLayout& layout, const char* op) {
    if (thumb.h != layout.patch_rows || thumb.w != layout.patch_cols)
        throw ShapeError(std::string(op) + ": thumbnail grid " + std::to_string(thumb.h) + "x" +
                         std::to_string(thumb.w) + " does not match layout patch grid");
}

std::vector<double> region_values(const ScoreGrid& thumb, const Region& region) {
    std::vector<double> vals;
    vals.reserve(region.cells());
    for (std::uint32_t y = region.row0; y < region.row1; ++y)
        for (std::uint32_t x = region.col0; x < region.col1; ++x)
            vals.push_back(thumb.at(y, x));
    return vals;
}

} // namespace

RichnessVector crop_richness(const ScoreGrid& thumb_scores, const CropLayout& layout) {
    check_layout_grid(thumb_scores, layout, "crop_richness");
    RichnessVector richness(layout.crops());
    for (std::size_t j = 0; j < richness.size(); ++j) {
        const Region region = crop_region_of(layout, j);
        double sum = 0.0;
        for (std::uint32_t y = region.row0; y < region.row1; ++y)
            for (std::uint32_t x = region.col0; x < region.col1; ++x)
                sum += thumb_scores.at(y, x);
        richness[j] = sum;
    }
    return richness;
}

RichnessVector strategy_richness(const ScoreGrid& thumb_scores, const CropLayout& layout,
                                 Strategy strategy, double retention_ratio) {
    if (strategy == Strategy::Uniform || strategy == Strategy::SoftmaxSum)
        return crop_richness(thumb_scores, layout);

    check_layout_grid(thumb_scores, layout, "strategy_richness");
    RichnessVector richness(layout.crops());
    for (std::size_t j = 0; j < richness.size(); ++j) {
        std::vector<double> vals = region_values(thumb_scores, crop_region_of(layout, j));
        if (strategy == Strategy::SoftmaxMax) {
            richness[j] = *std::max_element(vals.begin(), vals.end());
        } else { // TopkMean: mean of the top ceil(R*N) scores within the region
            const double want =
                std::ceil(retention_ratio * static_cast<double>(layout.tokens_per_view()));
            const std::size_t k =
                std::min(vals.size(), static_cast<std::size_t>(std::max(1.0, want)));
            std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k),
                              vals.end(), std::greater<>());
            richness[j] =
                std::accumulate(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
                static_cast<double>(k);
        }
    }
    return richness;
}

std::vector<double> importance_weights(std::span<const double> richness, double tau,
                                       double epsilon) {
    if (richness.empty())
        throw ShapeError("importance_weights: empty richness vector");
    if (!(tau > 0.0))
        throw RangeError("importance_weights: tau must be positive");
    if (epsilon < 0.0)
        throw RangeError("importance_weights: epsilon must be non-negative");

    const double peak = *std::max_element(richness.begin(), richness.end());
    std::vector<double> weights(richness.size());
    double denom = epsilon;
    for (std::size_t j = 0; j < richness.size(); ++j) {
        weights[j] = std::exp((richness[j] - peak) / tau);
        denom += weights[j];
    }
    for (double& w : weights)
        w /= denom;
    return weights;
}

std::vector<double> allocate_ratios(std::span<const double> weights, double retention_ratio) {
    if (weights.empty())
        throw ShapeError("allocate_ratios: empty weight vector");
    if (!(retention_ratio > 0.0) || retention_ratio > 1.0)
        throw RangeError("allocate_ratios: retention ratio must be in (0, 1]");

    const double uniform = 1.0 / static_cast<double>(weights.size());
    std::vector<double> ratios(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j)
        ratios[j] = std::clamp(retention_ratio * (1.0 + (weights[j] - uniform)), 0.0, 1.0);
    return ratios;
}

std::vector<std::size_t> apportion_counts(std::span<const double> ratios,
                                          std::size_t tokens_per_view, std::size_t total_target,
                                          Rounding policy) {
    const std::size_t n = ratios.size();
    if (n == 0)
        throw ShapeError("apportion_counts: empty ratio vector");
    if (total_target > n * tokens_per_view)
        throw AllocationError("apportion_counts: target exceeds capacity");

    const double cap = static_cast<double>(tokens_per_view);
    std::vector<double> raw(n);
    std::vector<std::size_t> counts(n);
    for (std::size_t j = 0; j < n; ++j) {
        raw[j] = std::clamp(ratios[j], 0.0, 1.0) * cap;
        const double base =
            policy == Rounding::LargestRemainder ? std::floor(raw[j]) : std::round(raw[j]);
        counts[j] = static_cast<std::size_t>(std::clamp(base, 0.0, cap));
    }

    // Conservation repair: hand out (or claw back) one token at a time, always
    // at the crop whose current count deviates most from its real-valued raw
    // share. For largest-remainder bases this is exactly the classic
    // largest-fractional-part order; ties go to the lower crop index.
    auto assigned = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    while (assigned != total_target) {
        const bool add = assigned < total_target;
        std::size_t pick = n;
        double best_dev = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (add && counts[j] >= tokens_per_view)
                continue;
            if (!add && counts[j] == 0)
                continue;
            const double dev = raw[j] - static_cast<double>(counts[j]);
            if (pick == n || (add ? dev > best_dev : dev < best_dev)) {
                pick = j;
                best_dev = dev;
            }
        }
        if (pick == n)
            throw AllocationError("apportion_counts: no adjustable crop left");
        counts[pick] += add ? 1 : std::size_t(-1);
        assigned += add ? 1 : std::size_t(-1);
    }
    return counts;
}

BudgetPlan plan_budgets(const RichnessVector& richness, std::size_t tokens_per_view,
                        const CompressionConfig& cfg) {
    cfg.validate();
    if (richness.empty())
        throw ShapeError("plan_budgets: empty richness vector");
    for (double s : richness)
        if (!std::isfinite(s))
            throw DataError("plan_budgets: non-finite richness");

    const std::size_t n = richness.size();
    BudgetPlan plan;
    if (cfg.strategy == Strategy::Uniform) {
        plan.weights.assign(n, 1.0 / static_cast<double>(n));
        plan.ratios.assign(n, cfg.retention_ratio);
    } else {
        plan.weights = importance_weights(richness, cfg.tau, cfg.epsilon);
        plan.ratios = allocate_ratios(plan.weights, cfg.retention_ratio);
    }

    plan.total_target = static_cast<std::size_t>(std::llround(
        cfg.retention_ratio * static_cast<double>(tokens_per_view) * static_cast<double>(n)));
    plan.counts = apportion_counts(plan.ratios, tokens_per_view, plan.total_target, cfg.rounding);
    return plan;
}

} // namespace gc2
