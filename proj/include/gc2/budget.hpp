// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gc2/config.hpp"
#include "gc2/layout.hpp"
#include "gc2/scoring.hpp"

namespace gc2 {

// One informativeness value per crop.
using RichnessVector = std::vector<double>;

struct BudgetPlan {
    std::vector<double> weights;      // sigma_j, kept visible for testing
    std::vector<double> ratios;       // r_j, clamped to [0, 1]
    std::vector<std::size_t> counts;  // k_j, sums to total_target
    std::size_t total_target = 0;     // round(R * N * n)
};

// Sum of thumbnail scores over each crop's region.
RichnessVector crop_richness(const ScoreGrid& thumb_scores, const CropLayout& layout);

// Region statistic matching the allocation strategy: sum for softmax_sum (and
// uniform, where it is unused), max for softmax_max, mean of the top
// ceil(R*N) region scores for topk_mean.
RichnessVector strategy_richness(const ScoreGrid& thumb_scores, const CropLayout& layout,
                                 Strategy strategy, double retention_ratio);

// sigma_j = exp((s_j - max s) / tau) / (sum_l exp((s_l - max s) / tau) + epsilon)
std::vector<double> importance_weights(std::span<const double> richness, double tau,
                                       double epsilon);

// r_j = clamp(R * (1 + sigma_j - 1/n), 0, 1)
std::vector<double> allocate_ratios(std::span<const double> weights, double retention_ratio);

// Full per-crop budgeting on an already strategy-appropriate richness vector
// (see strategy_richness): weights -> ratios -> integer counts under the
// configured rounding policy, conserving
// sum(k_j) == round(R * tokens_per_view * n) exactly. The uniform strategy
// bypasses the softmax and sets every ratio to R.
BudgetPlan plan_budgets(const RichnessVector& richness, std::size_t tokens_per_view,
                        const CompressionConfig& cfg);

// Shared integer apportionment (also used by the video path).
std::vector<std::size_t> apportion_counts(std::span<const double> ratios,
                                          std::size_t tokens_per_view, std::size_t total_target,
                                          Rounding policy);

} // namespace gc2
