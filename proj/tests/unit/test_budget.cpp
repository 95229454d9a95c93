// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gc2/budget.hpp"
#include "gc2/errors.hpp"
#include "gc2/rng.hpp"

using namespace gc2;

namespace {

CompressionConfig config_with(double ratio, Strategy strategy = Strategy::SoftmaxSum,
                              Rounding rounding = Rounding::LargestRemainder) {
    CompressionConfig cfg;
    cfg.retention_ratio = ratio;
    cfg.strategy = strategy;
    cfg.rounding = rounding;
    return cfg;
}

RichnessVector random_richness(SplitMix64& rng, std::size_t n, double scale) {
    RichnessVector s(n);
    for (auto& v : s) v = (rng.next_double() - 0.5) * 2.0 * scale;
    return s;
}

}  // namespace

TEST_CASE("softmax weights on a two crop example") {
    std::vector<double> s{10.0, 0.0};
    auto w = importance_weights(s, 10.0, 0.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(0.731059).epsilon(1e-6));
    CHECK(w[1] == doctest::Approx(0.268941).epsilon(1e-6));
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-12));

    auto r = allocate_ratios(w, 0.25);
    CHECK(r[0] == doctest::Approx(0.307765).epsilon(1e-6));
    CHECK(r[1] == doctest::Approx(0.192235).epsilon(1e-6));
}

TEST_CASE("two crop plan lands on 31 and 19 of 100 tokens") {
    BudgetPlan plan = plan_budgets({10.0, 0.0}, 100, config_with(0.25));
    CHECK(plan.total_target == 50);
    REQUIRE(plan.counts.size() == 2);
    CHECK(plan.counts[0] == 31);
    CHECK(plan.counts[1] == 19);
    CHECK(plan.ratios[0] == doctest::Approx(0.307765).epsilon(1e-6));
}

TEST_CASE("equal richness with zero epsilon reproduces the flat ratio exactly") {
    CompressionConfig cfg = config_with(0.37);
    cfg.epsilon = 0.0;
    for (std::size_t n : {1u, 2u, 3u, 7u, 36u}) {
        BudgetPlan plan = plan_budgets(RichnessVector(n, 4.2), 144, cfg);
        for (double r : plan.ratios) CHECK(r == 0.37);  // exact: sigma_j == 1/n bitwise
        for (double w : plan.weights) CHECK(w == doctest::Approx(1.0 / double(n)).epsilon(1e-15));
    }
}

TEST_CASE("budget counts always sum to the conserved target") {
    SplitMix64 rng(2024);
    const Strategy strategies[] = {Strategy::Uniform, Strategy::TopkMean, Strategy::SoftmaxMax,
                                   Strategy::SoftmaxSum};
    const Rounding roundings[] = {Rounding::LargestRemainder, Rounding::Nearest};
    for (int iter = 0; iter < 2000; ++iter) {
        const std::size_t n = 1 + rng.next_u64() % 36;
        const std::size_t N = 1 + rng.next_u64() % 729;
        CompressionConfig cfg;
        cfg.retention_ratio = 0.999999 * rng.next_double() + 1e-6;
        cfg.tau = 0.5 + rng.next_double() * 99.5;
        cfg.epsilon = (rng.next_u64() % 2) ? 0.0 : 1e-8;
        cfg.strategy = strategies[rng.next_u64() % 4];
        cfg.rounding = roundings[rng.next_u64() % 2];
        RichnessVector s = random_richness(rng, n, std::pow(10.0, double(rng.next_u64() % 5) - 2.0));
        BudgetPlan plan = plan_budgets(s, N, cfg);
        const auto expected = static_cast<std::size_t>(
            std::llround(cfg.retention_ratio * double(N) * double(n)));
        CHECK(plan.total_target == expected);
        CHECK(std::accumulate(plan.counts.begin(), plan.counts.end(), std::size_t{0}) == expected);
        for (auto k : plan.counts) CHECK(k <= N);
    }
}

TEST_CASE("richer crops never receive smaller budgets") {
    SplitMix64 rng(31);
    CompressionConfig cfg = config_with(0.3);
    cfg.epsilon = 0.0;
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t n = 2 + rng.next_u64() % 8;
        RichnessVector s = random_richness(rng, n, 5.0);
        BudgetPlan plan = plan_budgets(s, 400, cfg);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (s[i] > s[j]) CHECK(plan.counts[i] >= plan.counts[j]);
    }
}

TEST_CASE("permuting richness permutes the plan") {
    SplitMix64 rng(37);
    CompressionConfig cfg = config_with(0.25);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 2 + rng.next_u64() % 10;
        RichnessVector s = random_richness(rng, n, 3.0);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_u64() % i]);
        RichnessVector sp(n);
        for (std::size_t i = 0; i < n; ++i) sp[i] = s[perm[i]];
        BudgetPlan a = plan_budgets(s, 200, cfg);
        BudgetPlan b = plan_budgets(sp, 200, cfg);
        // Fractional-part collisions across crops are measure-zero for random
        // richness; equality is exact when they are absent.
        bool distinct = true;
        std::vector<double> fracs(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double raw = a.ratios[i] * 200.0;
            fracs[i] = raw - std::floor(raw);
        }
        std::sort(fracs.begin(), fracs.end());
        for (std::size_t i = 1; i < n; ++i)
            if (fracs[i] - fracs[i - 1] < 1e-9) distinct = false;
        if (!distinct) continue;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(b.weights[i] == doctest::Approx(a.weights[perm[i]]).epsilon(1e-12));
            CHECK(b.counts[i] == a.counts[perm[i]]);
        }
    }
}

TEST_CASE("lower temperature spreads the allocation harder") {
    RichnessVector s{5.0, 3.0, 1.0};
    auto spread = [&](double tau) {
        CompressionConfig cfg = config_with(0.1);
        cfg.tau = tau;
        BudgetPlan plan = plan_budgets(s, 10000, cfg);
        auto [lo, hi] = std::minmax_element(plan.counts.begin(), plan.counts.end());
        return *hi - *lo;
    };
    const auto s1 = spread(1.0), s10 = spread(10.0), s100 = spread(100.0);
    CHECK(s1 > s10);
    CHECK(s10 > s100);
}

TEST_CASE("region statistics follow the strategy") {
    // 2x2 thumbnail, 1x2 crops: left region {1,3}, right region {2,4}.
    ScoreGrid thumb{2, 2, {1.0, 2.0, 3.0, 4.0}};
    CropLayout layout{1, 2, 2, 2};

    auto sum = strategy_richness(thumb, layout, Strategy::SoftmaxSum, 0.25);
    CHECK(sum == RichnessVector{4.0, 6.0});
    CHECK(crop_richness(thumb, layout) == sum);

    auto mx = strategy_richness(thumb, layout, Strategy::SoftmaxMax, 0.25);
    CHECK(mx == RichnessVector{3.0, 4.0});

    // N = tokens_per_view = 4: R = 0.25 keeps the single best cell, R = 0.5 the best two.
    auto top1 = strategy_richness(thumb, layout, Strategy::TopkMean, 0.25);
    CHECK(top1 == RichnessVector{3.0, 4.0});
    auto top2 = strategy_richness(thumb, layout, Strategy::TopkMean, 0.5);
    CHECK(top2[0] == doctest::Approx(2.0));
    CHECK(top2[1] == doctest::Approx(3.0));

    ScoreGrid wrong{3, 2, std::vector<double>(6, 0.0)};
    CHECK_THROWS_AS(strategy_richness(wrong, layout, Strategy::SoftmaxSum, 0.25), ShapeError);
}

TEST_CASE("uniform strategy ignores richness") {
    BudgetPlan plan = plan_budgets({100.0, -3.0, 0.5}, 100, config_with(0.5, Strategy::Uniform));
    CHECK(plan.total_target == 150);
    for (double r : plan.ratios) CHECK(r == 0.5);
    for (auto k : plan.counts) CHECK(k == 50);
}

TEST_CASE("nearest rounding also conserves") {
    // raw shares 2.5 / 2.5 round to 3 + 3 = 6 but the target is 5.
    auto counts = apportion_counts(std::vector<double>{0.5, 0.5}, 5, 5, Rounding::Nearest);
    CHECK(counts[0] + counts[1] == 5);
    CHECK(counts[0] == 2);  // claw-back prefers the lower index on ties
    CHECK(counts[1] == 3);
}

TEST_CASE("largest remainder hands extras to the biggest fractions") {
    // raw shares: 1.2, 2.7, 1.1 for a target of 5: floors 1,2,1 then one extra to crop 1.
    auto counts = apportion_counts(std::vector<double>{0.12, 0.27, 0.11}, 10, 5,
                                   Rounding::LargestRemainder);
    CHECK(counts == std::vector<std::size_t>{1, 3, 1});
}

TEST_CASE("apportionment respects per crop capacity") {
    // One crop cannot hold the whole target; the overflow moves on.
    auto counts = apportion_counts(std::vector<double>{1.0, 0.1}, 10, 11, Rounding::LargestRemainder);
    CHECK(counts[0] == 10);
    CHECK(counts[1] == 1);
    CHECK_THROWS_AS(apportion_counts(std::vector<double>{1.0}, 10, 11, Rounding::LargestRemainder),
                    AllocationError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(importance_weights(std::vector<double>{}, 10.0, 0.0), ShapeError);
    CHECK_THROWS_AS(importance_weights(std::vector<double>{1.0}, 0.0, 0.0), RangeError);
    CHECK_THROWS_AS(importance_weights(std::vector<double>{1.0}, -2.0, 0.0), RangeError);
    CHECK_THROWS_AS(importance_weights(std::vector<double>{1.0}, 10.0, -1e-9), RangeError);
    CHECK_THROWS_AS(allocate_ratios(std::vector<double>{0.5}, 0.0), RangeError);
    CHECK_THROWS_AS(allocate_ratios(std::vector<double>{0.5}, 1.5), RangeError);
    CHECK_THROWS_AS(plan_budgets({}, 10, config_with(0.5)), ShapeError);
    CHECK_THROWS_AS(plan_budgets({std::nan("")}, 10, config_with(0.5)), DataError);
    CompressionConfig bad = config_with(0.5);
    bad.alpha = 2.0;
    CHECK_THROWS_AS(plan_budgets({1.0}, 10, bad), ConfigError);
}
