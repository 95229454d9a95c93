// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "gc2/budget.hpp"
#include "gc2/errors.hpp"
#include "gc2/rng.hpp"

namespace gc2 {

namespace {

void check_spec(const SynthSpec& spec) {
    if (spec.h == 0 || spec.w == 0 || spec.a == 0 || spec.b == 0 || spec.d == 0)
        throw ConfigError("synth: dims must be positive");
    if (!(spec.noise_scale >= 0.0) || !std::isfinite(spec.noise_scale))
        throw ConfigError("synth: noise_scale must be non-negative");
    for (const auto& blob : spec.blobs) {
        if (!(blob.sigma > 0.0) || !(blob.amplitude > 0.0))
            throw ConfigError("synth: blob sigma and amplitude must be positive");
        if (!std::isfinite(blob.cy) || !std::isfinite(blob.cx))
            throw ConfigError("synth: blob center must be finite");
    }
}

double blob_field(const SynthSpec& spec, double y, double x) {
    double v = 0.0;
    for (const auto& blob : spec.blobs) {
        const double dy = y - blob.cy;
        const double dx = x - blob.cx;
        v += blob.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * blob.sigma * blob.sigma));
    }
    return v;
}

// Normalize to sum 1; an all-zero field becomes uniform.
void normalize_or_uniform(std::vector<double>& values) {
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    if (total > 0.0) {
        for (double& v : values)
            v /= total;
    } else {
        std::fill(values.begin(), values.end(), 1.0 / static_cast<double>(values.size()));
    }
}

} // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("synth: malformed JSON");
    if (!j.is_object())
        throw ConfigError("synth: top level must be an object");

    static const char* known[] = {"h", "w", "a", "b", "d", "centers", "noise_scale", "seed"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw ConfigError("synth: unknown key \"" + key + "\"");
    }

    SynthSpec spec;
    auto dim_field = [&](const char* key, std::size_t fallback) -> std::size_t {
        if (!j.contains(key))
            return fallback;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
            throw ConfigError(std::string("synth: ") + key + " must be a positive integer");
        return v.get<std::size_t>();
    };
    spec.h = dim_field("h", 8);
    spec.w = dim_field("w", 8);
    spec.a = dim_field("a", 2);
    spec.b = dim_field("b", 2);
    spec.d = dim_field("d", 4);
    if (j.contains("noise_scale")) {
        if (!j["noise_scale"].is_number())
            throw ConfigError("synth: noise_scale must be a number");
        spec.noise_scale = j["noise_scale"].get<double>();
    }
    if (j.contains("seed")) {
        const auto& v = j["seed"];
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ConfigError("synth: seed must be a non-negative integer");
        spec.seed = v.get<std::uint64_t>();
    }
    if (j.contains("centers")) {
        if (!j["centers"].is_array())
            throw ConfigError("synth: centers must be an array");
        for (const auto& c : j["centers"]) {
            if (!c.is_array() || c.size() != 4 || !c[0].is_number() || !c[1].is_number() ||
                !c[2].is_number() || !c[3].is_number())
                throw ConfigError("synth: each center must be [cy, cx, sigma, amplitude]");
            spec.blobs.push_back(SaliencyBlob{c[0].get<double>(), c[1].get<double>(),
                                              c[2].get<double>(), c[3].get<double>()});
        }
    }
    check_spec(spec);
    return spec;
}

SynthScene synthesize(const SynthSpec& spec) {
    check_spec(spec);
    SynthScene scene;
    scene.layout = CropLayout{static_cast<std::uint32_t>(spec.a), static_cast<std::uint32_t>(spec.b),
                              static_cast<std::uint32_t>(spec.h),
                              static_cast<std::uint32_t>(spec.w)};
    const std::size_t n = spec.a * spec.b;
    const std::size_t tokens = spec.h * spec.w;
    SplitMix64 rng(spec.seed);

    // Draw order is part of the fixture contract: direction vector, thumbnail
    // noise, full-resolution noise, then per-crop token noise.
    std::vector<double> direction(spec.d);
    double dir_sq = 0.0;
    for (double& v : direction) {
        v = rng.next_double() - 0.5;
        dir_sq += v * v;
    }
    if (std::sqrt(dir_sq) < 1e-12) {
        std::fill(direction.begin(), direction.end(), 0.0);
        direction[0] = 1.0;
    } else {
        const double inv = 1.0 / std::sqrt(dir_sq);
        for (double& v : direction)
            v *= inv;
    }

    scene.thumb_scores = ScoreGrid{spec.h, spec.w, std::vector<double>(tokens)};
    for (std::size_t y = 0; y < spec.h; ++y)
        for (std::size_t x = 0; x < spec.w; ++x)
            scene.thumb_scores.at(y, x) =
                blob_field(spec, static_cast<double>(y), static_cast<double>(x)) +
                spec.noise_scale * rng.next_double();

    // Full-resolution field: cell centers of the (a*h) x (b*w) grid mapped
    // into thumbnail coordinates, so crop slices line up with their regions.
    const std::size_t full_h = spec.a * spec.h;
    const std::size_t full_w = spec.b * spec.w;
    std::vector<double> full(full_h * full_w);
    for (std::size_t y = 0; y < full_h; ++y)
        for (std::size_t x = 0; x < full_w; ++x) {
            const double ty = (static_cast<double>(y) + 0.5) / static_cast<double>(spec.a) - 0.5;
            const double tx = (static_cast<double>(x) + 0.5) / static_cast<double>(spec.b) - 0.5;
            full[y * full_w + x] = blob_field(spec, ty, tx) + spec.noise_scale * rng.next_double();
        }

    normalize_or_uniform(scene.thumb_scores.values);

    scene.crop_local_scores.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t r = j / spec.b;
        const std::size_t c = j % spec.b;
        ScoreGrid g{spec.h, spec.w, std::vector<double>(tokens)};
        for (std::size_t y = 0; y < spec.h; ++y)
            for (std::size_t x = 0; x < spec.w; ++x)
                g.at(y, x) = full[(r * spec.h + y) * full_w + (c * spec.w + x)];
        normalize_or_uniform(g.values);
        scene.crop_local_scores[j] = std::move(g);
    }

    scene.crop_tokens.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        TokenMatrix m{tokens, spec.d, std::vector<float>(tokens * spec.d)};
        for (std::size_t i = 0; i < tokens; ++i) {
            const double saliency = scene.crop_local_scores[j].values[i];
            for (std::size_t c = 0; c < spec.d; ++c) {
                const double base = spec.noise_scale * (rng.next_double() - 0.5);
                m.data[i * spec.d + c] = static_cast<float>(base + saliency * direction[c]);
            }
        }
        scene.crop_tokens[j] = std::move(m);
    }
    return scene;
}

BiasReport probe_bias(ProbeScorer scorer, const SynthScene& scene,
                      const CompressionConfig& cfg) {
    cfg.validate();
    const std::size_t n = scene.layout.crops();
    const std::size_t tokens = scene.layout.tokens_per_view();

    RichnessVector forward(n);
    if (scorer == ProbeScorer::GlobalCom2) {
        forward = strategy_richness(scene.thumb_scores, scene.layout, cfg.strategy,
                                    cfg.retention_ratio);
    } else {
        // Position surrogate: token score equals its global sequence position,
        // so a crop's richness depends only on where it sits in the feed.
        for (std::size_t p = 0; p < n; ++p) {
            const double first = static_cast<double>(p * tokens);
            forward[p] = first * static_cast<double>(tokens) +
                         static_cast<double>(tokens * (tokens - 1)) / 2.0;
        }
    }

    // Reversing the feed carries content along for the real scorer; the
    // position surrogate sees only slots, so its richness does not move.
    RichnessVector reversed = forward;
    if (scorer == ProbeScorer::GlobalCom2)
        std::reverse(reversed.begin(), reversed.end());

    BiasReport report;
    report.budgets_forward = plan_budgets(forward, tokens, cfg).counts;
    report.budgets_reversed = plan_budgets(reversed, tokens, cfg).counts;

    double l1 = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double fwd = static_cast<double>(report.budgets_forward[j]);
        const double rev = static_cast<double>(report.budgets_reversed[n - 1 - j]);
        l1 += std::abs(fwd - rev);
        total += fwd;
    }
    report.bias_score = total > 0.0 ? l1 / total : 0.0;
    return report;
}

std::string to_json(const BiasReport& report) {
    nlohmann::ordered_json j;
    j["budgets_forward"] = report.budgets_forward;
    j["budgets_reversed"] = report.budgets_reversed;
    j["bias_score"] = report.bias_score;
    return j.dump(2);
}

void render_mask(const ScoreGrid& scores, std::span<const std::size_t> retained,
                 const std::filesystem::path& path) {
    const std::size_t cells = scores.h * scores.w;
    if (cells == 0 || scores.values.size() != cells)
        throw ShapeError("render_mask: malformed grid");
    std::vector<unsigned char> mask(cells, 64);
    for (std::size_t idx : retained) {
        if (idx >= cells)
            throw IndexError("render_mask: retained index " + std::to_string(idx) +
                             " out of range");
        mask[idx] = 255;
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("render_mask: cannot open " + path.string());
    out << "P5\n" << scores.w << ' ' << scores.h << "\n255\n";
    out.write(reinterpret_cast<const char*>(mask.data()), static_cast<std::streamsize>(cells));
    if (!out)
        throw IoError("render_mask: write failed for " + path.string());
}

} // namespace gc2
