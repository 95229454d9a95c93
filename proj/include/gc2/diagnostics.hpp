// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gc2/config.hpp"
#include "gc2/layout.hpp"
#include "gc2/scoring.hpp"

namespace gc2 {

// One isotropic Gaussian saliency bump in thumbnail cell coordinates.
struct SaliencyBlob {
    double cy = 0.0;
    double cx = 0.0;
    double sigma = 1.0;
    double amplitude = 1.0;
};

struct SynthSpec {
    std::size_t h = 1, w = 1; // thumbnail / per-crop patch grid
    std::size_t a = 1, b = 1; // crop arrangement
    std::size_t d = 4;        // embedding dim
    std::vector<SaliencyBlob> blobs;
    double noise_scale = 0.0;
    std::uint64_t seed = 0;
};

SynthSpec parse_synth_spec(const std::string& json_text); // throws ConfigError

// Deterministic test scene: thumbnail scores (sum 1), per-crop local scores
// (each sum 1, sliced from the full-resolution blob field), and per-crop token
// embeddings (seeded noise plus a saliency-weighted direction).
struct SynthScene {
    CropLayout layout;
    ScoreGrid thumb_scores;
    std::vector<ScoreGrid> crop_local_scores;
    std::vector<TokenMatrix> crop_tokens;
};

SynthScene synthesize(const SynthSpec& spec);

// Budget allocator under probe: the real region-content allocator, or a
// surrogate that scores tokens by their global sequence position (the
// behavior the probe is designed to expose).
enum class ProbeScorer {
    GlobalCom2,
    PositionWeighted,
};

struct BiasReport {
    std::vector<std::size_t> budgets_forward;
    std::vector<std::size_t> budgets_reversed;
    double bias_score = 0.0; // L1(forward, reverse(reversed)) / total budget
};

// Allocates crop budgets with the crops fed in the given order and again in
// reverse, then compares content-aligned budgets. A content-driven allocator
// scores zero; a position-driven one does not.
BiasReport probe_bias(ProbeScorer scorer, const SynthScene& scene, const CompressionConfig& cfg);

std::string to_json(const BiasReport& report);

// Binary PGM (P5, maxval 255): retained cells 255, discarded 64.
// Throws IndexError on out-of-range indices, IoError on write failure.
void render_mask(const ScoreGrid& scores, std::span<const std::size_t> retained,
                 const std::filesystem::path& path);

} // namespace gc2
