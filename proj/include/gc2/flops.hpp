// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace gc2 {

struct ModelDims {
    std::uint64_t tokens = 0; // T, sequence length entering prefill
    std::uint64_t hidden = 0; // d
    std::uint64_t ffn = 0;    // m, intermediate size
    std::uint64_t layers = 0; // L
};

// Prefill cost over L layers: 8Td^2 + 4T^2d + 6Tdm per layer.
double prefill_flops(const ModelDims& dims);

// Per-token decode cost with a T-entry KV cache: 8d^2 + 4Td + 6Tdm per layer.
double decode_flops(const ModelDims& dims);

// Prefill FLOPs saved by keeping ratio R of the T tokens:
// eta = 1 - R * (8d + 4RT + 6m) / (8d + 4T + 6m). Layer count cancels.
double reduction_ratio(const ModelDims& dims, double retention_ratio);

} // namespace gc2
