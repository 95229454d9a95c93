// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/flops.hpp"

#include <cmath>

#include "gc2/errors.hpp"

namespace gc2 {

namespace {

// tokens may be zero (an empty decode cache is meaningful); the rest may not.
void check_dims(const ModelDims& dims) {
    if (dims.hidden == 0 || dims.ffn == 0 || dims.layers == 0)
        throw RangeError("flops: hidden, ffn, and layer dims must be positive");
}

} // namespace

double prefill_flops(const ModelDims& dims) {
    check_dims(dims);
    const double t = static_cast<double>(dims.tokens);
    const double d = static_cast<double>(dims.hidden);
    const double m = static_cast<double>(dims.ffn);
    // Per layer: QKV/out projections 8Td^2, attention matmuls 4T^2d, FFN 6Tdm.
    const double per_layer = 8.0 * t * d * d + 4.0 * t * t * d + 6.0 * t * d * m;
    return static_cast<double>(dims.layers) * per_layer;
}

double decode_flops(const ModelDims& dims) {
    check_dims(dims);
    const double t = static_cast<double>(dims.tokens);
    const double d = static_cast<double>(dims.hidden);
    const double m = static_cast<double>(dims.ffn);
    // One new token against a T-entry KV cache.
    const double per_layer = 8.0 * d * d + 4.0 * t * d + 6.0 * t * d * m;
    return static_cast<double>(dims.layers) * per_layer;
}

double reduction_ratio(const ModelDims& dims, double retention_ratio) {
    check_dims(dims);
    if (!(retention_ratio > 0.0) || retention_ratio > 1.0)
        throw RangeError("flops: retention ratio must be in (0, 1]");
    const double t = static_cast<double>(dims.tokens);
    const double d = static_cast<double>(dims.hidden);
    const double m = static_cast<double>(dims.ffn);
    const double r = retention_ratio;
    // 1 - prefill(R*T)/prefill(T); the common R*T*d*L factor cancels.
    return 1.0 - r * (8.0 * d + 4.0 * r * t + 6.0 * m) / (8.0 * d + 4.0 * t + 6.0 * m);
}

} // namespace gc2
