// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace gc2 {

enum class Scorer {
    ClsAttention,      // softmax of CLS-query attention over patch keys
    NegPatchAttention, // negative mean attention paid to other patches
    NegGlobalMeanSim,  // negative cosine to the mean token
};

enum class Strategy {
    Uniform,    // every crop keeps the same ratio
    TopkMean,   // crop importance = mean of its top-ceil(R*N) region scores
    SoftmaxMax, // crop importance = max region score
    SoftmaxSum, // crop importance = region score sum (default)
};

enum class Rounding {
    LargestRemainder, // floor + extras by largest fractional part
    Nearest,          // round half away, then repair conservation
};

struct CompressionConfig {
    double retention_ratio = 0.0; // mandatory, (0, 1]
    double tau = 10.0;            // softmax temperature, > 0
    double alpha = 0.5;           // global/local blend weight, [0, 1]
    double epsilon = 1e-8;        // softmax denominator guard, >= 0
    Scorer scorer = Scorer::ClsAttention;
    Strategy strategy = Strategy::SoftmaxSum;
    Rounding rounding = Rounding::LargestRemainder;
    std::uint64_t seed = 0;

    void validate() const; // throws ConfigError
};

// Parses a JSON object; unknown keys, wrong types, and out-of-range values are
// all rejected with ConfigError. retention_ratio is the only mandatory key.
CompressionConfig parse_config(const std::string& json_text);

const char* to_string(Scorer s);
const char* to_string(Strategy s);
const char* to_string(Rounding r);
Scorer parse_scorer(const std::string& name);       // throws ConfigError
Strategy parse_strategy(const std::string& name);   // throws ConfigError
Rounding parse_rounding(const std::string& name);   // throws ConfigError

} // namespace gc2
