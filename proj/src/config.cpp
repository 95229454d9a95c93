// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#include "gc2/config.hpp"

#include <cmath>

#include <json.hpp>

#include "gc2/errors.hpp"

namespace gc2 {

namespace {

double number_field(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(std::string("config: ") + key + " must be a number");
    return v.get<double>();
}

} // namespace

void CompressionConfig::validate() const {
    if (!std::isfinite(retention_ratio) || retention_ratio <= 0.0 || retention_ratio > 1.0)
        throw ConfigError("config: retention_ratio must be in (0, 1]");
    if (!std::isfinite(tau) || tau <= 0.0)
        throw ConfigError("config: tau must be positive");
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0)
        throw ConfigError("config: alpha must be in [0, 1]");
    if (!std::isfinite(epsilon) || epsilon < 0.0)
        throw ConfigError("config: epsilon must be non-negative");
}

CompressionConfig parse_config(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("config: malformed JSON");
    if (!j.is_object())
        throw ConfigError("config: top level must be an object");

    static const char* known[] = {"retention_ratio", "tau",      "alpha",    "epsilon",
                                  "scorer",          "strategy", "rounding", "seed"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw ConfigError("config: unknown key \"" + key + "\"");
    }

    CompressionConfig cfg;
    if (!j.contains("retention_ratio"))
        throw ConfigError("config: retention_ratio is required");
    cfg.retention_ratio = number_field(j, "retention_ratio");
    if (j.contains("tau"))
        cfg.tau = number_field(j, "tau");
    if (j.contains("alpha"))
        cfg.alpha = number_field(j, "alpha");
    if (j.contains("epsilon"))
        cfg.epsilon = number_field(j, "epsilon");
    if (j.contains("scorer")) {
        if (!j["scorer"].is_string())
            throw ConfigError("config: scorer must be a string");
        cfg.scorer = parse_scorer(j["scorer"].get<std::string>());
    }
    if (j.contains("strategy")) {
        if (!j["strategy"].is_string())
            throw ConfigError("config: strategy must be a string");
        cfg.strategy = parse_strategy(j["strategy"].get<std::string>());
    }
    if (j.contains("rounding")) {
        if (!j["rounding"].is_string())
            throw ConfigError("config: rounding must be a string");
        cfg.rounding = parse_rounding(j["rounding"].get<std::string>());
    }
    if (j.contains("seed")) {
        const auto& v = j["seed"];
        if (v.is_number_unsigned())
            cfg.seed = v.get<std::uint64_t>();
        else if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
            cfg.seed = static_cast<std::uint64_t>(v.get<std::int64_t>());
        else
            throw ConfigError("config: seed must be a non-negative integer");
    }

    cfg.validate();
    return cfg;
}

const char* to_string(Scorer s) {
    switch (s) {
    case Scorer::ClsAttention:
        return "cls_attention";
    case Scorer::NegPatchAttention:
        return "neg_patch_attention";
    case Scorer::NegGlobalMeanSim:
        return "neg_global_mean_sim";
    }
    return "?";
}

const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::Uniform:
        return "uniform";
    case Strategy::TopkMean:
        return "topk_mean";
    case Strategy::SoftmaxMax:
        return "softmax_max";
    case Strategy::SoftmaxSum:
        return "softmax_sum";
    }
    return "?";
}

const char* to_string(Rounding r) {
    return r == Rounding::LargestRemainder ? "largest_remainder" : "nearest";
}

Scorer parse_scorer(const std::string& name) {
    if (name == "cls_attention")
        return Scorer::ClsAttention;
    if (name == "neg_patch_attention")
        return Scorer::NegPatchAttention;
    if (name == "neg_global_mean_sim")
        return Scorer::NegGlobalMeanSim;
    throw ConfigError("config: unknown scorer \"" + name + "\"");
}

Strategy parse_strategy(const std::string& name) {
    if (name == "uniform")
        return Strategy::Uniform;
    if (name == "topk_mean")
        return Strategy::TopkMean;
    if (name == "softmax_max")
        return Strategy::SoftmaxMax;
    if (name == "softmax_sum")
        return Strategy::SoftmaxSum;
    throw ConfigError("config: unknown strategy \"" + name + "\"");
}

Rounding parse_rounding(const std::string& name) {
    if (name == "largest_remainder")
        return Rounding::LargestRemainder;
    if (name == "nearest")
        return Rounding::Nearest;
    throw ConfigError("config: unknown rounding \"" + name + "\"");
}

} // namespace gc2
