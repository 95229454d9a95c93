// Copyright (C) 2026 globalcom2 contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace gc2 {

// SplitMix64: tiny, fast, and identical on every platform, which is what the
// fixture generator needs (std::mt19937 distributions are not portable).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : m_state(seed) {}

    std::uint64_t next_u64() {
        m_state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = m_state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t m_state;
};

} // namespace gc2
