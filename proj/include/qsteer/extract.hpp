// Copyright 2026 The Qsteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qsteer/coarse_grain.hpp"

namespace qsteer {

/// Packed bit sequence. Storage is byte-oriented, MSB first within each
/// byte, matching the on-disk format.
struct BitStream {
    enum class Origin { Raw, Extracted, Seed };

    std::vector<std::uint8_t> bytes;
    std::size_t bit_count = 0;
    Origin origin = Origin::Raw;

    bool bit(std::size_t i) const { return (bytes[i >> 3] >> (7 - (i & 7))) & 1u; }

    void push_bit(bool v) {
        if ((bit_count & 7) == 0) bytes.push_back(0);
        if (v) bytes.back() |= static_cast<std::uint8_t>(0x80u >> (bit_count & 7));
        ++bit_count;
    }

    /// Appends `width` bits of `value`, most significant first.
    void push_bits(std::uint32_t value, int width) {
        for (int k = width - 1; k >= 0; --k) push_bit((value >> k) & 1u);
    }

    void append(const BitStream& other) {
        for (std::size_t i = 0; i < other.bit_count; ++i) push_bit(other.bit(i));
    }
};

const char* to_string(BitStream::Origin origin);

/// Toeplitz extraction geometry: n input bits and m output bits per block,
/// seed of exactly n + m - 1 bits.
struct ExtractionPlan {
    std::size_t block_input_bits = 0;   // n
    std::size_t block_output_bits = 0;  // m
    double h_min = 0.0;
    int bits_per_sample = 0;

    std::size_t seed_length() const { return block_input_bits + block_output_bits - 1; }
};

/// Maps each sample to its periodic bin index and emits log2(outcomes) bits
/// per sample, natural binary, MSB first. Requires a power-of-two outcome
/// count.
BitStream digitize(std::span<const double> samples, const BinningScheme& scheme);

/// n = ceil(bits_per_sample * m / h_min), rounded up to the next multiple of
/// `rounding`. A positive `security_epsilon` adds the leftover-hash penalty
/// 2 log2(1/eps) to the output budget before sizing; the default keeps the
/// bare inequality.
ExtractionPlan plan_extraction(double h_min, int bits_per_sample, std::size_t m,
                               std::size_t rounding = 100, double security_epsilon = 0.0);

struct ExtractionOutcome {
    BitStream bits;
    std::size_t blocks = 0;
    std::size_t discarded_bits = 0;  // trailing partial block, never padded
};

/// Applies the seeded Toeplitz matrix T_{i,j} = seed[i - j + n - 1] per
/// n-bit block, concatenating the m-bit outputs. The word-packed fast path
/// and the naive GF(2) matrix-vector path produce identical bits.
ExtractionOutcome toeplitz_extract(const BitStream& raw, const BitStream& seed,
                                   const ExtractionPlan& plan, bool fast = true);

/// Single-block reference path, exposed for the equivalence tests.
BitStream toeplitz_block_naive(const BitStream& raw, std::size_t raw_offset,
                               const BitStream& seed, const ExtractionPlan& plan);
BitStream toeplitz_block_fast(const BitStream& raw, std::size_t raw_offset,
                              const BitStream& seed, const ExtractionPlan& plan);

/// Deterministic pseudo-random bits (xoshiro-based); the extractor's
/// guarantees assume a uniform seed regardless of its origin.
BitStream pseudo_random_bits(std::size_t count, std::uint64_t seed);

/// Bits from the operating system entropy source.
BitStream os_random_bits(std::size_t count);

/// Bitstream files: packed bytes plus a JSON sidecar with length and origin.
void save_bitstream(const BitStream& bits, const std::filesystem::path& base_path);
BitStream load_bitstream(const std::filesystem::path& base_path);

}  // namespace qsteer
