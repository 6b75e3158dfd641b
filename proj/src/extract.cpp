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

#include "qsteer/extract.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "qsteer/errors.hpp"
#include "qsteer/numerics.hpp"

namespace qsteer {

const char* to_string(BitStream::Origin origin) {
    switch (origin) {
        case BitStream::Origin::Raw: return "raw";
        case BitStream::Origin::Extracted: return "extracted";
        case BitStream::Origin::Seed: return "seed";
    }
    return "unknown";
}

BitStream digitize(std::span<const double> samples, const BinningScheme& scheme) {
    scheme.validate();
    const unsigned outcomes = static_cast<unsigned>(scheme.bob_outcomes);
    if (!std::has_single_bit(outcomes))
        throw ValidationError("digitize: outcome count must be a power of two");
    const int width = std::countr_zero(outcomes);

    BitStream out;
    out.origin = BitStream::Origin::Raw;
    out.bytes.reserve(samples.size() * width / 8 + 1);
    for (double z : samples) {
        const int idx = periodic_bin_index(z, scheme.period, scheme.bob_outcomes);
        out.push_bits(static_cast<std::uint32_t>(idx), width);
    }
    return out;
}

ExtractionPlan plan_extraction(double h_min, int bits_per_sample, std::size_t m,
                               std::size_t rounding, double security_epsilon) {
    if (!(h_min > 0.0)) throw ValidationError("plan_extraction: cannot extract with h_min <= 0");
    if (bits_per_sample < 1) throw ValidationError("plan_extraction: bits_per_sample must be >= 1");
    if (m < 1) throw ValidationError("plan_extraction: output block must be >= 1 bit");
    if (rounding < 1) rounding = 1;

    double budget = static_cast<double>(m);
    if (security_epsilon > 0.0) budget += 2.0 * std::log2(1.0 / security_epsilon);
    const double exact = static_cast<double>(bits_per_sample) * budget / h_min;
    std::size_t n = static_cast<std::size_t>(std::ceil(exact));
    n = (n + rounding - 1) / rounding * rounding;

    ExtractionPlan plan;
    plan.block_input_bits = n;
    plan.block_output_bits = m;
    plan.h_min = h_min;
    plan.bits_per_sample = bits_per_sample;
    return plan;
}

namespace {

void check_plan(const BitStream& seed, const ExtractionPlan& plan) {
    if (plan.block_input_bits < plan.block_output_bits)
        throw ValidationError("toeplitz: n < m makes no extraction sense");
    if (seed.bit_count != plan.seed_length())
        throw ValidationError("toeplitz: seed length must be exactly n + m - 1");
}

// Bits [offset, offset + count) packed LSB-first into 64-bit words, with two
// zero guard words for unaligned window reads.
std::vector<std::uint64_t> pack_lsb(const BitStream& bits, std::size_t offset,
                                    std::size_t count) {
    std::vector<std::uint64_t> words(count / 64 + 3, 0);
    for (std::size_t i = 0; i < count; ++i) {
        if (bits.bit(offset + i)) words[i >> 6] |= (1ULL << (i & 63));
    }
    return words;
}

}  // namespace

BitStream toeplitz_block_naive(const BitStream& raw, std::size_t raw_offset,
                               const BitStream& seed, const ExtractionPlan& plan) {
    check_plan(seed, plan);
    const std::size_t n = plan.block_input_bits;
    const std::size_t m = plan.block_output_bits;
    BitStream out;
    out.origin = BitStream::Origin::Extracted;
    for (std::size_t i = 0; i < m; ++i) {
        bool acc = false;
        for (std::size_t j = 0; j < n; ++j) {
            acc ^= seed.bit(i + n - 1 - j) && raw.bit(raw_offset + j);
        }
        out.push_bit(acc);
    }
    return out;
}

namespace {

// Column accumulation against a prepacked seed:
// y[0..m) ^= seed[n-1-j .. n-1-j+m) for every set raw bit j.
BitStream fast_block(const BitStream& raw, std::size_t raw_offset,
                     const std::vector<std::uint64_t>& seed_words,
                     const ExtractionPlan& plan) {
    const std::size_t n = plan.block_input_bits;
    const std::size_t m = plan.block_output_bits;
    const std::vector<std::uint64_t> raw_words = pack_lsb(raw, raw_offset, n);
    const std::size_t out_words = m / 64 + 2;
    std::vector<std::uint64_t> acc(out_words, 0);

    for (std::size_t w = 0; w * 64 < n; ++w) {
        std::uint64_t bits = raw_words[w];
        while (bits) {
            const int t = std::countr_zero(bits);
            bits &= bits - 1;
            const std::size_t j = w * 64 + static_cast<std::size_t>(t);
            const std::size_t off = n - 1 - j;
            const std::size_t q = off >> 6;
            const int r = static_cast<int>(off & 63);
            if (r == 0) {
                for (std::size_t k = 0; k < out_words; ++k) acc[k] ^= seed_words[q + k];
            } else {
                for (std::size_t k = 0; k < out_words; ++k)
                    acc[k] ^= (seed_words[q + k] >> r) | (seed_words[q + k + 1] << (64 - r));
            }
        }
    }

    BitStream out;
    out.origin = BitStream::Origin::Extracted;
    for (std::size_t i = 0; i < m; ++i)
        out.push_bit((acc[i >> 6] >> (i & 63)) & 1ULL);
    return out;
}

}  // namespace

BitStream toeplitz_block_fast(const BitStream& raw, std::size_t raw_offset,
                              const BitStream& seed, const ExtractionPlan& plan) {
    check_plan(seed, plan);
    return fast_block(raw, raw_offset, pack_lsb(seed, 0, seed.bit_count), plan);
}

ExtractionOutcome toeplitz_extract(const BitStream& raw, const BitStream& seed,
                                   const ExtractionPlan& plan, bool fast) {
    check_plan(seed, plan);
    const std::size_t n = plan.block_input_bits;
    ExtractionOutcome outcome;
    outcome.bits.origin = BitStream::Origin::Extracted;
    outcome.blocks = raw.bit_count / n;
    outcome.discarded_bits = raw.bit_count - outcome.blocks * n;
    const std::vector<std::uint64_t> seed_words =
        fast ? pack_lsb(seed, 0, seed.bit_count) : std::vector<std::uint64_t>{};
    for (std::size_t blk = 0; blk < outcome.blocks; ++blk) {
        BitStream piece = fast ? fast_block(raw, blk * n, seed_words, plan)
                               : toeplitz_block_naive(raw, blk * n, seed, plan);
        outcome.bits.append(piece);
    }
    return outcome;
}

BitStream pseudo_random_bits(std::size_t count, std::uint64_t seed) {
    GaussianSampler g(seed);
    BitStream out;
    out.origin = BitStream::Origin::Seed;
    out.bytes.reserve(count / 8 + 1);
    std::uint64_t word = 0;
    int have = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (have == 0) {
            word = g.next_u64();
            have = 64;
        }
        out.push_bit(word & 1ULL);
        word >>= 1;
        --have;
    }
    return out;
}

BitStream os_random_bits(std::size_t count) {
    std::random_device rd;
    BitStream out;
    out.origin = BitStream::Origin::Seed;
    std::uint32_t word = 0;
    int have = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (have == 0) {
            word = rd();
            have = 32;
        }
        out.push_bit(word & 1u);
        word >>= 1;
        --have;
    }
    return out;
}

void save_bitstream(const BitStream& bits, const std::filesystem::path& base_path) {
    std::filesystem::path bin = base_path;
    bin += ".bits";
    std::ofstream f(bin, std::ios::binary);
    if (!f) throw ValidationError("save_bitstream: cannot open " + bin.string());
    f.write(reinterpret_cast<const char*>(bits.bytes.data()),
            static_cast<std::streamsize>(bits.bytes.size()));
    nlohmann::json side = {
        {"bit_count", bits.bit_count},
        {"origin", to_string(bits.origin)},
        {"byte_order", "little-endian"},
        {"bit_order", "msb-first"},
    };
    std::filesystem::path meta = base_path;
    meta += ".json";
    std::ofstream mf(meta);
    mf << side.dump(2) << "\n";
}

BitStream load_bitstream(const std::filesystem::path& base_path) {
    std::filesystem::path meta = base_path;
    meta += ".json";
    std::ifstream mf(meta);
    if (!mf) throw ValidationError("load_bitstream: cannot open " + meta.string());
    nlohmann::json side = nlohmann::json::parse(mf);

    BitStream out;
    out.bit_count = side.at("bit_count").get<std::size_t>();
    std::string origin = side.value("origin", "raw");
    out.origin = origin == "extracted" ? BitStream::Origin::Extracted
                : origin == "seed"     ? BitStream::Origin::Seed
                                       : BitStream::Origin::Raw;
    std::filesystem::path bin = base_path;
    bin += ".bits";
    std::ifstream f(bin, std::ios::binary);
    if (!f) throw ValidationError("load_bitstream: cannot open " + bin.string());
    out.bytes.assign((out.bit_count + 7) / 8, 0);
    f.read(reinterpret_cast<char*>(out.bytes.data()),
           static_cast<std::streamsize>(out.bytes.size()));
    if (!f) throw ValidationError("load_bitstream: truncated payload " + bin.string());
    return out;
}

}  // namespace qsteer
