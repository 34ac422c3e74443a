// Copyright 2026 The twqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Classical post-processing: hash-based key verification and privacy
// amplification with Toeplitz (diagonal-constant) binary matrices.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twqkd/adversary.hpp"
#include "twqkd/rng.hpp"

namespace twqkd {

inline constexpr std::size_t kDefaultSafetyBits = 32;

/// Toeplitz matrix T (k x m) with T[i][j] = seed_bits[i - j + m - 1].
/// The seed is the whole description of the hash sent to the peer.
struct HashSpec {
    std::size_t input_len = 0;
    std::size_t output_len = 0;
    Bits seed_bits;

    void validate() const {
        if (output_len > input_len) throw std::invalid_argument("HashSpec: output longer than input");
        const std::size_t want = input_len + output_len == 0 ? 0 : input_len + output_len - 1;
        if (output_len > 0 && seed_bits.size() != want) {
            throw std::invalid_argument("HashSpec: seed must have m + k - 1 bits");
        }
    }
};

inline HashSpec random_hash_spec(std::size_t m, std::size_t k, Rng& rng) {
    HashSpec spec{m, k, {}};
    if (k > 0) {
        spec.seed_bits.resize(m + k - 1);
        for (auto& b : spec.seed_bits) b = rng.bit();
    }
    spec.validate();
    return spec;
}

inline Bits universal_hash(std::span<const Bit> x, const HashSpec& spec) {
    spec.validate();
    if (x.size() != spec.input_len) throw std::invalid_argument("universal_hash: input length mismatch");
    const std::size_t m = spec.input_len;
    Bits out(spec.output_len, 0);
    // Row i reads seed[i + m - 1 - j] against x[j].
    for (std::size_t i = 0; i < spec.output_len; ++i) {
        const Bit* row_end = spec.seed_bits.data() + i + m - 1;
        unsigned acc = 0;
        for (std::size_t j = 0; j < m; ++j) acc ^= *(row_end - j) & x[j];
        out[i] = static_cast<Bit>(acc & 1u);
    }
    return out;
}

inline bool verify(std::span<const Bit> fx, std::span<const Bit> fy) {
    if (fx.size() != fy.size()) throw std::invalid_argument("verify: length mismatch");
    for (std::size_t i = 0; i < fx.size(); ++i) {
        if (fx[i] != fy[i]) return false;
    }
    return true;
}

struct EcResult {
    bool agreed = false;
    std::optional<std::string> reason;
};

/// Hash check of the two raw keys with a fresh check_len-bit hash.
/// Reconciliation itself is not performed.
inline EcResult ec_verify(std::span<const Bit> alice_key, std::span<const Bit> bob_key,
                          std::size_t check_len, Rng& rng) {
    if (alice_key.size() != bob_key.size()) throw std::invalid_argument("ec_verify: key length mismatch");
    if (alice_key.empty()) return {false, "empty-key"};
    const std::size_t k = std::min(check_len, alice_key.size());
    const HashSpec spec = random_hash_spec(alice_key.size(), k, rng);
    const bool ok = verify(universal_hash(alice_key, spec), universal_hash(bob_key, spec));
    if (!ok) return {false, "hash-mismatch"};
    return {true, std::nullopt};
}

/// k = max(0, floor(m (1 - eve_info)) - safety). With eve_info = 1 nothing
/// can be extracted whatever m is.
inline std::size_t choose_output_length(std::size_t m, double eve_info, std::size_t safety) {
    if (!(eve_info >= 0.0 && eve_info <= 1.0)) {
        throw std::domain_error("choose_output_length: eve_info must lie in [0, 1]");
    }
    const double kept = std::floor(static_cast<double>(m) * (1.0 - eve_info));
    const auto k = static_cast<std::size_t>(kept);
    return k > safety ? k - safety : 0;
}

struct PaResult {
    Bits secret_key;
    HashSpec spec;
    std::optional<std::string> abort_reason;
};

inline PaResult privacy_amplify(std::span<const Bit> key, double eve_info, std::size_t safety, Rng& rng) {
    const std::size_t k = choose_output_length(key.size(), eve_info, safety);
    PaResult r{{}, random_hash_spec(key.size(), k, rng), std::nullopt};
    if (k == 0) {
        r.abort_reason = "no-extractable-privacy";
        return r;
    }
    r.secret_key = universal_hash(key, r.spec);
    return r;
}

// --- serialization ----------------------------------------------------------

/// "<bit-length>:<hex>", bits packed most-significant first, zero padded.
inline std::string to_hex(std::span<const Bit> bits) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = std::to_string(bits.size());
    out.push_back(':');
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        unsigned nib = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            nib <<= 1;
            if (i + j < bits.size()) nib |= bits[i + j] & 1u;
        }
        out.push_back(kDigits[nib]);
    }
    return out;
}

inline Bits from_hex(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0) throw std::invalid_argument("from_hex: missing length prefix");
    std::size_t n = 0;
    for (char c : s.substr(0, colon)) {
        if (c < '0' || c > '9') throw std::invalid_argument("from_hex: bad length prefix");
        n = n * 10 + static_cast<std::size_t>(c - '0');
    }
    const auto hex = s.substr(colon + 1);
    if (hex.size() != (n + 3) / 4) throw std::invalid_argument("from_hex: digit count does not match length");
    Bits out;
    out.reserve(n);
    for (char c : hex) {
        unsigned v;
        if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
        else throw std::invalid_argument("from_hex: bad digit");
        for (int j = 3; j >= 0; --j) {
            if (out.size() < n) out.push_back(static_cast<Bit>((v >> j) & 1u));
            else if ((v >> j) & 1u) throw std::invalid_argument("from_hex: nonzero padding");
        }
    }
    return out;
}

} // namespace twqkd
