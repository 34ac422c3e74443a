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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twqkd/postproc.hpp"

using namespace twqkd;

namespace {

Bits random_bits(std::size_t n, Rng& rng) {
    Bits b(n);
    for (auto& x : b) x = rng.bit();
    return b;
}

Bits xor_bits(const Bits& a, const Bits& b) {
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

} // namespace

TEST(Hash, MatchesExplicitToeplitzProduct) {
    Rng rng(1);
    for (auto [m, k] : {std::pair<std::size_t, std::size_t>{1, 1}, {8, 3}, {64, 32}, {200, 17}}) {
        for (int t = 0; t < 20; ++t) {
            const auto spec = random_hash_spec(m, k, rng);
            const auto x = random_bits(m, rng);
            ASSERT_EQ(universal_hash(x, spec), oracle::toeplitz_hash(x, spec.seed_bits, k));
        }
    }
}

TEST(Hash, HandWorkedExample) {
    // m = 3, k = 2, seed = s0..s3 = 1,0,1,1.
    // T = [[s2 s1 s0], [s3 s2 s1]] = [[1 0 1], [1 1 0]]; x = 1,1,0 -> (1, 0).
    const HashSpec spec{3, 2, {1, 0, 1, 1}};
    EXPECT_EQ(universal_hash(Bits{1, 1, 0}, spec), (Bits{1, 0}));
}

TEST(Hash, ZeroOutputAndZeroSeed) {
    const HashSpec none{10, 0, {}};
    EXPECT_TRUE(universal_hash(Bits(10, 1), none).empty());
    const HashSpec zero{10, 4, Bits(13, 0)};
    EXPECT_EQ(universal_hash(Bits(10, 1), zero), Bits(4, 0));
}

TEST(Hash, RejectsBadSpecs) {
    EXPECT_THROW((HashSpec{4, 5, Bits(8, 0)}.validate()), std::invalid_argument);
    EXPECT_THROW((HashSpec{4, 2, Bits(4, 0)}.validate()), std::invalid_argument);
    EXPECT_THROW(universal_hash(Bits(3, 0), HashSpec{4, 2, Bits(5, 0)}), std::invalid_argument);
}

TEST(Hash, Linear) {
    Rng rng(2);
    for (int t = 0; t < 500; ++t) {
        const auto spec = random_hash_spec(48, 20, rng);
        const auto x = random_bits(48, rng), y = random_bits(48, rng);
        ASSERT_EQ(universal_hash(xor_bits(x, y), spec), xor_bits(universal_hash(x, spec), universal_hash(y, spec)));
    }
}

TEST(Hash, Deterministic) {
    Rng a(3), b(3);
    const auto sa = random_hash_spec(100, 40, a), sb = random_hash_spec(100, 40, b);
    EXPECT_EQ(sa.seed_bits, sb.seed_bits);
}

TEST(OutputLength, Examples) {
    EXPECT_EQ(choose_output_length(0, 0.0, 32), 0u);
    EXPECT_EQ(choose_output_length(1000, 0.0, 10), 990u);
    EXPECT_EQ(choose_output_length(1000, 0.5, 10), 490u);
    EXPECT_EQ(choose_output_length(1000, 1.0, 10), 0u);
    EXPECT_EQ(choose_output_length(20, 0.0, 32), 0u);
    EXPECT_THROW(choose_output_length(10, 1.5, 0), std::domain_error);
}

TEST(OutputLength, MonotoneInEveInfo) {
    std::size_t prev = choose_output_length(5000, 0.0, kDefaultSafetyBits);
    for (int i = 1; i <= 100; ++i) {
        const std::size_t k = choose_output_length(5000, i / 100.0, kDefaultSafetyBits);
        EXPECT_LE(k, prev);
        prev = k;
    }
}

TEST(PrivacyAmplification, Lengths) {
    Rng rng(4);
    const auto key = random_bits(2000, rng);
    const auto r = privacy_amplify(key, 0.25, kDefaultSafetyBits, rng);
    EXPECT_FALSE(r.abort_reason);
    EXPECT_EQ(r.secret_key.size(), 1500u - kDefaultSafetyBits);
    EXPECT_EQ(r.secret_key, universal_hash(key, r.spec));

    const auto dead = privacy_amplify(key, 1.0, kDefaultSafetyBits, rng);
    EXPECT_EQ(dead.abort_reason, "no-extractable-privacy");
    EXPECT_TRUE(dead.secret_key.empty());
}

TEST(ErrorCheck, Outcomes) {
    Rng rng(5);
    const auto a = random_bits(500, rng);
    EXPECT_TRUE(ec_verify(a, a, 64, rng).agreed);
    auto b = a;
    b[17] ^= 1;
    const auto r = ec_verify(a, b, 64, rng);
    EXPECT_FALSE(r.agreed);
    EXPECT_EQ(r.reason, "hash-mismatch");
    EXPECT_EQ(ec_verify(Bits{}, Bits{}, 64, rng).reason, "empty-key");
    EXPECT_THROW(ec_verify(a, Bits(3, 0), 64, rng), std::invalid_argument);
}

TEST(Hex, Examples) {
    EXPECT_EQ(to_hex(Bits{}), "0:");
    EXPECT_EQ(to_hex(Bits{1, 0, 1, 0}), "4:a");
    EXPECT_EQ(to_hex(Bits{1}), "1:8");
    EXPECT_EQ(to_hex(Bits{0, 0, 0, 1, 1}), "5:18");
    EXPECT_THROW(from_hex("4:aa"), std::invalid_argument);
    EXPECT_THROW(from_hex("1:c"), std::invalid_argument);
    EXPECT_THROW(from_hex("abc"), std::invalid_argument);
    EXPECT_THROW(from_hex("4:g"), std::invalid_argument);
    EXPECT_EQ(from_hex("4:A"), (Bits{1, 0, 1, 0}));
}

TEST(Hex, RoundTrip) {
    Rng rng(6);
    for (std::size_t n = 0; n < 300; ++n) {
        const auto b = random_bits(n, rng);
        ASSERT_EQ(from_hex(to_hex(b)), b) << n;
    }
}
