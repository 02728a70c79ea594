// Copyright 2026 The sswm Authors
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

#include "sswm/trellis.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "sswm/rng.hpp"

namespace sswm {
namespace {

TrellisCode default_code() { return TrellisCode{}; }

TrellisCode toy_code() {
  TrellisCode code;
  code.constraint_length = 3;
  code.generators = {07, 05};
  return code;
}

// Reference encoder: GF(2) convolution of the data stream (zero padded) with
// each generator's coefficient sequence, MSB of the generator first.
Bits reference_encode(const Bits& data, const TrellisCode& code) {
  const int kk = code.constraint_length;
  std::size_t total = data.size() + static_cast<std::size_t>(code.tail_bits());
  Bits out;
  for (std::size_t t = 0; t < total; ++t) {
    for (std::uint32_t g : code.generators) {
      int acc = 0;
      for (int j = 0; j < kk; ++j) {
        int c = (g >> (kk - 1 - j)) & 1;
        if (c && t >= static_cast<std::size_t>(j) && t - j < data.size()) {
          acc ^= data[t - j];
        }
      }
      out.push_back(static_cast<std::uint8_t>(acc));
    }
  }
  return out;
}

SoftWord bpsk(const Bits& bits) {
  SoftWord out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 1.0 : -1.0;
  return out;
}

Bits random_bits(std::size_t n, Rng& rng) {
  Bits out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
  return out;
}

// Exhaustive maximum-correlation search over all data sequences allowed by
// the mask. Observations are continuous so ties have measure zero.
ViterbiResult brute_force_best(const SoftWord& obs, const TrellisCode& code,
                               const ConstraintMask& mask) {
  std::vector<std::size_t> free_positions;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == BitConstraint::kFree) free_positions.push_back(i);
  }
  Bits data(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    data[i] = mask[i] == BitConstraint::kOne ? 1 : 0;
  }
  ViterbiResult best;
  best.metric = -1e300;
  std::uint64_t combos = 1ULL << free_positions.size();
  for (std::uint64_t m = 0; m < combos; ++m) {
    for (std::size_t j = 0; j < free_positions.size(); ++j) {
      data[free_positions[j]] = static_cast<std::uint8_t>((m >> j) & 1u);
    }
    Bits coded = conv_encode(data, code);
    double metric = 0.0;
    for (std::size_t i = 0; i < coded.size(); ++i) {
      metric += coded[i] ? obs[i] : -obs[i];
    }
    if (metric > best.metric) {
      best.metric = metric;
      best.bits = data;
    }
  }
  return best;
}

TEST(ConvEncode, ImpulseResponseMatchesGeneratorTaps) {
  Bits out = conv_encode({1}, default_code());
  // Interleaved taps of 0171 (1111001) and 0133 (1011011), newest bit first.
  Bits expected = {1, 1, 1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 1};
  EXPECT_EQ(out, expected);
}

TEST(ConvEncode, ZeroInputGivesZeroOutputOfFrozenLength) {
  Bits out = conv_encode(Bits(8, 0), default_code());
  ASSERT_EQ(out.size(), 28u);
  for (auto b : out) EXPECT_EQ(b, 0);
}

TEST(ConvEncode, FrozenLengthForSixtyEightBits) {
  Rng rng(1);
  Bits out = conv_encode(random_bits(68, rng), default_code());
  EXPECT_EQ(out.size(), 148u);
  EXPECT_EQ(default_code().output_length(68), 148u);
}

TEST(ConvEncode, MatchesPolynomialConvolutionOracle) {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t len = 1 + rng.next_below(40);
    Bits data = random_bits(len, rng);
    EXPECT_EQ(conv_encode(data, default_code()),
              reference_encode(data, default_code()));
    EXPECT_EQ(conv_encode(data, toy_code()),
              reference_encode(data, toy_code()));
  }
}

TEST(ConvEncode, IsLinearOverXor) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Bits a = random_bits(30, rng);
    Bits b = random_bits(30, rng);
    Bits axb(30);
    for (int i = 0; i < 30; ++i) axb[i] = a[i] ^ b[i];
    Bits ca = conv_encode(a, default_code());
    Bits cb = conv_encode(b, default_code());
    Bits cab = conv_encode(axb, default_code());
    for (std::size_t i = 0; i < cab.size(); ++i) {
      EXPECT_EQ(cab[i], ca[i] ^ cb[i]);
    }
  }
}

TEST(ConvEncode, RejectsBadInputs) {
  EXPECT_THROW(conv_encode({2}, default_code()), std::invalid_argument);
  TrellisCode bad = default_code();
  bad.generators = {0171};
  EXPECT_THROW(conv_encode({1}, bad), std::invalid_argument);
  bad.generators = {0171, 0171};
  EXPECT_THROW(conv_encode({1}, bad), std::invalid_argument);
  bad.generators = {0171, 0};
  EXPECT_THROW(conv_encode({1}, bad), std::invalid_argument);
  bad.generators = {0171, 0400};
  EXPECT_THROW(conv_encode({1}, bad), std::invalid_argument);
  bad = default_code();
  bad.constraint_length = 1;
  EXPECT_THROW(conv_encode({1}, bad), std::invalid_argument);
}

TEST(ViterbiSoft, RecoversNoiselessDataWithFullMetric) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Bits data = random_bits(64, rng);
    SoftWord obs = bpsk(conv_encode(data, default_code()));
    ConstraintMask mask(64, BitConstraint::kFree);
    ViterbiResult r = viterbi_soft(obs, default_code(), mask);
    EXPECT_EQ(r.bits, data);
    EXPECT_DOUBLE_EQ(r.metric, static_cast<double>(obs.size()));
  }
}

TEST(ViterbiSoft, MatchesExhaustiveSearchOnToyCode) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t len = 1 + rng.next_below(12);
    ConstraintMask mask(len);
    for (auto& c : mask) {
      switch (rng.next_below(3)) {
        case 0: c = BitConstraint::kFree; break;
        case 1: c = BitConstraint::kZero; break;
        default: c = BitConstraint::kOne; break;
      }
    }
    TrellisCode code = toy_code();
    SoftWord obs(code.output_length(len));
    for (auto& o : obs) o = rng.next_gaussian();
    ViterbiResult got = viterbi_soft(obs, code, mask);
    ViterbiResult want = brute_force_best(obs, code, mask);
    EXPECT_EQ(got.bits, want.bits);
    EXPECT_NEAR(got.metric, want.metric, 1e-9);
  }
}

TEST(ViterbiSoft, MatchesExhaustiveSearchOnDefaultCode) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t len = 14;
    ConstraintMask mask(len, BitConstraint::kFree);
    // Force a few positions so constrained transitions get exercised at the
    // production constraint length too.
    mask[2] = BitConstraint::kZero;
    mask[5] = BitConstraint::kOne;
    mask[9] = rng.next_below(2) ? BitConstraint::kOne : BitConstraint::kZero;
    mask[13] = BitConstraint::kZero;
    SoftWord obs(default_code().output_length(len));
    for (auto& o : obs) o = rng.next_gaussian();
    ViterbiResult got = viterbi_soft(obs, default_code(), mask);
    ViterbiResult want = brute_force_best(obs, default_code(), mask);
    EXPECT_EQ(got.bits, want.bits);
    EXPECT_NEAR(got.metric, want.metric, 1e-9);
  }
}

TEST(ViterbiSoft, DecisionInvariantToPositiveScaling) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    ConstraintMask mask(32, BitConstraint::kFree);
    SoftWord obs(default_code().output_length(32));
    for (auto& o : obs) o = rng.next_gaussian();
    SoftWord scaled = obs;
    for (auto& o : scaled) o *= 1000.0;
    ViterbiResult a = viterbi_soft(obs, default_code(), mask);
    ViterbiResult b = viterbi_soft(scaled, default_code(), mask);
    EXPECT_EQ(a.bits, b.bits);
    EXPECT_NEAR(b.metric, 1000.0 * a.metric, 1e-6 * std::abs(b.metric));
  }
}

TEST(ViterbiSoft, FullyForcedMaskReturnsForcedBits) {
  Rng rng(19);
  Bits data = random_bits(24, rng);
  ConstraintMask mask(24);
  for (int i = 0; i < 24; ++i) {
    mask[i] = data[i] ? BitConstraint::kOne : BitConstraint::kZero;
  }
  SoftWord obs(default_code().output_length(24));
  for (auto& o : obs) o = rng.next_gaussian();
  ViterbiResult r = viterbi_soft(obs, default_code(), mask);
  EXPECT_EQ(r.bits, data);
  Bits coded = conv_encode(data, default_code());
  double metric = 0.0;
  for (std::size_t i = 0; i < coded.size(); ++i) {
    metric += coded[i] ? obs[i] : -obs[i];
  }
  EXPECT_NEAR(r.metric, metric, 1e-9);
}

TEST(ViterbiSoft, RejectsBadObservations) {
  ConstraintMask mask(4, BitConstraint::kFree);
  SoftWord short_obs(default_code().output_length(4) - 1, 0.5);
  EXPECT_THROW(viterbi_soft(short_obs, default_code(), mask),
               std::invalid_argument);
  SoftWord nan_obs(default_code().output_length(4), 0.5);
  nan_obs[3] = std::nan("");
  EXPECT_THROW(viterbi_soft(nan_obs, default_code(), mask),
               std::invalid_argument);
}

TEST(PunctureExpand, RoundTripsThroughBothOrders) {
  Rng rng(23);
  SoftWord word(20);
  for (auto& w : word) w = rng.next_gaussian();
  std::vector<std::size_t> positions = {1, 7, 13, 19};

  SoftWord shrunk = puncture(word, positions);
  ASSERT_EQ(shrunk.size(), 16u);
  SoftWord grown = expand(shrunk, positions);
  ASSERT_EQ(grown.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) {
    bool dropped = i == 1 || i == 7 || i == 13 || i == 19;
    EXPECT_DOUBLE_EQ(grown[i], dropped ? 0.0 : word[i]);
  }
  EXPECT_EQ(puncture(grown, positions), shrunk);
}

TEST(PunctureExpand, RejectsBadPositions) {
  SoftWord word(8, 1.0);
  EXPECT_THROW(puncture(word, {3, 3}), std::invalid_argument);
  EXPECT_THROW(puncture(word, {5, 2}), std::invalid_argument);
  EXPECT_THROW(puncture(word, {8}), std::invalid_argument);
  EXPECT_THROW(expand(word, {10}), std::invalid_argument);
  EXPECT_NO_THROW(expand(word, {8}));
}

}  // namespace
}  // namespace sswm
