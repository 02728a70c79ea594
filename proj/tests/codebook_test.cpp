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

#include "sswm/codebook.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "sswm/rng.hpp"

namespace sswm {
namespace {

constexpr double kPi = 3.14159265358979323846;

Bits random_bits(std::size_t n, Rng& rng) {
  Bits out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
  return out;
}

// Codeword for an explicit (message, index, pad=0) data assignment.
std::vector<double> codeword_for(const Bits& message, const Bits& index_bits,
                                 const CodebookSpec& spec) {
  Bits data(static_cast<std::size_t>(spec.data_bits()), 0);
  for (std::size_t j = 0; j < message.size(); ++j) {
    data[spec.message_positions[j]] = message[j];
  }
  std::size_t next_index = 0;
  std::vector<bool> is_message(data.size(), false);
  for (std::size_t p : spec.message_positions) is_message[p] = true;
  for (int p = 0; p < spec.message_bits + spec.index_bits; ++p) {
    if (!is_message[static_cast<std::size_t>(p)]) {
      data[static_cast<std::size_t>(p)] = index_bits[next_index++];
    }
  }
  Bits coded = conv_encode(data, spec.code);
  Bits kept = puncture(coded, spec.punctured_positions);
  std::vector<double> u(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) u[j] = kept[j] ? 1.0 : -1.0;
  return u;
}

TEST(IndexBitCount, FrozenValueAndClamps) {
  EXPECT_EQ(index_bit_count(1.0, 4.0, 1.0, 10), 5);
  EXPECT_EQ(index_bit_count(1.0, 0.0, 1.0, 10), 0);
  EXPECT_EQ(index_bit_count(1.0, 1e9, 1.0, 10, 4), 6);
  EXPECT_EQ(index_bit_count(1.0, 4.0, 1.0, 10, 10), 0);
}

TEST(IndexBitCount, RejectsBadPowers) {
  EXPECT_THROW(index_bit_count(0.0, 1.0, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(index_bit_count(1.0, -1.0, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(index_bit_count(1.0, 1.0, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(index_bit_count(1.0, 1.0, 1.0, 10, 11), std::invalid_argument);
  EXPECT_THROW(index_bit_count(1.0, 1.0, 1.0, 0), std::invalid_argument);
}

TEST(ConeAngle, FrozenValues) {
  EXPECT_NEAR(cone_angle(3, 2, 10), kPi / 4.0, 1e-12);
  EXPECT_NEAR(cone_angle(6, 4, 10), kPi / 6.0, 1e-12);
  EXPECT_GT(cone_angle(3, 1, 10), cone_angle(3, 2, 10));
  EXPECT_THROW(cone_angle(8, 3, 10), std::invalid_argument);
  EXPECT_THROW(cone_angle(0, 0, 10), std::invalid_argument);
}

TEST(CodebookSpec, FrozenLayoutForProductionShape) {
  CodebookSpec spec = make_codebook_spec(64, 0, 132, TrellisCode{});
  EXPECT_EQ(spec.pad_bits, 0);
  EXPECT_EQ(spec.data_bits(), 64);
  EXPECT_EQ(spec.expanded_length(), 140u);
  ASSERT_EQ(spec.punctured_positions.size(), 8u);
  std::vector<std::size_t> expected = {8, 26, 43, 61, 78, 96, 113, 131};
  EXPECT_EQ(spec.punctured_positions, expected);
  EXPECT_EQ(default_codeword_length(64, TrellisCode{}), 132);
  for (std::size_t j = 0; j < 64; ++j) {
    EXPECT_EQ(spec.message_positions[j], j);
  }
}

TEST(CodebookSpec, PadsWhenCodewordLongerThanCodedData) {
  CodebookSpec spec = make_codebook_spec(64, 0, 162, TrellisCode{});
  EXPECT_EQ(spec.pad_bits, 11);
  EXPECT_EQ(spec.expanded_length(), 162u);
  EXPECT_TRUE(spec.punctured_positions.empty());
}

TEST(CodebookSpec, MessagePositionsInterleaveWithIndexBits) {
  CodebookSpec spec = make_codebook_spec(4, 3, 20, TrellisCode{});
  std::vector<std::size_t> expected = {0, 1, 3, 5};
  EXPECT_EQ(spec.message_positions, expected);
  for (std::size_t j = 1; j < spec.punctured_positions.size(); ++j) {
    EXPECT_LT(spec.punctured_positions[j - 1], spec.punctured_positions[j]);
  }
  EXPECT_LT(spec.punctured_positions.back(), spec.expanded_length());
}

TEST(CodebookSpec, RejectsBadShapes) {
  EXPECT_THROW(make_codebook_spec(0, 0, 10, TrellisCode{}),
               std::invalid_argument);
  EXPECT_THROW(make_codebook_spec(4, -1, 10, TrellisCode{}),
               std::invalid_argument);
  EXPECT_THROW(make_codebook_spec(8, 4, 10, TrellisCode{}),
               std::invalid_argument);
}

TEST(Codebook, CodewordsAreAntipodalWithNormSqrtN) {
  Rng rng(31);
  CodebookSpec spec = make_codebook_spec(16, 4, 48, TrellisCode{});
  std::vector<double> obs(48);
  for (auto& o : obs) o = rng.next_gaussian();
  DecodeResult r = nearest_any(obs, spec);
  ASSERT_EQ(r.codeword.size(), 48u);
  double norm2 = 0.0;
  for (double u : r.codeword) {
    EXPECT_TRUE(u == 1.0 || u == -1.0);
    norm2 += u * u;
  }
  EXPECT_DOUBLE_EQ(norm2, 48.0);
}

TEST(Codebook, NoiselessRoundTripRecoversCodewordExactly) {
  Rng rng(37);
  CodebookSpec spec = make_codebook_spec(24, 6, 72, TrellisCode{});
  for (int trial = 0; trial < 20; ++trial) {
    Bits message = random_bits(24, rng);
    Bits index = random_bits(6, rng);
    std::vector<double> u = codeword_for(message, index, spec);
    DecodeResult r = nearest_in_subcodebook(u, message, spec);
    EXPECT_EQ(r.message, message);
    EXPECT_EQ(r.codeword, u);
    EXPECT_DOUBLE_EQ(r.metric, 72.0);
  }
}

TEST(Codebook, SubcodebookSearchMatchesExhaustiveEnumeration) {
  Rng rng(41);
  CodebookSpec spec = make_codebook_spec(4, 3, 20, TrellisCode{});
  for (int trial = 0; trial < 100; ++trial) {
    Bits message = random_bits(4, rng);
    std::vector<double> x_st(20);
    for (auto& x : x_st) x = rng.next_gaussian();

    double best = -1e300;
    std::vector<double> best_u;
    for (std::uint32_t m = 0; m < 8; ++m) {
      Bits index = {static_cast<std::uint8_t>(m & 1),
                    static_cast<std::uint8_t>((m >> 1) & 1),
                    static_cast<std::uint8_t>((m >> 2) & 1)};
      std::vector<double> u = codeword_for(message, index, spec);
      double corr = 0.0;
      for (int j = 0; j < 20; ++j) corr += u[j] * x_st[j];
      if (corr > best) {
        best = corr;
        best_u = u;
      }
    }
    DecodeResult r = nearest_in_subcodebook(x_st, message, spec);
    EXPECT_EQ(r.message, message);
    EXPECT_EQ(r.codeword, best_u);
    EXPECT_NEAR(r.metric, best, 1e-9);
  }
}

TEST(Codebook, FullSearchMatchesExhaustiveEnumeration) {
  Rng rng(43);
  CodebookSpec spec = make_codebook_spec(4, 3, 20, TrellisCode{});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y_st(20);
    for (auto& y : y_st) y = rng.next_gaussian();

    double best = -1e300;
    Bits best_message;
    for (std::uint32_t w = 0; w < 128; ++w) {
      Bits message = {static_cast<std::uint8_t>(w & 1),
                      static_cast<std::uint8_t>((w >> 1) & 1),
                      static_cast<std::uint8_t>((w >> 2) & 1),
                      static_cast<std::uint8_t>((w >> 3) & 1)};
      Bits index = {static_cast<std::uint8_t>((w >> 4) & 1),
                    static_cast<std::uint8_t>((w >> 5) & 1),
                    static_cast<std::uint8_t>((w >> 6) & 1)};
      std::vector<double> u = codeword_for(message, index, spec);
      double corr = 0.0;
      for (int j = 0; j < 20; ++j) corr += u[j] * y_st[j];
      if (corr > best) {
        best = corr;
        best_message = message;
      }
    }
    DecodeResult r = nearest_any(y_st, spec);
    EXPECT_EQ(r.message, best_message);
    EXPECT_NEAR(r.metric, best, 1e-9);
  }
}

TEST(Codebook, DecodeIsDeterministic) {
  Rng rng(47);
  CodebookSpec spec = make_codebook_spec(16, 4, 48, TrellisCode{});
  std::vector<double> obs(48);
  for (auto& o : obs) o = rng.next_gaussian();
  DecodeResult a = nearest_any(obs, spec);
  DecodeResult b = nearest_any(obs, spec);
  EXPECT_EQ(a.message, b.message);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.codeword, b.codeword);
  EXPECT_DOUBLE_EQ(a.metric, b.metric);
}

TEST(Codebook, RejectsMismatchedInputs) {
  CodebookSpec spec = make_codebook_spec(8, 2, 24, TrellisCode{});
  std::vector<double> obs(23, 0.0);
  EXPECT_THROW(nearest_any(obs, spec), std::invalid_argument);
  obs.resize(24, 0.0);
  EXPECT_THROW(nearest_in_subcodebook(obs, Bits(7, 0), spec),
               std::invalid_argument);
  EXPECT_THROW(nearest_in_subcodebook(obs, Bits{2, 0, 0, 0, 0, 0, 0, 0}, spec),
               std::invalid_argument);
}

}  // namespace
}  // namespace sswm
