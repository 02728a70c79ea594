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

#ifndef SSWM_TRELLIS_HPP_
#define SSWM_TRELLIS_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sswm {

using Bits = std::vector<std::uint8_t>;
using SoftWord = std::vector<double>;

enum class BitConstraint : std::uint8_t { kFree, kZero, kOne };

using ConstraintMask = std::vector<BitConstraint>;

// Binary convolutional code. Generators are taps over the shift register,
// newest input bit at the most significant position, so the conventional
// octal forms (0171, 0133 for constraint length 7) read MSB first.
struct TrellisCode {
  int constraint_length = 7;
  std::vector<std::uint32_t> generators = {0171, 0133};
  bool zero_tail = true;

  int rate_inverse() const { return static_cast<int>(generators.size()); }
  int state_count() const { return 1 << (constraint_length - 1); }
  int tail_bits() const { return zero_tail ? constraint_length - 1 : 0; }

  std::size_t output_length(std::size_t data_len) const {
    return (data_len + static_cast<std::size_t>(tail_bits())) *
           static_cast<std::size_t>(rate_inverse());
  }

  void validate() const {
    if (constraint_length < 2 || constraint_length > 16) {
      throw std::invalid_argument("trellis: constraint length out of range");
    }
    if (generators.size() < 2) {
      throw std::invalid_argument("trellis: need at least two generators");
    }
    std::uint32_t limit = 1u << constraint_length;
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (generators[i] == 0 || generators[i] >= limit) {
        throw std::invalid_argument("trellis: generator out of range");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (generators[j] == generators[i]) {
          throw std::invalid_argument("trellis: duplicate generator");
        }
      }
    }
  }
};

inline Bits conv_encode(const Bits& data, const TrellisCode& code) {
  code.validate();
  for (std::uint8_t b : data) {
    if (b > 1) throw std::invalid_argument("conv_encode: data bit not 0/1");
  }
  const int kk = code.constraint_length;
  Bits out;
  out.reserve(code.output_length(data.size()));
  std::uint32_t reg = 0;
  std::size_t total = data.size() + static_cast<std::size_t>(code.tail_bits());
  for (std::size_t t = 0; t < total; ++t) {
    std::uint32_t bit = t < data.size() ? data[t] : 0;
    reg = (reg >> 1) | (bit << (kk - 1));
    for (std::uint32_t g : code.generators) {
      out.push_back(static_cast<std::uint8_t>(std::popcount(reg & g) & 1u));
    }
  }
  return out;
}

struct ViterbiResult {
  Bits bits;
  double metric = 0.0;
};

// Maximum-correlation sequence decoder over the code trellis with per-step
// input constraints. Observations are one soft value per coded bit, metric is
// sum of obs * (+1 for bit 1, -1 for bit 0). Start and (for zero-tail codes)
// end state are the all-zero state. Ties prefer the lower predecessor state,
// resolved by visiting branches in ascending (state, bit) order and only
// replacing on strict improvement.
inline ViterbiResult viterbi_soft(const SoftWord& obs, const TrellisCode& code,
                                  const ConstraintMask& mask) {
  code.validate();
  const int kk = code.constraint_length;
  const int ri = code.rate_inverse();
  const int states = code.state_count();
  const std::size_t steps = mask.size() + static_cast<std::size_t>(code.tail_bits());
  if (obs.size() != steps * static_cast<std::size_t>(ri)) {
    throw std::invalid_argument("viterbi_soft: observation length mismatch");
  }
  for (double v : obs) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("viterbi_soft: non-finite observation");
    }
  }

  const double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> cur(states, kNegInf), nxt(states);
  cur[0] = 0.0;
  // predecessor[t][s] packs (previous state, input bit); kk <= 16 keeps the
  // previous state within 15 bits.
  std::vector<std::vector<std::uint16_t>> predecessor(
      steps, std::vector<std::uint16_t>(states, 0));

  for (std::size_t t = 0; t < steps; ++t) {
    BitConstraint c =
        t < mask.size() ? mask[t] : BitConstraint::kZero;
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    for (int s = 0; s < states; ++s) {
      if (cur[s] == kNegInf) continue;
      for (int b = 0; b <= 1; ++b) {
        if (c == BitConstraint::kZero && b == 1) continue;
        if (c == BitConstraint::kOne && b == 0) continue;
        std::uint32_t reg = (static_cast<std::uint32_t>(b) << (kk - 1)) |
                            static_cast<std::uint32_t>(s);
        double branch = 0.0;
        for (int g = 0; g < ri; ++g) {
          int bit = std::popcount(reg & code.generators[g]) & 1;
          double o = obs[t * static_cast<std::size_t>(ri) +
                         static_cast<std::size_t>(g)];
          branch += bit ? o : -o;
        }
        int ns = (b << (kk - 2)) | (s >> 1);
        double m = cur[s] + branch;
        if (m > nxt[ns]) {
          nxt[ns] = m;
          predecessor[t][ns] =
              static_cast<std::uint16_t>((b << 15) | s);
        }
      }
    }
    cur.swap(nxt);
  }

  int end_state = 0;
  if (!code.zero_tail) {
    end_state = static_cast<int>(
        std::max_element(cur.begin(), cur.end()) - cur.begin());
  }
  if (cur[end_state] == kNegInf) {
    throw std::invalid_argument("viterbi_soft: no path satisfies constraints");
  }

  ViterbiResult result;
  result.metric = cur[end_state];
  result.bits.resize(steps);
  int s = end_state;
  for (std::size_t t = steps; t-- > 0;) {
    std::uint16_t p = predecessor[t][s];
    result.bits[t] = static_cast<std::uint8_t>(p >> 15);
    s = p & 0x7FFF;
  }
  result.bits.resize(mask.size());
  return result;
}

namespace internal {

inline void check_positions(const std::vector<std::size_t>& positions,
                            std::size_t bound, const char* what) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] >= bound) {
      throw std::invalid_argument(std::string(what) + ": position out of range");
    }
    if (i > 0 && positions[i] <= positions[i - 1]) {
      throw std::invalid_argument(std::string(what) +
                                  ": positions not strictly increasing");
    }
  }
}

}  // namespace internal

// Removes the symbols at `drop` (strictly increasing indices into `word`).
template <typename T>
std::vector<T> puncture(const std::vector<T>& word,
                        const std::vector<std::size_t>& drop) {
  internal::check_positions(drop, word.size(), "puncture");
  std::vector<T> out;
  out.reserve(word.size() - drop.size());
  std::size_t d = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (d < drop.size() && i == drop[d]) {
      ++d;
      continue;
    }
    out.push_back(word[i]);
  }
  return out;
}

// Inverse of puncture: reinserts neutral symbols at `insert_zeros`, which are
// positions in the expanded word.
template <typename T>
std::vector<T> expand(const std::vector<T>& word,
                      const std::vector<std::size_t>& insert_zeros) {
  std::size_t total = word.size() + insert_zeros.size();
  internal::check_positions(insert_zeros, total, "expand");
  std::vector<T> out;
  out.reserve(total);
  std::size_t d = 0, w = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (d < insert_zeros.size() && i == insert_zeros[d]) {
      out.push_back(T{});
      ++d;
    } else {
      out.push_back(word[w++]);
    }
  }
  return out;
}

}  // namespace sswm

#endif  // SSWM_TRELLIS_HPP_
