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

#ifndef SSWM_CODEBOOK_HPP_
#define SSWM_CODEBOOK_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sswm/trellis.hpp"

namespace sswm {

// Structured binning codebook: k message bits select a subcodebook, i free
// index bits enumerate its entries, all laid out on one convolutional
// trellis. Codewords are length-n antipodal sequences (norm sqrt(n)) obtained
// by puncturing the tail-terminated coded stream down to n symbols.
struct CodebookSpec {
  TrellisCode code;
  int message_bits = 0;
  int index_bits = 0;
  int codeword_length = 0;
  int pad_bits = 0;
  std::vector<std::size_t> message_positions;
  std::vector<std::size_t> punctured_positions;
  double theta = 0.0;

  int data_bits() const { return message_bits + index_bits + pad_bits; }
  std::size_t expanded_length() const {
    return code.output_length(static_cast<std::size_t>(data_bits()));
  }
};

// Half-angle of the decoding cone around each codeword,
// tan^-2(theta) = 2^(2(k+i)/n) - 1.
inline double cone_angle(int k, int i, int n) {
  if (k < 0 || i < 0 || n <= 0 || k + i <= 0 || k + i > n) {
    throw std::invalid_argument("cone_angle: invalid rate");
  }
  double ratio = 2.0 * static_cast<double>(k + i) / static_cast<double>(n);
  return std::atan(1.0 / std::sqrt(std::exp2(ratio) - 1.0));
}

// Number of index bits the host interference supports,
// i = round((n/2) log2(1 + PQ/(P+N)^2)), clamped to [0, n-k].
inline int index_bit_count(double p, double q, double n_noise, int n,
                           int k = 0) {
  if (!(p > 0.0) || !(n_noise > 0.0) || q < 0.0) {
    throw std::invalid_argument("index_bit_count: powers out of range");
  }
  if (n <= 0 || k < 0 || k > n) {
    throw std::invalid_argument("index_bit_count: invalid lengths");
  }
  double s = p + n_noise;
  double raw = 0.5 * static_cast<double>(n) * std::log2(1.0 + p * q / (s * s));
  long long i = std::llround(raw);
  if (i < 0) i = 0;
  if (i > n - k) i = n - k;
  return static_cast<int>(i);
}

// Codeword length used when the caller does not pin one, n = ri * (k + 2):
// the tail-terminated stream is punctured down to two steps of overhead.
inline int default_codeword_length(int k, const TrellisCode& code) {
  code.validate();
  if (k < 1) throw std::invalid_argument("default_codeword_length: k < 1");
  return code.rate_inverse() * (k + 2);
}

inline CodebookSpec make_codebook_spec(int k, int i, int n,
                                       const TrellisCode& code) {
  code.validate();
  if (k < 1) throw std::invalid_argument("make_codebook_spec: k < 1");
  if (i < 0) throw std::invalid_argument("make_codebook_spec: i < 0");
  if (n < k + i) {
    throw std::invalid_argument("make_codebook_spec: n below k + i");
  }

  CodebookSpec spec;
  spec.code = code;
  spec.message_bits = k;
  spec.index_bits = i;
  spec.codeword_length = n;
  spec.theta = cone_angle(k, i, n);

  const int ri = code.rate_inverse();
  const int tail = code.tail_bits();
  int needed_steps = static_cast<int>((n + ri - 1) / ri);
  spec.pad_bits = needed_steps - (k + i) - tail;
  if (spec.pad_bits < 0) spec.pad_bits = 0;

  std::size_t expanded = spec.expanded_length();
  std::size_t punct_count = expanded - static_cast<std::size_t>(n);

  spec.message_positions.resize(k);
  for (int j = 0; j < k; ++j) {
    spec.message_positions[j] =
        static_cast<std::size_t>(j) * static_cast<std::size_t>(k + i) /
        static_cast<std::size_t>(k);
  }
  spec.punctured_positions.resize(punct_count);
  for (std::size_t t = 0; t < punct_count; ++t) {
    spec.punctured_positions[t] = (2 * t + 1) * expanded / (2 * punct_count);
  }
  return spec;
}

// Constraint mask fixing the message bits (and padding) while leaving the
// index bits free.
inline ConstraintMask build_pattern(const Bits& message,
                                    const CodebookSpec& spec) {
  if (message.size() != static_cast<std::size_t>(spec.message_bits)) {
    throw std::invalid_argument("build_pattern: message length mismatch");
  }
  ConstraintMask mask(static_cast<std::size_t>(spec.data_bits()),
                      BitConstraint::kFree);
  for (std::size_t j = 0; j < message.size(); ++j) {
    if (message[j] > 1) {
      throw std::invalid_argument("build_pattern: message bit not 0/1");
    }
    mask[spec.message_positions[j]] =
        message[j] ? BitConstraint::kOne : BitConstraint::kZero;
  }
  for (int p = spec.message_bits + spec.index_bits; p < spec.data_bits();
       ++p) {
    mask[static_cast<std::size_t>(p)] = BitConstraint::kZero;
  }
  return mask;
}

struct DecodeResult {
  Bits message;
  Bits data;
  std::vector<double> codeword;
  double metric = 0.0;
};

inline DecodeResult decode_with_mask(const std::vector<double>& obs,
                                     const CodebookSpec& spec,
                                     const ConstraintMask& mask) {
  if (obs.size() != static_cast<std::size_t>(spec.codeword_length)) {
    throw std::invalid_argument("decode_with_mask: observation length");
  }
  SoftWord padded = expand(obs, spec.punctured_positions);
  ViterbiResult vr = viterbi_soft(padded, spec.code, mask);

  DecodeResult result;
  result.data = vr.bits;
  result.metric = vr.metric;
  result.message.resize(spec.message_positions.size());
  for (std::size_t j = 0; j < spec.message_positions.size(); ++j) {
    result.message[j] = vr.bits[spec.message_positions[j]];
  }
  Bits coded = conv_encode(vr.bits, spec.code);
  Bits kept = puncture(coded, spec.punctured_positions);
  result.codeword.resize(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) {
    result.codeword[j] = kept[j] ? 1.0 : -1.0;
  }
  return result;
}

// Best codeword carrying `message`, maximizing correlation with x_st.
inline DecodeResult nearest_in_subcodebook(const std::vector<double>& x_st,
                                           const Bits& message,
                                           const CodebookSpec& spec) {
  return decode_with_mask(x_st, spec, build_pattern(message, spec));
}

// Best codeword over the whole codebook (message and index bits both free).
inline DecodeResult nearest_any(const std::vector<double>& y_st,
                                const CodebookSpec& spec) {
  ConstraintMask mask(static_cast<std::size_t>(spec.data_bits()),
                      BitConstraint::kFree);
  for (int p = spec.message_bits + spec.index_bits; p < spec.data_bits();
       ++p) {
    mask[static_cast<std::size_t>(p)] = BitConstraint::kZero;
  }
  return decode_with_mask(y_st, spec, mask);
}

}  // namespace sswm

#endif  // SSWM_CODEBOOK_HPP_
