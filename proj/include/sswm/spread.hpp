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

#ifndef SSWM_SPREAD_HPP_
#define SSWM_SPREAD_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sswm/rng.hpp"

namespace sswm {

enum class CarrierMode { kDense, kOrthogonal };

// Pseudo-random carrier matrix G over {-1,+1}^(m x n) (dense) or with one
// non-zero per row (orthogonal). Entries are never materialized: each is a
// counter-based hash of (seed, row, column), so both transform directions
// stream over rows at 64 signs per hash and any entry is addressable on its
// own. Orthogonal mode assigns row i to column perm[i mod n] for a seeded
// permutation, so column supports are disjoint and G'G is exactly diagonal.
class CarrierMatrix {
 public:
  CarrierMatrix(std::uint64_t seed, std::size_t rows, std::size_t cols,
                CarrierMode mode)
      : seed_(seed), rows_(rows), cols_(cols), mode_(mode) {
    if (cols == 0 || rows < cols) {
      throw std::invalid_argument("CarrierMatrix: need rows >= cols >= 1");
    }
    if (mode_ == CarrierMode::kOrthogonal) {
      perm_.resize(cols_);
      for (std::size_t j = 0; j < cols_; ++j) {
        perm_[j] = static_cast<std::uint32_t>(j);
      }
      Rng rng(mix64(seed_ ^ 0xA24BAED4963EE407ULL));
      for (std::size_t j = cols_ - 1; j > 0; --j) {
        std::size_t r = rng.next_below(j + 1);
        std::swap(perm_[j], perm_[r]);
      }
    }
  }

  std::uint64_t seed() const { return seed_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  CarrierMode mode() const { return mode_; }

  double entry(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
      throw std::invalid_argument("CarrierMatrix: entry out of range");
    }
    if (mode_ == CarrierMode::kOrthogonal) {
      if (j != column_of_row(i)) return 0.0;
      return row_sign(i);
    }
    std::uint64_t bits = chunk_bits(row_key(i), j >> 6);
    return (bits >> (j & 63)) & 1u ? 1.0 : -1.0;
  }

  // G'a for a length-m vector a.
  std::vector<double> correlate(const std::vector<double>& a) const {
    if (a.size() != rows_) {
      throw std::invalid_argument("correlate: length mismatch");
    }
    std::vector<double> s(cols_, 0.0);
    if (mode_ == CarrierMode::kOrthogonal) {
      for (std::size_t i = 0; i < rows_; ++i) {
        s[column_of_row(i)] += row_sign(i) * a[i];
      }
      return s;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      double ai = a[i];
      std::uint64_t rk = row_key(i);
      std::size_t j = 0;
      for (std::size_t c = 0; j < cols_; ++c) {
        std::uint64_t bits = chunk_bits(rk, c);
        std::size_t stop = cols_ - j < 64 ? cols_ - j : 64;
        for (std::size_t t = 0; t < stop; ++t, ++j) {
          s[j] += (bits & 1u) ? ai : -ai;
          bits >>= 1;
        }
      }
    }
    return s;
  }

  // Gv for a length-n vector v.
  std::vector<double> spread_rows(const std::vector<double>& v) const {
    if (v.size() != cols_) {
      throw std::invalid_argument("spread_rows: length mismatch");
    }
    std::vector<double> w(rows_, 0.0);
    if (mode_ == CarrierMode::kOrthogonal) {
      for (std::size_t i = 0; i < rows_; ++i) {
        w[i] = row_sign(i) * v[column_of_row(i)];
      }
      return w;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      double acc = 0.0;
      std::uint64_t rk = row_key(i);
      std::size_t j = 0;
      for (std::size_t c = 0; j < cols_; ++c) {
        std::uint64_t bits = chunk_bits(rk, c);
        std::size_t stop = cols_ - j < 64 ? cols_ - j : 64;
        for (std::size_t t = 0; t < stop; ++t, ++j) {
          acc += (bits & 1u) ? v[j] : -v[j];
          bits >>= 1;
        }
      }
      w[i] = acc;
    }
    return w;
  }

 private:
  std::uint64_t row_key(std::size_t i) const {
    return mix64(seed_ ^ (0xD1B54A32D192ED03ULL * (i + 1)));
  }
  static std::uint64_t chunk_bits(std::uint64_t rk, std::size_t c) {
    return mix64(rk ^ (0x8CB92BA72F3D8DD7ULL * (c + 1)));
  }
  std::size_t column_of_row(std::size_t i) const { return perm_[i % cols_]; }
  double row_sign(std::size_t i) const {
    return (row_key(i) & 1u) ? 1.0 : -1.0;
  }

  std::uint64_t seed_;
  std::size_t rows_, cols_;
  CarrierMode mode_;
  std::vector<std::uint32_t> perm_;
};

namespace internal {

inline void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": length mismatch");
  }
}

}  // namespace internal

// x_st_j = sum_i beta_i gamma_i x_i G_ij.
inline std::vector<double> forward_host(const std::vector<double>& x,
                                        const std::vector<double>& beta,
                                        const std::vector<double>& gamma,
                                        const CarrierMatrix& g) {
  internal::check_length(x.size(), g.rows(), "forward_host");
  internal::check_length(beta.size(), g.rows(), "forward_host");
  internal::check_length(gamma.size(), g.rows(), "forward_host");
  std::vector<double> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = beta[i] * gamma[i] * x[i];
  return g.correlate(a);
}

// y_st_j = sum_i beta_i y_i G_ij.
inline std::vector<double> forward_received(const std::vector<double>& y,
                                            const std::vector<double>& beta,
                                            const CarrierMatrix& g) {
  internal::check_length(y.size(), g.rows(), "forward_received");
  internal::check_length(beta.size(), g.rows(), "forward_received");
  std::vector<double> a(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) a[i] = beta[i] * y[i];
  return g.correlate(a);
}

struct SubspaceEnergies {
  double q = 0.0;
  double n = 0.0;
  double p = 0.0;
};

// Q = sum beta^2 gamma^2 sigma_x^2, N = sum beta^2 sigma_z^2,
// P = (1/n) [sum beta gamma sigma_w]^2.
inline SubspaceEnergies subspace_energies(const std::vector<double>& beta,
                                          const std::vector<double>& gamma,
                                          const std::vector<double>& sigma_x,
                                          const std::vector<double>& sigma_z,
                                          const std::vector<double>& sigma_w,
                                          int n) {
  std::size_t m = beta.size();
  internal::check_length(gamma.size(), m, "subspace_energies");
  internal::check_length(sigma_x.size(), m, "subspace_energies");
  internal::check_length(sigma_z.size(), m, "subspace_energies");
  internal::check_length(sigma_w.size(), m, "subspace_energies");
  if (n < 1) throw std::invalid_argument("subspace_energies: n < 1");
  SubspaceEnergies e;
  double root_p = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double bg = beta[i] * gamma[i];
    e.q += bg * bg * sigma_x[i] * sigma_x[i];
    e.n += beta[i] * beta[i] * sigma_z[i] * sigma_z[i];
    root_p += bg * sigma_w[i];
  }
  e.p = root_p * root_p / static_cast<double>(n);
  return e;
}

// Inter-symbol interference of non-orthogonal carriers,
// I = (n-1)/(nP) sum beta^2 gamma^2 sigma_w^2.
inline double isi_energy(const std::vector<double>& beta,
                         const std::vector<double>& gamma,
                         const std::vector<double>& sigma_w, int n, double p) {
  std::size_t m = beta.size();
  internal::check_length(gamma.size(), m, "isi_energy");
  internal::check_length(sigma_w.size(), m, "isi_energy");
  if (n < 1) throw std::invalid_argument("isi_energy: n < 1");
  if (!(p > 0.0)) throw std::invalid_argument("isi_energy: P must be > 0");
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double bgw = beta[i] * gamma[i] * sigma_w[i];
    s += bgw * bgw;
  }
  return s * static_cast<double>(n - 1) / (static_cast<double>(n) * p);
}

namespace internal {

inline std::vector<double> normalize_beta(std::vector<double> beta) {
  double sum2 = 0.0;
  for (double b : beta) sum2 += b * b;
  if (!(sum2 > 0.0)) {
    throw std::invalid_argument("beta_weights: all weights vanish");
  }
  double scale = std::sqrt(static_cast<double>(beta.size()) / sum2);
  for (double& b : beta) b *= scale;
  return beta;
}

}  // namespace internal

// beta_i proportional to gamma_i sigma_w_i / sigma_z_i^2, normalized to
// (1/m) sum beta^2 = 1.
inline std::vector<double> beta_weights_matched(
    const std::vector<double>& gamma, const std::vector<double>& sigma_w,
    const std::vector<double>& sigma_z) {
  std::size_t m = gamma.size();
  internal::check_length(sigma_w.size(), m, "beta_weights_matched");
  internal::check_length(sigma_z.size(), m, "beta_weights_matched");
  std::vector<double> beta(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(sigma_z[i] > 0.0)) {
      throw std::invalid_argument("beta_weights_matched: sigma_z must be > 0");
    }
    beta[i] = gamma[i] * sigma_w[i] / (sigma_z[i] * sigma_z[i]);
  }
  return internal::normalize_beta(std::move(beta));
}

// beta_i proportional to phi_i (the optimal-attack regime), same
// normalization.
inline std::vector<double> beta_weights_perceptual(
    const std::vector<double>& phi) {
  return internal::normalize_beta(phi);
}

// y_i = gamma_w_i [x_i + (sigma_w_i / sqrt(nP)) (G w_st)_i].
inline std::vector<double> embed_spatial(const std::vector<double>& x,
                                         const std::vector<double>& w_st,
                                         const std::vector<double>& sigma_w,
                                         const std::vector<double>& gamma_w,
                                         const CarrierMatrix& g, double p) {
  internal::check_length(x.size(), g.rows(), "embed_spatial");
  internal::check_length(sigma_w.size(), g.rows(), "embed_spatial");
  internal::check_length(gamma_w.size(), g.rows(), "embed_spatial");
  internal::check_length(w_st.size(), g.cols(), "embed_spatial");
  double n_p = static_cast<double>(g.cols()) * p;
  double norm2 = 0.0;
  for (double w : w_st) norm2 += w * w;
  if (norm2 > n_p * (1.0 + 1e-6)) {
    throw std::invalid_argument("embed_spatial: w_st exceeds power budget");
  }
  double inv_root = p > 0.0 ? 1.0 / std::sqrt(n_p) : 0.0;
  std::vector<double> spread = g.spread_rows(w_st);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = gamma_w[i] * (x[i] + sigma_w[i] * inv_root * spread[i]);
  }
  return y;
}

}  // namespace sswm

#endif  // SSWM_SPREAD_HPP_
