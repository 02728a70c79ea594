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

#ifndef SSWM_CHANNEL_HPP_
#define SSWM_CHANNEL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sswm/errors.hpp"
#include "sswm/media.hpp"
#include "sswm/optimizer.hpp"
#include "sswm/rng.hpp"

namespace sswm {

enum class AttackKind { kAwgn, kSawgn, kOptimal, kJpeg };

struct AttackSpec {
  AttackKind kind = AttackKind::kAwgn;
  double noise_power = 0.0;
  int quality = 50;
  double attack_max = 0.0;
  std::uint64_t seed = 0;
};

inline std::vector<double> awgn(const std::vector<double>& y,
                                double noise_power, std::uint64_t seed) {
  if (noise_power < 0.0) {
    throw std::invalid_argument("awgn: negative noise power");
  }
  std::vector<double> out = y;
  if (noise_power == 0.0) return out;
  Rng rng(seed);
  double dev = std::sqrt(noise_power);
  for (double& v : out) v += dev * rng.next_gaussian();
  return out;
}

// y'_i = gamma_a_i * y_i + delta_i with delta_i ~ N(0, sigma_z_i^2).
inline std::vector<double> sawgn(const std::vector<double>& y,
                                 const std::vector<double>& gamma_a,
                                 const std::vector<double>& sigma_z,
                                 std::uint64_t seed) {
  internal::check_length(gamma_a.size(), y.size(), "sawgn");
  internal::check_length(sigma_z.size(), y.size(), "sawgn");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (gamma_a[i] < 0.0 || sigma_z[i] < 0.0) {
      throw std::invalid_argument("sawgn: negative gain or deviation");
    }
  }
  std::vector<double> out(y.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = gamma_a[i] * y[i] + sigma_z[i] * rng.next_gaussian();
  }
  return out;
}

// Worst-case scaling attack against a known embedding, tuned so the formula
// distortion meets the budget.
struct OptimalAttackPlan {
  std::vector<double> gamma;
  std::vector<double> gamma_a;
  std::vector<double> sigma_z;
  double lambda = 0.0;
};

// Bisects the attack multiplier: the best-response distortion against a
// fixed embedding falls monotonically in lambda, from full erasure down to
// the Wiener floor reached by not attacking at all.
inline OptimalAttackPlan plan_optimal_attack(
    const std::vector<double>& sigma_x, const std::vector<double>& sigma_w,
    const std::vector<double>& phi, double attack_max) {
  std::size_t m = sigma_x.size();
  internal::check_length(sigma_w.size(), m, "plan_optimal_attack");
  internal::check_length(phi.size(), m, "plan_optimal_attack");
  if (m == 0) throw std::invalid_argument("plan_optimal_attack: empty host");
  double energy = 0.0;
  double reach = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sigma_x[i] < 0.0 || sigma_w[i] < 0.0) {
      throw std::invalid_argument("plan_optimal_attack: negative deviation");
    }
    if (!(phi[i] > 0.0)) {
      throw std::invalid_argument("plan_optimal_attack: phi must be positive");
    }
    double e = phi[i] * phi[i] * sigma_x[i] * sigma_x[i];
    energy += e;
    // Unwatermarked coefficients are passed through clean by the best
    // response, so they never contribute attack distortion.
    if (sigma_w[i] > 0.0) reach += e;
  }
  if (!(energy > 0.0)) {
    throw std::invalid_argument("plan_optimal_attack: host has no energy");
  }
  double d_reach = reach / static_cast<double>(m);
  double floor = distortion_embed(phi, sigma_x, sigma_w);
  if (attack_max < floor * (1.0 - 1e-9)) {
    throw infeasible_error(
        "plan_optimal_attack: budget below the Wiener floor of this "
        "embedding");
  }
  if (attack_max >= d_reach * (1.0 - 1e-9)) {
    throw infeasible_error(
        "plan_optimal_attack: budget erases every watermarked coefficient");
  }

  auto respond = [&](double lambda, OptimalAttackPlan* plan) {
    plan->gamma.resize(m);
    plan->sigma_z.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      AttackResponse r =
          attack_best_response(sigma_w[i], sigma_x[i], phi[i], lambda);
      plan->gamma[i] = r.gamma;
      plan->sigma_z[i] = r.sigma_z;
    }
    return distortion_attack(phi, sigma_x, sigma_w, plan->gamma,
                             plan->sigma_z);
  };

  OptimalAttackPlan plan;
  double lambda_scale = static_cast<double>(m) / energy;
  double lo = lambda_scale, hi = lambda_scale;
  for (int step = 0; step < 400 && respond(lo, &plan) < attack_max; ++step) {
    lo *= 0.5;
  }
  for (int step = 0; step < 400 && respond(hi, &plan) > attack_max; ++step) {
    hi *= 2.0;
  }
  double lambda = hi;
  for (int iter = 0; iter < 200; ++iter) {
    lambda = 0.5 * (lo + hi);
    double d = respond(lambda, &plan);
    if (d > attack_max) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    if (std::abs(d - attack_max) <= 1e-9 * attack_max ||
        hi - lo <= 1e-12 * hi) {
      break;
    }
  }
  respond(lambda, &plan);
  plan.lambda = lambda;
  plan.gamma_a.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool live = sigma_x[i] > 0.0 || sigma_w[i] > 0.0;
    double gw = live ? wiener_gain(sigma_x[i], sigma_w[i]) : 1.0;
    plan.gamma_a[i] = gw > 0.0 ? plan.gamma[i] / gw : 0.0;
  }
  return plan;
}

inline std::vector<double> optimal_attack(const std::vector<double>& y,
                                          const std::vector<double>& sigma_x,
                                          const std::vector<double>& sigma_w,
                                          const std::vector<double>& phi,
                                          double attack_max,
                                          std::uint64_t seed) {
  internal::check_length(sigma_x.size(), y.size(), "optimal_attack");
  OptimalAttackPlan plan =
      plan_optimal_attack(sigma_x, sigma_w, phi, attack_max);
  return sawgn(y, plan.gamma_a, plan.sigma_z, seed);
}

namespace internal {

// Standard luminance quantization base table.
inline constexpr std::array<int, 64> kJpegLuminanceBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

inline std::array<int, 64> jpeg_quant_table(int quality) {
  int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> table;
  for (int i = 0; i < 64; ++i) {
    table[i] = std::clamp((kJpegLuminanceBase[i] * scale + 50) / 100, 1, 255);
  }
  return table;
}

inline const std::array<std::array<double, 8>, 8>& dct8_matrix() {
  static const std::array<std::array<double, 8>, 8> m = [] {
    std::array<std::array<double, 8>, 8> out;
    const double pi = 3.14159265358979323846;
    for (int u = 0; u < 8; ++u) {
      double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) {
        out[u][x] = alpha * std::cos((2.0 * x + 1.0) * u * pi / 16.0);
      }
    }
    return out;
  }();
  return m;
}

// Mirror index with edge duplication, valid for any non-negative i.
inline int reflect_index(int i, int n) {
  int period = 2 * n;
  i %= period;
  return i < n ? i : period - 1 - i;
}

}  // namespace internal

// Blockwise DCT quantization round trip with the conventional quality
// scaling (quality < 50 scales the base table by 5000/quality percent,
// otherwise by 200 - 2*quality). Non 8-divisible images are reflect-padded
// for the transform and cropped back.
inline MediaPlane jpeg_surrogate(const MediaPlane& image, int quality) {
  if (quality < 1 || quality > 100) {
    throw std::invalid_argument("jpeg_surrogate: quality must be in [1,100]");
  }
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) *
                                 static_cast<std::size_t>(image.height)) {
    throw std::invalid_argument("jpeg_surrogate: malformed plane");
  }
  std::array<int, 64> table = internal::jpeg_quant_table(quality);
  const auto& dct = internal::dct8_matrix();
  int pw = (image.width + 7) / 8 * 8;
  int ph = (image.height + 7) / 8 * 8;
  std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
  for (int r = 0; r < ph; ++r) {
    int sr = internal::reflect_index(r, image.height);
    for (int c = 0; c < pw; ++c) {
      int sc = internal::reflect_index(c, image.width);
      padded[static_cast<std::size_t>(r) * pw + c] =
          static_cast<double>(
              image.pixels[static_cast<std::size_t>(sr) * image.width + sc]) -
          128.0;
    }
  }
  double block[8][8], tmp[8][8];
  for (int by = 0; by < ph; by += 8) {
    for (int bx = 0; bx < pw; bx += 8) {
      double* base = padded.data() + static_cast<std::size_t>(by) * pw + bx;
      // Forward: rows then columns.
      for (int r = 0; r < 8; ++r) {
        for (int u = 0; u < 8; ++u) {
          double acc = 0.0;
          for (int x = 0; x < 8; ++x) acc += dct[u][x] * base[r * pw + x];
          tmp[r][u] = acc;
        }
      }
      for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
          double acc = 0.0;
          for (int r = 0; r < 8; ++r) acc += dct[v][r] * tmp[r][u];
          double step = static_cast<double>(table[v * 8 + u]);
          block[v][u] = std::nearbyint(acc / step) * step;
        }
      }
      // Inverse: columns then rows.
      for (int u = 0; u < 8; ++u) {
        for (int r = 0; r < 8; ++r) {
          double acc = 0.0;
          for (int v = 0; v < 8; ++v) acc += dct[v][r] * block[v][u];
          tmp[r][u] = acc;
        }
      }
      for (int r = 0; r < 8; ++r) {
        for (int x = 0; x < 8; ++x) {
          double acc = 0.0;
          for (int u = 0; u < 8; ++u) acc += dct[u][x] * tmp[r][u];
          base[r * pw + x] = acc;
        }
      }
    }
  }
  MediaPlane out;
  out.width = image.width;
  out.height = image.height;
  out.pixels.resize(image.pixels.size());
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      double v = padded[static_cast<std::size_t>(r) * pw + c] + 128.0;
      out.pixels[static_cast<std::size_t>(r) * image.width + c] =
          static_cast<std::uint8_t>(
              std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

}  // namespace sswm

#endif  // SSWM_CHANNEL_HPP_
