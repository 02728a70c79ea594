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

#ifndef SSWM_MEDIA_HPP_
#define SSWM_MEDIA_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "sswm/errors.hpp"
#include "sswm/spread.hpp"

namespace sswm {

struct MediaPlane {
  std::vector<std::uint8_t> pixels;
  int width = 0;
  int height = 0;
};

inline std::vector<double> plane_to_real(const MediaPlane& plane) {
  return std::vector<double>(plane.pixels.begin(), plane.pixels.end());
}

// Rounds and clamps back to 8-bit; the rounding noise is part of the
// measured embedding distortion.
inline MediaPlane real_to_plane(const std::vector<double>& data, int width,
                                int height) {
  if (width <= 0 || height <= 0 ||
      data.size() != static_cast<std::size_t>(width) *
                         static_cast<std::size_t>(height)) {
    throw std::invalid_argument("real_to_plane: size does not match dims");
  }
  MediaPlane plane;
  plane.width = width;
  plane.height = height;
  plane.pixels.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    long v = std::lround(data[i]);
    plane.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
  }
  return plane;
}

inline constexpr int kSubbandCount = 10;

namespace internal {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

inline void check_dwt_dims(int width, int height, std::size_t size) {
  if (width < 8 || height < 8 || width % 8 != 0 || height % 8 != 0) {
    throw std::invalid_argument(
        "dwt3: dims must be >= 8 and divisible by 8");
  }
  if (size != static_cast<std::size_t>(width) *
                  static_cast<std::size_t>(height)) {
    throw std::invalid_argument("dwt3: data size does not match dims");
  }
}

inline void haar_rows_forward(std::vector<double>* data, int stride,
                              int cur_w, int cur_h) {
  std::vector<double> tmp(cur_w);
  int half = cur_w / 2;
  for (int r = 0; r < cur_h; ++r) {
    double* row = data->data() + static_cast<std::size_t>(r) * stride;
    for (int j = 0; j < half; ++j) {
      tmp[j] = (row[2 * j] + row[2 * j + 1]) * kInvSqrt2;
      tmp[half + j] = (row[2 * j] - row[2 * j + 1]) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.end(), row);
  }
}

inline void haar_cols_forward(std::vector<double>* data, int stride,
                              int cur_w, int cur_h) {
  std::vector<double> tmp(cur_h);
  int half = cur_h / 2;
  for (int c = 0; c < cur_w; ++c) {
    double* col = data->data() + c;
    for (int j = 0; j < half; ++j) {
      double a = col[static_cast<std::size_t>(2 * j) * stride];
      double b = col[static_cast<std::size_t>(2 * j + 1) * stride];
      tmp[j] = (a + b) * kInvSqrt2;
      tmp[half + j] = (a - b) * kInvSqrt2;
    }
    for (int j = 0; j < cur_h; ++j) {
      col[static_cast<std::size_t>(j) * stride] = tmp[j];
    }
  }
}

inline void haar_rows_inverse(std::vector<double>* data, int stride,
                              int cur_w, int cur_h) {
  std::vector<double> tmp(cur_w);
  int half = cur_w / 2;
  for (int r = 0; r < cur_h; ++r) {
    double* row = data->data() + static_cast<std::size_t>(r) * stride;
    for (int j = 0; j < half; ++j) {
      tmp[2 * j] = (row[j] + row[half + j]) * kInvSqrt2;
      tmp[2 * j + 1] = (row[j] - row[half + j]) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.end(), row);
  }
}

inline void haar_cols_inverse(std::vector<double>* data, int stride,
                              int cur_w, int cur_h) {
  std::vector<double> tmp(cur_h);
  int half = cur_h / 2;
  for (int c = 0; c < cur_w; ++c) {
    double* col = data->data() + c;
    for (int j = 0; j < half; ++j) {
      double s = col[static_cast<std::size_t>(j) * stride];
      double d = col[static_cast<std::size_t>(half + j) * stride];
      tmp[2 * j] = (s + d) * kInvSqrt2;
      tmp[2 * j + 1] = (s - d) * kInvSqrt2;
    }
    for (int j = 0; j < cur_h; ++j) {
      col[static_cast<std::size_t>(j) * stride] = tmp[j];
    }
  }
}

}  // namespace internal

// Three levels of the orthonormal Haar transform, standard quadrant layout:
// each level halves the low-pass block in place in the top-left corner.
inline std::vector<double> dwt3(const std::vector<double>& image, int width,
                                int height) {
  internal::check_dwt_dims(width, height, image.size());
  std::vector<double> out = image;
  int cur_w = width, cur_h = height;
  for (int level = 0; level < 3; ++level) {
    internal::haar_rows_forward(&out, width, cur_w, cur_h);
    internal::haar_cols_forward(&out, width, cur_w, cur_h);
    cur_w /= 2;
    cur_h /= 2;
  }
  return out;
}

inline std::vector<double> idwt3(const std::vector<double>& coeffs, int width,
                                 int height) {
  internal::check_dwt_dims(width, height, coeffs.size());
  std::vector<double> out = coeffs;
  for (int level = 2; level >= 0; --level) {
    int cur_w = width >> level;
    int cur_h = height >> level;
    internal::haar_cols_inverse(&out, width, cur_w, cur_h);
    internal::haar_rows_inverse(&out, width, cur_w, cur_h);
  }
  return out;
}

struct SubbandRect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;
};

// Coarse to fine: 0 is the level-3 low-pass block, then per level the
// horizontal-detail, vertical-detail, and diagonal quadrants.
inline std::array<SubbandRect, kSubbandCount> subband_rects3(int width,
                                                             int height) {
  std::array<SubbandRect, kSubbandCount> rects;
  rects[0] = {0, 0, width / 8, height / 8};
  int idx = 1;
  for (int level = 3; level >= 1; --level) {
    int w = width >> level;
    int h = height >> level;
    rects[idx++] = {w, 0, w, h};
    rects[idx++] = {0, h, w, h};
    rects[idx++] = {w, h, w, h};
  }
  return rects;
}

inline std::vector<int> subband_map3(int width, int height) {
  internal::check_dwt_dims(width, height,
                           static_cast<std::size_t>(width) *
                               static_cast<std::size_t>(height));
  std::vector<int> map(static_cast<std::size_t>(width) *
                       static_cast<std::size_t>(height));
  auto rects = subband_rects3(width, height);
  for (int band = 0; band < kSubbandCount; ++band) {
    const SubbandRect& r = rects[band];
    for (int y = r.y0; y < r.y0 + r.h; ++y) {
      for (int x = r.x0; x < r.x0 + r.w; ++x) {
        map[static_cast<std::size_t>(y) * width + x] = band;
      }
    }
  }
  return map;
}

// Local deviation of each coefficient from a window clipped to its own
// subband, with a small floor so downstream ratios stay finite.
inline std::vector<double> estimate_sigma(const std::vector<double>& coeffs,
                                          int width, int height,
                                          int window = 5) {
  internal::check_dwt_dims(width, height, coeffs.size());
  if (window < 3 || window % 2 == 0) {
    throw std::invalid_argument("estimate_sigma: window must be odd and >= 3");
  }
  const double kFloor = 1e-6;
  std::vector<double> sigma(coeffs.size());
  int reach = window / 2;
  for (const SubbandRect& r : subband_rects3(width, height)) {
    // Inclusive prefix sums over the subband rectangle, one row/col of
    // zero padding.
    std::vector<double> sum(static_cast<std::size_t>(r.w + 1) * (r.h + 1),
                            0.0);
    std::vector<double> sumsq(sum.size(), 0.0);
    for (int y = 0; y < r.h; ++y) {
      for (int x = 0; x < r.w; ++x) {
        double v =
            coeffs[static_cast<std::size_t>(r.y0 + y) * width + r.x0 + x];
        std::size_t at = static_cast<std::size_t>(y + 1) * (r.w + 1) + x + 1;
        std::size_t up = at - (r.w + 1);
        sum[at] = v + sum[at - 1] + sum[up] - sum[up - 1];
        sumsq[at] = v * v + sumsq[at - 1] + sumsq[up] - sumsq[up - 1];
      }
    }
    for (int y = 0; y < r.h; ++y) {
      int y_lo = std::max(0, y - reach), y_hi = std::min(r.h - 1, y + reach);
      for (int x = 0; x < r.w; ++x) {
        int x_lo = std::max(0, x - reach);
        int x_hi = std::min(r.w - 1, x + reach);
        auto box = [&](const std::vector<double>& t) {
          std::size_t a = static_cast<std::size_t>(y_hi + 1) * (r.w + 1);
          std::size_t b = static_cast<std::size_t>(y_lo) * (r.w + 1);
          return t[a + x_hi + 1] - t[a + x_lo] - t[b + x_hi + 1] +
                 t[b + x_lo];
        };
        double count = static_cast<double>(y_hi - y_lo + 1) *
                       static_cast<double>(x_hi - x_lo + 1);
        double mean = box(sum) / count;
        double var = box(sumsq) / count - mean * mean;
        double dev = var > 0.0 ? std::sqrt(var) : 0.0;
        sigma[static_cast<std::size_t>(r.y0 + y) * width + r.x0 + x] =
            std::max(dev, kFloor);
      }
    }
  }
  return sigma;
}

struct PerceptualWeights {
  std::vector<double> phi;
  double rho = 0.0;
};

// phi_i = rho / sqrt(activity_i + 1) where the activity is sigma_x divided
// by its subband mean, and rho normalizes the weights to unit mean.
inline PerceptualWeights perceptual_phi(const std::vector<double>& sigma_x,
                                        const std::vector<int>& subband_map) {
  std::size_t m = sigma_x.size();
  internal::check_length(subband_map.size(), m, "perceptual_phi");
  if (m == 0) throw std::invalid_argument("perceptual_phi: empty input");
  int bands = 0;
  for (int b : subband_map) {
    if (b < 0) throw std::invalid_argument("perceptual_phi: negative band");
    bands = std::max(bands, b + 1);
  }
  std::vector<double> band_sum(bands, 0.0);
  std::vector<double> band_count(bands, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (sigma_x[i] < 0.0) {
      throw std::invalid_argument("perceptual_phi: negative sigma_x");
    }
    band_sum[subband_map[i]] += sigma_x[i];
    band_count[subband_map[i]] += 1.0;
  }
  PerceptualWeights out;
  out.phi.resize(m);
  double inv_acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double mean = band_sum[subband_map[i]] / band_count[subband_map[i]];
    double activity = mean > 0.0 ? sigma_x[i] / mean : 0.0;
    out.phi[i] = 1.0 / std::sqrt(activity + 1.0);
    inv_acc += out.phi[i];
  }
  out.rho = static_cast<double>(m) / inv_acc;
  for (double& p : out.phi) p *= out.rho;
  return out;
}

// Host-side analysis bundle for one image plane.
struct HostModel {
  std::vector<double> coeffs;
  std::vector<double> sigma_x;
  std::vector<double> phi;
  double rho = 0.0;
  std::vector<int> subband_map;
  int width = 0;
  int height = 0;
};

inline HostModel analyze_host(const MediaPlane& image, int window = 5) {
  HostModel host;
  host.width = image.width;
  host.height = image.height;
  host.coeffs = dwt3(plane_to_real(image), image.width, image.height);
  host.subband_map = subband_map3(image.width, image.height);
  host.sigma_x = estimate_sigma(host.coeffs, image.width, image.height,
                                window);
  PerceptualWeights weights = perceptual_phi(host.sigma_x, host.subband_map);
  host.phi = std::move(weights.phi);
  host.rho = weights.rho;
  return host;
}

inline double mse(const std::vector<double>& a, const std::vector<double>& b) {
  internal::check_length(b.size(), a.size(), "mse");
  if (a.empty()) throw std::invalid_argument("mse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return acc / static_cast<double>(a.size());
}

inline double weighted_mse(const std::vector<double>& a,
                           const std::vector<double>& b,
                           const std::vector<double>& phi) {
  internal::check_length(b.size(), a.size(), "weighted_mse");
  internal::check_length(phi.size(), a.size(), "weighted_mse");
  if (a.empty()) throw std::invalid_argument("weighted_mse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += phi[i] * phi[i] * (a[i] - b[i]) * (a[i] - b[i]);
  }
  return acc / static_cast<double>(a.size());
}

inline constexpr double kMetricCapDb = 99.0;

inline double psnr_from_distortion(double d) {
  if (!(d > 0.0)) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(255.0 * 255.0 / d));
}

inline double wpsnr_from_distortion(double d) { return psnr_from_distortion(d); }

inline double psnr(const std::vector<double>& a,
                   const std::vector<double>& b) {
  return psnr_from_distortion(mse(a, b));
}

inline double psnr(const MediaPlane& a, const MediaPlane& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("psnr: plane dims differ");
  }
  return psnr(plane_to_real(a), plane_to_real(b));
}

inline double wpsnr(const std::vector<double>& a,
                    const std::vector<double>& b,
                    const std::vector<double>& phi) {
  return wpsnr_from_distortion(weighted_mse(a, b, phi));
}

inline double ber(const std::vector<std::uint8_t>& sent,
                  const std::vector<std::uint8_t>& received) {
  internal::check_length(received.size(), sent.size(), "ber");
  if (sent.empty()) throw std::invalid_argument("ber: empty input");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) {
    if ((sent[i] != 0) != (received[i] != 0)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(sent.size());
}

namespace internal {

inline void skip_pgm_space(const std::string& buf, std::size_t* pos) {
  while (*pos < buf.size()) {
    char c = buf[*pos];
    if (c == '#') {
      while (*pos < buf.size() && buf[*pos] != '\n') ++*pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++*pos;
    } else {
      break;
    }
  }
}

inline long parse_pgm_int(const std::string& buf, std::size_t* pos,
                          const std::string& path) {
  skip_pgm_space(buf, pos);
  std::size_t start = *pos;
  long value = 0;
  while (*pos < buf.size() && buf[*pos] >= '0' && buf[*pos] <= '9') {
    value = value * 10 + (buf[*pos] - '0');
    if (value > 1 << 20) break;
    ++*pos;
  }
  if (*pos == start) {
    throw io_error("read_pgm: expected integer at byte " +
                   std::to_string(start) + " in " + path);
  }
  return value;
}

}  // namespace internal

// Binary 8-bit PGM ("P5", maxval 255) only.
inline MediaPlane read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("read_pgm: cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') {
    throw io_error("read_pgm: not a binary PGM (want magic P5 at byte 0): " +
                   path);
  }
  std::size_t pos = 2;
  long width = internal::parse_pgm_int(buf, &pos, path);
  long height = internal::parse_pgm_int(buf, &pos, path);
  std::size_t maxval_at = pos;
  long maxval = internal::parse_pgm_int(buf, &pos, path);
  if (width <= 0 || height <= 0 || width > (1 << 14) || height > (1 << 14)) {
    throw io_error("read_pgm: implausible dims " + std::to_string(width) +
                   "x" + std::to_string(height) + " in " + path);
  }
  if (maxval != 255) {
    throw io_error("read_pgm: maxval must be 255, got " +
                   std::to_string(maxval) + " at byte " +
                   std::to_string(maxval_at) + " in " + path);
  }
  if (pos >= buf.size() || !(buf[pos] == ' ' || buf[pos] == '\t' ||
                             buf[pos] == '\r' || buf[pos] == '\n')) {
    throw io_error("read_pgm: missing whitespace after maxval at byte " +
                   std::to_string(pos) + " in " + path);
  }
  ++pos;
  std::size_t need = static_cast<std::size_t>(width) *
                     static_cast<std::size_t>(height);
  if (buf.size() - pos < need) {
    throw io_error("read_pgm: truncated payload, need " +
                   std::to_string(need) + " bytes, have " +
                   std::to_string(buf.size() - pos) + " in " + path);
  }
  MediaPlane plane;
  plane.width = static_cast<int>(width);
  plane.height = static_cast<int>(height);
  plane.pixels.assign(buf.begin() + pos, buf.begin() + pos + need);
  return plane;
}

inline void write_pgm(const MediaPlane& plane, const std::string& path) {
  if (plane.width <= 0 || plane.height <= 0 ||
      plane.pixels.size() != static_cast<std::size_t>(plane.width) *
                                 static_cast<std::size_t>(plane.height)) {
    throw std::invalid_argument("write_pgm: malformed plane");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_pgm: cannot open " + path);
  out << "P5\n" << plane.width << ' ' << plane.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(plane.pixels.data()),
            static_cast<std::streamsize>(plane.pixels.size()));
  if (!out) throw io_error("write_pgm: write failed for " + path);
}

}  // namespace sswm

#endif  // SSWM_MEDIA_HPP_
