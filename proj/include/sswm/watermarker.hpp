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

#ifndef SSWM_WATERMARKER_HPP_
#define SSWM_WATERMARKER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sswm/codebook.hpp"
#include "sswm/optimizer.hpp"
#include "sswm/spread.hpp"

namespace sswm {

namespace internal {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// c_j = sum_i a_i G_ij^2. Carrier entries live in {0, -1, +1}, so the
// squared matrix is all-ones (dense) or the support indicator (orthogonal).
inline std::vector<double> correlate_squared(const std::vector<double>& a,
                                             const CarrierMatrix& g) {
  check_length(a.size(), g.rows(), "correlate_squared");
  if (g.mode() == CarrierMode::kDense) {
    double s = 0.0;
    for (double v : a) s += v;
    return std::vector<double>(g.cols(), s);
  }
  std::vector<double> signs = g.spread_rows(std::vector<double>(g.cols(), 1.0));
  std::vector<double> folded(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) folded[i] = a[i] * signs[i];
  return g.correlate(folded);
}

}  // namespace internal

// Margin of a subspace point against the decoding cone of codeword u:
// (t . u/|u|)^2 (1 + tan^2 theta) - |t|^2, non-negative inside the cone.
inline double cone_margin(const std::vector<double>& t,
                          const std::vector<double>& u, double theta) {
  internal::check_length(u.size(), t.size(), "cone_margin");
  double u2 = internal::dot(u, u);
  if (!(u2 > 0.0)) {
    throw std::invalid_argument("cone_margin: zero codeword");
  }
  double corr = internal::dot(t, u);
  double tan_t = std::tan(theta);
  return corr * corr / u2 * (1.0 + tan_t * tan_t) - internal::dot(t, t);
}

// Watermark of norm sqrt(nP) maximizing the cone margin of x_st + w. The
// optimum lies in span{x_st, u}; there it is a sphere-constrained quadratic,
// solved through its scalar multiplier equation. The correlation decoder is
// sign-sensitive, so only targets with (x_st + w) . u >= 0 are considered;
// anti-correlated hosts are handled by an angular scan over the decodable
// arc, which also backstops the closed form near degenerate hosts.
inline std::vector<double> max_robust_watermark(const std::vector<double>& x_st,
                                                const std::vector<double>& u,
                                                double theta, double p) {
  std::size_t n = u.size();
  internal::check_length(x_st.size(), n, "max_robust_watermark");
  if (n == 0) throw std::invalid_argument("max_robust_watermark: empty");
  if (!(theta > 0.0) || !(theta < 1.5707963267948966)) {
    throw std::invalid_argument("max_robust_watermark: theta out of (0,pi/2)");
  }
  if (!(p > 0.0)) {
    throw std::invalid_argument("max_robust_watermark: P must be > 0");
  }
  double u2 = internal::dot(u, u);
  if (std::abs(u2 - static_cast<double>(n)) > 1e-6 * static_cast<double>(n)) {
    throw std::invalid_argument("max_robust_watermark: codeword norm");
  }
  double r = std::sqrt(static_cast<double>(n) * p);
  double tan_t = std::tan(theta);
  double t2 = tan_t * tan_t;

  double inv_un = 1.0 / std::sqrt(u2);
  std::vector<double> u_hat(n), v_hat(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) u_hat[j] = u[j] * inv_un;
  double xa = internal::dot(x_st, u_hat);
  double xb2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    v_hat[j] = x_st[j] - xa * u_hat[j];
    xb2 += v_hat[j] * v_hat[j];
  }
  double xb = std::sqrt(xb2);
  double x_norm = std::sqrt(internal::dot(x_st, x_st));
  if (xb > x_norm * 1e-14 && xb > 0.0) {
    for (double& v : v_hat) v /= xb;
  } else {
    xb = 0.0;
    // Collinear host: pick any direction orthogonal to u for the scan.
    std::size_t idx = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (std::abs(u_hat[j]) < std::abs(u_hat[idx])) idx = j;
    }
    std::fill(v_hat.begin(), v_hat.end(), 0.0);
    if (n > 1) {
      v_hat[idx] = 1.0;
      double proj = u_hat[idx];
      double norm2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        v_hat[j] -= proj * u_hat[j];
        norm2 += v_hat[j] * v_hat[j];
      }
      double norm = std::sqrt(norm2);
      for (double& v : v_hat) v /= norm;
    }
  }

  // Target components (a, b) along u_hat, v_hat of x_st + w. The closed
  // form covers xa >= 0; anti-correlated hosts have no interior stationary
  // point on the decodable side, so they start from the closest approach
  // a = xa + r and are resolved by the scan below.
  auto objective = [&](double aa, double bb) {
    return t2 * aa * aa - bb * bb;
  };
  double a, b;
  if (xa == 0.0) {
    double mu = xb / r - 1.0;
    if (mu > t2) {
      a = 0.0;
      b = mu * xb / (1.0 + mu);
    } else {
      b = t2 * xb / (1.0 + t2);
      double gap = xb - b;
      double rem = r * r - gap * gap;
      a = rem > 0.0 ? std::sqrt(rem) : 0.0;
    }
  } else if (xa > 0.0) {
    auto secular = [&](double mu) {
      double da = xa * t2 / (mu - t2);
      double db = xb / (1.0 + mu);
      return da * da + db * db - r * r;
    };
    double lo = t2 + xa * t2 / r;
    double hi = lo;
    for (int step = 0; step < 200 && secular(hi) > 0.0; ++step) {
      hi = 2.0 * hi + 1.0;
    }
    for (int iter = 0; iter < 200; ++iter) {
      double mid = 0.5 * (lo + hi);
      if (secular(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double mu = 0.5 * (lo + hi);
    a = mu * xa / (mu - t2);
    b = mu * xb / (1.0 + mu);
  } else {
    a = xa + r;
    b = xb;
  }
  double best = objective(a, b);

  // Angular scan over the decodable arc of the same plane, with ternary
  // refinement of the best grid point.
  if (n > 1) {
    double c0 = std::max(-1.0, std::min(1.0, -xa / r));
    double psi_m = std::acos(c0);
    if (psi_m > 0.0) {
      double step = 2.0 * psi_m / 720.0;
      double best_psi = 0.0;
      double best_scan = -1.0 / 0.0;
      for (int s = 0; s <= 720; ++s) {
        double psi = -psi_m + step * s;
        double v = objective(xa + r * std::cos(psi), xb + r * std::sin(psi));
        if (v > best_scan) {
          best_scan = v;
          best_psi = psi;
        }
      }
      if (best_scan > best + 1e-9 * (1.0 + std::abs(best))) {
        double lo_psi = std::max(-psi_m, best_psi - step);
        double hi_psi = std::min(psi_m, best_psi + step);
        for (int iter = 0; iter < 200; ++iter) {
          double m1 = lo_psi + (hi_psi - lo_psi) / 3.0;
          double m2 = hi_psi - (hi_psi - lo_psi) / 3.0;
          double f1 = objective(xa + r * std::cos(m1), xb + r * std::sin(m1));
          double f2 = objective(xa + r * std::cos(m2), xb + r * std::sin(m2));
          if (f1 < f2) {
            lo_psi = m1;
          } else {
            hi_psi = m2;
          }
        }
        double psi = 0.5 * (lo_psi + hi_psi);
        double cand_a = xa + r * std::cos(psi);
        double cand_b = xb + r * std::sin(psi);
        if (objective(cand_a, cand_b) > best) {
          a = cand_a;
          b = cand_b;
        }
      }
    }
  } else if (xa + r > a) {
    a = xa + r;
    b = 0.0;
  }

  std::vector<double> w(n);
  double norm2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = (a - xa) * u_hat[j] + (b - xb) * v_hat[j];
    norm2 += w[j] * w[j];
  }
  double scale = r / std::sqrt(norm2);
  for (double& v : w) v *= scale;
  return w;
}

struct EmbedConfig {
  CodebookSpec spec;
  CarrierMatrix carriers;
  ChannelParams params;
  double p = 0.0;
  double epsilon = 0.0;
  int max_iters = 10;
};

struct EmbedResult {
  std::vector<double> y;
  std::vector<double> w_st;
  std::vector<double> codeword;
  int iterations = 0;
  bool converged = false;
  // Cone margin of each iterate's embedding against the side information
  // its own interference produces; the first entry scores the uncompensated
  // one-shot embedding, the last the returned one (exact at convergence).
  std::vector<double> objectives;
};

// Iterative informed embedding: the watermark's own inter-symbol
// interference is folded back into the side information until the subspace
// watermark stabilizes. Non-convergence at the cap is reported, not thrown.
inline EmbedResult embed_informed(const std::vector<double>& x,
                                  const Bits& message,
                                  const EmbedConfig& cfg) {
  const CarrierMatrix& g = cfg.carriers;
  std::size_t m = g.rows();
  std::size_t n = g.cols();
  internal::check_length(x.size(), m, "embed_informed");
  internal::check_length(cfg.params.size(), m, "embed_informed");
  if (static_cast<std::size_t>(cfg.spec.codeword_length) != n) {
    throw std::invalid_argument("embed_informed: codeword/carrier mismatch");
  }
  if (!(cfg.p > 0.0)) {
    throw std::invalid_argument("embed_informed: P must be > 0");
  }
  if (cfg.max_iters < 1) {
    throw std::invalid_argument("embed_informed: max_iters < 1");
  }
  double root_np = std::sqrt(static_cast<double>(n) * cfg.p);
  double eps = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-3 * root_np;
  const ChannelParams& pr = cfg.params;

  std::vector<double> base = forward_host(x, pr.beta, pr.gamma, g);
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) {
    weight[i] = pr.beta[i] * pr.gamma[i] * pr.sigma_w[i] / root_np;
  }
  std::vector<double> self = internal::correlate_squared(weight, g);

  std::vector<double> x_st = base;
  DecodeResult dec = nearest_in_subcodebook(x_st, message, cfg.spec);
  std::vector<double> w_tilde =
      max_robust_watermark(x_st, dec.codeword, cfg.spec.theta, cfg.p);

  EmbedResult res;
  auto margin_at = [&](const std::vector<double>& w,
                       const std::vector<double>& u) {
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = x_st[j] + w[j];
    return cone_margin(t, u, cfg.spec.theta);
  };

  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    std::vector<double> w_prev = w_tilde;
    std::vector<double> u_prev = dec.codeword;
    std::vector<double> spread = g.spread_rows(w_prev);
    std::vector<double> acc(m);
    for (std::size_t i = 0; i < m; ++i) acc[i] = weight[i] * spread[i];
    std::vector<double> fold = g.correlate(acc);
    for (std::size_t j = 0; j < n; ++j) {
      x_st[j] = base[j] + fold[j] - self[j] * w_prev[j];
    }
    res.objectives.push_back(margin_at(w_prev, u_prev));
    dec = nearest_in_subcodebook(x_st, message, cfg.spec);
    w_tilde = max_robust_watermark(x_st, dec.codeword, cfg.spec.theta, cfg.p);
    double diff2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = w_tilde[j] - w_prev[j];
      diff2 += d * d;
    }
    if (std::sqrt(diff2) <= eps) {
      res.converged = true;
      break;
    }
  }
  res.objectives.push_back(margin_at(w_tilde, dec.codeword));
  res.iterations = std::min(iter, cfg.max_iters);
  res.w_st = w_tilde;
  res.codeword = dec.codeword;
  res.y = embed_spatial(x, w_tilde, pr.sigma_w, pr.gamma_w, g, cfg.p);
  return res;
}

inline Bits extract_plain(const std::vector<double>& yp,
                          const std::vector<double>& beta,
                          const CodebookSpec& spec, const CarrierMatrix& g) {
  if (static_cast<std::size_t>(spec.codeword_length) != g.cols()) {
    throw std::invalid_argument("extract_plain: codeword/carrier mismatch");
  }
  return nearest_any(forward_received(yp, beta, g), spec).message;
}

// True channel state handed to the receiver by the caller; blind estimation
// is out of scope.
struct GenieInfo {
  std::vector<double> sigma_w;
  std::vector<double> gamma;
  std::vector<double> beta;
};

struct ExtractResult {
  Bits message;
  std::vector<double> codeword;
  int iterations = 0;
  bool fixed_point = false;
  double metric = 0.0;
};

namespace internal {

// One interference-cancellation pass: subtract the interference a candidate
// codeword explains from every subspace component. The candidate's subspace
// watermark is approximated by its own direction at full power, making the
// per-coefficient scale gamma_i sigma_w_i / sqrt(n).
inline std::vector<double> isi_cancel_pass(const std::vector<double>& y_st0,
                                           const std::vector<double>& weight,
                                           const std::vector<double>& self,
                                           const std::vector<double>& u,
                                           const CarrierMatrix& g) {
  std::vector<double> spread = g.spread_rows(u);
  std::vector<double> acc(weight.size());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    acc[i] = weight[i] * spread[i];
  }
  std::vector<double> fold = g.correlate(acc);
  std::vector<double> y_st(y_st0.size());
  for (std::size_t j = 0; j < y_st0.size(); ++j) {
    y_st[j] = y_st0[j] - fold[j] + self[j] * u[j];
  }
  return y_st;
}

}  // namespace internal

// Decoder-side interference cancellation: decode, explain the interference
// of the decoded codeword, subtract it, decode again, until the codeword is
// its own explanation. A codeword cycle ends at the cap with the
// best-metric iterate.
inline ExtractResult extract_isi_cancel(const std::vector<double>& yp,
                                        const GenieInfo& genie,
                                        const CodebookSpec& spec,
                                        const CarrierMatrix& g,
                                        int max_iters = 10) {
  std::size_t m = g.rows();
  std::size_t n = g.cols();
  internal::check_length(yp.size(), m, "extract_isi_cancel");
  internal::check_length(genie.sigma_w.size(), m, "extract_isi_cancel");
  internal::check_length(genie.gamma.size(), m, "extract_isi_cancel");
  internal::check_length(genie.beta.size(), m, "extract_isi_cancel");
  if (static_cast<std::size_t>(spec.codeword_length) != n) {
    throw std::invalid_argument("extract_isi_cancel: codeword mismatch");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("extract_isi_cancel: max_iters < 1");
  }
  double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) {
    weight[i] = genie.beta[i] * genie.gamma[i] * genie.sigma_w[i] / root_n;
  }
  std::vector<double> self = internal::correlate_squared(weight, g);
  std::vector<double> y0 = forward_received(yp, genie.beta, g);

  DecodeResult cur = nearest_any(y0, spec);
  ExtractResult best;
  best.message = cur.message;
  best.codeword = cur.codeword;
  best.metric = cur.metric;

  int iter = 0;
  bool fixed = false;
  for (iter = 1; iter <= max_iters; ++iter) {
    Bits prev = cur.data;
    std::vector<double> y_st =
        internal::isi_cancel_pass(y0, weight, self, cur.codeword, g);
    cur = nearest_any(y_st, spec);
    if (cur.metric > best.metric) {
      best.message = cur.message;
      best.codeword = cur.codeword;
      best.metric = cur.metric;
    }
    if (cur.data == prev) {
      fixed = true;
      break;
    }
  }

  ExtractResult res;
  res.iterations = std::min(iter, max_iters);
  res.fixed_point = fixed;
  if (fixed) {
    res.message = cur.message;
    res.codeword = cur.codeword;
    res.metric = cur.metric;
  } else {
    res.message = best.message;
    res.codeword = best.codeword;
    res.metric = best.metric;
  }
  return res;
}

}  // namespace sswm

#endif  // SSWM_WATERMARKER_HPP_
