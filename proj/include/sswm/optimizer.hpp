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

#ifndef SSWM_OPTIMIZER_HPP_
#define SSWM_OPTIMIZER_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sswm/errors.hpp"
#include "sswm/spread.hpp"

namespace sswm {

// Per-coefficient channel state: host deviation, perceptual weight, watermark
// power, Wiener and attack gains (gamma = gamma_a * gamma_w), attack noise,
// correlation weights, and the two Lagrange multipliers of the solved game.
struct ChannelParams {
  std::vector<double> sigma_x;
  std::vector<double> phi;
  std::vector<double> sigma_w;
  std::vector<double> gamma_w;
  std::vector<double> gamma_a;
  std::vector<double> gamma;
  std::vector<double> sigma_z;
  std::vector<double> beta;
  double lambda = 0.0;
  double chi = 0.0;

  std::size_t size() const { return sigma_x.size(); }
};

// Mean perceptually weighted squared-error allowances for the two players.
struct DistortionBudget {
  double embed_max = 0.0;
  double attack_max = 0.0;
};

inline double capacity_classic(double p, double q, double n) {
  if (p < 0.0 || q < 0.0 || !(n > 0.0)) {
    throw std::invalid_argument("capacity_classic: need P,Q >= 0 and N > 0");
  }
  return 0.5 * std::log2(1.0 + p / (q + n));
}

// Host known at the embedder: the host term drops from the capacity.
inline double capacity_side_informed(double p, double n) {
  if (p < 0.0 || !(n > 0.0)) {
    throw std::invalid_argument(
        "capacity_side_informed: need P >= 0 and N > 0");
  }
  return 0.5 * std::log2(1.0 + p / n);
}

inline double side_info_alpha(double p, double n) {
  if (p < 0.0 || !(n > 0.0)) {
    throw std::invalid_argument("side_info_alpha: need P >= 0 and N > 0");
  }
  return p / (p + n);
}

inline double wiener_gain(double sigma_x, double sigma_w) {
  if (sigma_x < 0.0 || sigma_w < 0.0) {
    throw std::invalid_argument("wiener_gain: negative deviation");
  }
  double d = sigma_x * sigma_x + sigma_w * sigma_w;
  if (!(d > 0.0)) {
    throw std::invalid_argument("wiener_gain: both deviations zero");
  }
  return sigma_x * sigma_x / d;
}

// Ratio at the extractor output, snr = P(P+Q+N) / (N(P+N)).
inline double output_snr(double p, double q, double n) {
  if (p < 0.0 || q < 0.0 || !(n > 0.0)) {
    throw std::invalid_argument("output_snr: need P,Q >= 0 and N > 0");
  }
  return p * (p + q + n) / (n * (p + n));
}

struct AttackResponse {
  double gamma = 0.0;
  double sigma_z = 0.0;
};

// Attacker cost at a candidate (gamma, sigma_z):
// J = gamma^2 sigma_w^2 / sigma_z^2 + lambda phi^2 (sigma_x^2 (1-gamma)^2 +
// gamma^2 sigma_w^2 + sigma_z^2).
inline double attack_objective(double gamma, double sigma_z, double sigma_w,
                               double sigma_x, double phi, double lambda) {
  double signal = gamma * sigma_w;
  double snr_term;
  if (signal == 0.0) {
    snr_term = 0.0;
  } else if (sigma_z == 0.0) {
    return std::numeric_limits<double>::infinity();
  } else {
    snr_term = signal * signal / (sigma_z * sigma_z);
  }
  double d = sigma_x * sigma_x * (1.0 - gamma) * (1.0 - gamma) +
             signal * signal + sigma_z * sigma_z;
  return snr_term + lambda * phi * phi * d;
}

// Closed-form minimizer of the attacker cost. Coefficients whose watermark is
// too strong to be worth scaling (sigma_w > sqrt(lambda) phi sigma_x^2) are
// erased outright.
inline AttackResponse attack_best_response(double sigma_w, double sigma_x,
                                           double phi, double lambda) {
  if (!(lambda > 0.0) || !(phi > 0.0)) {
    throw std::invalid_argument("attack_best_response: need lambda, phi > 0");
  }
  if (sigma_w < 0.0 || sigma_x < 0.0) {
    throw std::invalid_argument("attack_best_response: negative deviation");
  }
  AttackResponse r;
  double d = sigma_x * sigma_x + sigma_w * sigma_w;
  if (!(d > 0.0)) return r;
  if (sigma_w > std::sqrt(lambda) * phi * sigma_x * sigma_x) return r;
  r.gamma = (sigma_x * sigma_x - sigma_w / (phi * std::sqrt(lambda))) / d;
  if (r.gamma < 0.0) r.gamma = 0.0;
  double gw = sigma_x * sigma_x / d;
  double var = r.gamma * (gw - r.gamma) * d;
  r.sigma_z = var > 0.0 ? std::sqrt(var) : 0.0;
  return r;
}

// Closed-form maximizer of the embedder payoff under the anticipated attack.
// lambda prices the attacker's distortion, chi the embedder's own; the two
// are independent and either may be the larger. chi = 0 is the boundary case
// where the response lands exactly on the attacker's erasure threshold.
inline double embed_best_response(double sigma_x, double phi, double lambda,
                                  double chi) {
  if (!(lambda > 0.0) || !(phi > 0.0)) {
    throw std::invalid_argument("embed_best_response: need lambda, phi > 0");
  }
  if (chi < 0.0) {
    throw std::invalid_argument("embed_best_response: need chi >= 0");
  }
  if (sigma_x < 0.0) {
    throw std::invalid_argument("embed_best_response: negative deviation");
  }
  double a = phi * phi * (lambda - chi) * sigma_x * sigma_x - 1.0;
  double disc = a * a + 4.0 * lambda * phi * phi * sigma_x * sigma_x;
  double sw = (a + std::sqrt(disc)) / (2.0 * std::sqrt(lambda) * phi);
  return sw > 0.0 ? sw : 0.0;
}

// Embedder payoff at sigma_w with the attack best response plugged in:
// J_chi = J_lambda(best attack) - chi phi^2 sigma_x^2 sigma_w^2 /
// (sigma_x^2 + sigma_w^2).
inline double embed_objective(double sigma_w, double sigma_x, double phi,
                              double lambda, double chi) {
  AttackResponse ar = attack_best_response(sigma_w, sigma_x, phi, lambda);
  double j = attack_objective(ar.gamma, ar.sigma_z, sigma_w, sigma_x, phi,
                              lambda);
  double d = sigma_x * sigma_x + sigma_w * sigma_w;
  double embed_cost =
      d > 0.0 ? sigma_x * sigma_x * sigma_w * sigma_w / d : 0.0;
  return j - chi * phi * phi * embed_cost;
}

// D_xy = (1/m) sum phi^2 sigma_x^2 sigma_w^2 / (sigma_x^2 + sigma_w^2).
inline double distortion_embed(const std::vector<double>& phi,
                               const std::vector<double>& sigma_x,
                               const std::vector<double>& sigma_w) {
  std::size_t m = phi.size();
  internal::check_length(sigma_x.size(), m, "distortion_embed");
  internal::check_length(sigma_w.size(), m, "distortion_embed");
  if (m == 0) throw std::invalid_argument("distortion_embed: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double d = sigma_x[i] * sigma_x[i] + sigma_w[i] * sigma_w[i];
    if (d > 0.0) {
      acc += phi[i] * phi[i] * sigma_x[i] * sigma_x[i] * sigma_w[i] *
             sigma_w[i] / d;
    }
  }
  return acc / static_cast<double>(m);
}

inline double distortion_embed(const ChannelParams& params) {
  return distortion_embed(params.phi, params.sigma_x, params.sigma_w);
}

// D_xy' = (1/m) sum phi^2 (sigma_x^2 (1-gamma)^2 + gamma^2 sigma_w^2 +
// sigma_z^2) with gamma the combined gain.
inline double distortion_attack(const std::vector<double>& phi,
                                const std::vector<double>& sigma_x,
                                const std::vector<double>& sigma_w,
                                const std::vector<double>& gamma,
                                const std::vector<double>& sigma_z) {
  std::size_t m = phi.size();
  internal::check_length(sigma_x.size(), m, "distortion_attack");
  internal::check_length(sigma_w.size(), m, "distortion_attack");
  internal::check_length(gamma.size(), m, "distortion_attack");
  internal::check_length(sigma_z.size(), m, "distortion_attack");
  if (m == 0) throw std::invalid_argument("distortion_attack: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double keep = 1.0 - gamma[i];
    acc += phi[i] * phi[i] *
           (sigma_x[i] * sigma_x[i] * keep * keep +
            gamma[i] * gamma[i] * sigma_w[i] * sigma_w[i] +
            sigma_z[i] * sigma_z[i]);
  }
  return acc / static_cast<double>(m);
}

inline double distortion_attack(const ChannelParams& params) {
  return distortion_attack(params.phi, params.sigma_x, params.sigma_w,
                           params.gamma, params.sigma_z);
}

namespace internal {

struct GamePoint {
  std::vector<double> sigma_w;
  std::vector<double> gamma;
  std::vector<double> sigma_z;
  double d_embed = 0.0;
  double d_attack = 0.0;
};

// Best responses of both players at multipliers (lambda, chi).
inline void eval_game_point(const std::vector<double>& sigma_x,
                            const std::vector<double>& phi, double lambda,
                            double chi, GamePoint* pt) {
  std::size_t m = sigma_x.size();
  pt->sigma_w.resize(m);
  pt->gamma.resize(m);
  pt->sigma_z.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double sw = sigma_x[i] > 0.0
                    ? embed_best_response(sigma_x[i], phi[i], lambda, chi)
                    : 0.0;
    AttackResponse ar = attack_best_response(sw, sigma_x[i], phi[i], lambda);
    pt->sigma_w[i] = sw;
    pt->gamma[i] = ar.gamma;
    pt->sigma_z[i] = ar.sigma_z;
  }
  pt->d_embed = distortion_embed(phi, sigma_x, pt->sigma_w);
  pt->d_attack = distortion_attack(phi, sigma_x, pt->sigma_w, pt->gamma,
                                   pt->sigma_z);
}

// Attack distortion in the lambda -> 0 limit at fixed chi: the attacker
// settles at the scaling plateau gamma = c/(1+c) with c = chi phi^2 sigma_x^2
// while the embedding power vanishes.
inline double attack_floor(const std::vector<double>& sigma_x,
                           const std::vector<double>& phi, double chi) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma_x.size(); ++i) {
    double e = phi[i] * phi[i] * sigma_x[i] * sigma_x[i];
    acc += e / (1.0 + chi * e);
  }
  return acc / static_cast<double>(sigma_x.size());
}

// At fixed chi the joint-best-response attack distortion rises monotonically
// in lambda from attack_floor(chi) to the full-erasure level, so a plain
// bisection meets the attack budget. Returns false when the floor already
// exceeds the budget (chi prices embedding too gently for this attacker).
inline bool solve_attack_lambda(const std::vector<double>& sigma_x,
                                const std::vector<double>& phi, double chi,
                                double attack_max, double lambda_scale,
                                GamePoint* pt, double* lambda_out) {
  double lo = lambda_scale * 1e-9;
  eval_game_point(sigma_x, phi, lo, chi, pt);
  for (int shrink = 0; shrink < 20 && pt->d_attack > attack_max; ++shrink) {
    lo *= 1e-3;
    eval_game_point(sigma_x, phi, lo, chi, pt);
  }
  if (pt->d_attack > attack_max) return false;
  double hi = lo;
  for (int step = 0; step < 400; ++step) {
    hi = hi * 2.0;
    eval_game_point(sigma_x, phi, hi, chi, pt);
    if (pt->d_attack >= attack_max) break;
    lo = hi;
  }
  if (pt->d_attack < attack_max) return false;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    eval_game_point(sigma_x, phi, mid, chi, pt);
    if (pt->d_attack < attack_max) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= 1e-9 * hi ||
        std::abs(pt->d_attack - attack_max) <= 1e-9 * attack_max) {
      break;
    }
  }
  double mid = 0.5 * (lo + hi);
  eval_game_point(sigma_x, phi, mid, chi, pt);
  *lambda_out = mid;
  return true;
}

}  // namespace internal

// Solves the embedder/attacker distortion-constrained game. Along the
// manifold where the attack budget is met exactly (the inner bisection over
// lambda), the embedding distortion grows monotonically with chi: from zero
// just above the smallest chi the attack budget admits, toward the attack
// budget itself as chi -> infinity (the attacker degenerates to pure Wiener
// filtering). The outer bisection over chi therefore meets the embedding
// budget whenever embed_max < attack_max strictly.
inline ChannelParams solve_game(const std::vector<double>& sigma_x,
                                const std::vector<double>& phi,
                                const DistortionBudget& budget) {
  std::size_t m = sigma_x.size();
  internal::check_length(phi.size(), m, "solve_game");
  if (m == 0) throw std::invalid_argument("solve_game: empty host");
  double energy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sigma_x[i] < 0.0) {
      throw std::invalid_argument("solve_game: negative sigma_x");
    }
    if (!(phi[i] > 0.0)) {
      throw std::invalid_argument("solve_game: phi must be positive");
    }
    energy += phi[i] * phi[i] * sigma_x[i] * sigma_x[i];
  }
  if (!(energy > 0.0)) {
    throw std::invalid_argument("solve_game: host has no energy");
  }
  if (!(budget.embed_max > 0.0) || budget.embed_max > budget.attack_max) {
    throw std::invalid_argument(
        "solve_game: need 0 < embed_max <= attack_max");
  }
  double d_erase = energy / static_cast<double>(m);
  if (budget.attack_max >= d_erase * (1.0 - 1e-9)) {
    throw infeasible_error(
        "solve_game: attack budget covers erasing the host; no embedding "
        "survives");
  }

  double lambda_scale = static_cast<double>(m) / energy;
  internal::GamePoint pt;
  double lambda = 0.0;

  // Smallest chi the attack budget admits: below it even a vanishing
  // watermark cannot make the attacker spend this much.
  double chi_lo = 0.0, chi_hi = lambda_scale;
  while (internal::attack_floor(sigma_x, phi, chi_hi) >= budget.attack_max) {
    chi_lo = chi_hi;
    chi_hi *= 2.0;
  }
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (chi_lo + chi_hi);
    if (internal::attack_floor(sigma_x, phi, mid) >= budget.attack_max) {
      chi_lo = mid;
    } else {
      chi_hi = mid;
    }
    if (chi_hi - chi_lo <= 1e-9 * chi_hi) break;
  }
  chi_lo = chi_hi * (1.0 + 1e-6);
  if (!internal::solve_attack_lambda(sigma_x, phi, chi_lo, budget.attack_max,
                                     lambda_scale, &pt, &lambda)) {
    throw infeasible_error(
        "solve_game: attack budget has no interior solution");
  }
  if (pt.d_embed > budget.embed_max) {
    throw infeasible_error(
        "solve_game: embed budget exceeds the most gentle embedding the "
        "attack budget admits");
  }

  chi_hi = chi_lo;
  bool bracketed = false;
  for (int step = 0; step < 400; ++step) {
    chi_hi *= 2.0;
    if (!internal::solve_attack_lambda(sigma_x, phi, chi_hi,
                                       budget.attack_max, lambda_scale, &pt,
                                       &lambda)) {
      throw infeasible_error(
          "solve_game: attack budget lost while raising the embedding "
          "price");
    }
    if (pt.d_embed >= budget.embed_max) {
      bracketed = true;
      break;
    }
    chi_lo = chi_hi;
  }
  if (!bracketed) {
    throw infeasible_error(
        "solve_game: embed budget too close to the attack budget for an "
        "interior solution");
  }
  double chi = chi_hi;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (chi_lo + chi_hi);
    if (!internal::solve_attack_lambda(sigma_x, phi, mid, budget.attack_max,
                                       lambda_scale, &pt, &lambda)) {
      chi_lo = mid;
      continue;
    }
    if (pt.d_embed < budget.embed_max) {
      chi_lo = mid;
    } else {
      chi_hi = mid;
    }
    chi = mid;
    if (std::abs(pt.d_embed - budget.embed_max) <= 1e-9 * budget.embed_max ||
        chi_hi - chi_lo <= 1e-12 * chi_hi) {
      break;
    }
  }
  if (!internal::solve_attack_lambda(sigma_x, phi, chi, budget.attack_max,
                                     lambda_scale, &pt, &lambda)) {
    throw infeasible_error("solve_game: no consistent multiplier pair found");
  }
  if (std::abs(pt.d_embed - budget.embed_max) > 0.005 * budget.embed_max ||
      std::abs(pt.d_attack - budget.attack_max) >
          0.005 * budget.attack_max) {
    throw infeasible_error(
        "solve_game: budgets not met within tolerance at the solved "
        "multipliers");
  }

  ChannelParams params;
  params.sigma_x = sigma_x;
  params.phi = phi;
  params.sigma_w = pt.sigma_w;
  params.gamma = pt.gamma;
  params.sigma_z = pt.sigma_z;
  params.lambda = lambda;
  params.chi = chi;
  params.gamma_w.resize(m);
  params.gamma_a.resize(m);
  std::vector<double> beta_raw(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool live = sigma_x[i] > 0.0 || pt.sigma_w[i] > 0.0;
    params.gamma_w[i] = live ? wiener_gain(sigma_x[i], pt.sigma_w[i]) : 1.0;
    params.gamma_a[i] =
        params.gamma_w[i] > 0.0 ? params.gamma[i] / params.gamma_w[i] : 0.0;
    beta_raw[i] = sigma_x[i] > 0.0 ? phi[i] : 0.0;
  }
  params.beta = internal::normalize_beta(std::move(beta_raw));
  return params;
}

}  // namespace sswm

#endif  // SSWM_OPTIMIZER_HPP_
