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

#include "sswm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sswm/rng.hpp"

namespace sswm {
namespace {

TEST(Capacity, FrozenValuesAndRelations) {
  EXPECT_NEAR(capacity_classic(1.0, 1.0, 1.0), 0.29248, 1e-5);
  EXPECT_DOUBLE_EQ(capacity_side_informed(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(side_info_alpha(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(side_info_alpha(3.0, 1.0), 0.75);
  EXPECT_DOUBLE_EQ(capacity_classic(2.0, 0.0, 1.0),
                   capacity_side_informed(2.0, 1.0));

  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    double p = rng.next_double(0.1, 5.0);
    double q = rng.next_double(0.0, 5.0);
    double n = rng.next_double(0.1, 5.0);
    double classic = capacity_classic(p, q, n);
    double si = capacity_side_informed(p, n);
    EXPECT_LE(classic, si + 1e-12);
    if (q > 1e-9) EXPECT_LT(classic, si);
  }
  EXPECT_THROW(capacity_classic(1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(capacity_side_informed(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(capacity_side_informed(-1.0, 1.0), std::invalid_argument);
}

TEST(WienerGain, FrozenValues) {
  EXPECT_DOUBLE_EQ(wiener_gain(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(wiener_gain(2.0, 1.0), 0.8);
  EXPECT_DOUBLE_EQ(wiener_gain(3.0, 3.0), 0.5);
  EXPECT_THROW(wiener_gain(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(wiener_gain(-1.0, 1.0), std::invalid_argument);
}

TEST(OutputSnr, FrozenValuesAndFactorization) {
  EXPECT_DOUBLE_EQ(output_snr(1.0, 1.0, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(output_snr(2.0, 3.0, 1.0), 4.0);
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    double p = rng.next_double(0.01, 10.0);
    double q = rng.next_double(0.0, 10.0);
    double n = rng.next_double(0.01, 10.0);
    double snr = output_snr(p, q, n);
    double s = p + n;
    double factored = (1.0 + p / n) * (1.0 + p * q / (s * s)) - 1.0;
    EXPECT_NEAR(snr, factored, 1e-9 * (1.0 + snr));
  }
  EXPECT_THROW(output_snr(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(OutputSnr, MatchesMeasuredEstimatorGain) {
  // Synthetic side-informed embedding: the transmitted point is u + alpha*q
  // with alpha = P/(P+N). The linear estimate of that point from y = u+q+z
  // realizes the formula's ratio.
  const int samples = 1 << 20;
  double p = 2.0, q = 3.0, n = 1.0;
  double alpha = side_info_alpha(p, n);
  Rng rng(3);
  double svv = 0.0, svy = 0.0, syy = 0.0;
  std::vector<double> vs(samples), ys(samples);
  for (int t = 0; t < samples; ++t) {
    double u = std::sqrt(p) * rng.next_gaussian();
    double host = std::sqrt(q) * rng.next_gaussian();
    double noise = std::sqrt(n) * rng.next_gaussian();
    double v = u + alpha * host;
    double y = u + host + noise;
    vs[t] = v;
    ys[t] = y;
    svv += v * v;
    svy += v * y;
    syy += y * y;
  }
  double a = svy / syy;
  double mmse = 0.0;
  for (int t = 0; t < samples; ++t) {
    double e = vs[t] - a * ys[t];
    mmse += e * e;
  }
  double measured = svv / mmse - 1.0;
  double predicted = output_snr(p, q, n);
  EXPECT_NEAR(measured, predicted, 0.10 * predicted);
}

TEST(AttackBestResponse, ClosedFormBeatsGridSearch) {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    double sigma_x = rng.next_double(0.1, 3.0);
    double sigma_w = rng.next_double(0.0, 2.0);
    double phi = rng.next_double(0.5, 2.0);
    double lambda = rng.next_double(0.1, 10.0);

    AttackResponse r = attack_best_response(sigma_w, sigma_x, phi, lambda);
    double gw = wiener_gain(sigma_x, sigma_w);
    ASSERT_GE(r.gamma, 0.0);
    ASSERT_LE(r.gamma, gw + 1e-12);
    ASSERT_GE(r.sigma_z, 0.0);
    double best = attack_objective(r.gamma, r.sigma_z, sigma_w, sigma_x, phi,
                                   lambda);

    double d_br = distortion_attack({phi}, {sigma_x}, {sigma_w}, {r.gamma},
                                    {r.sigma_z});
    ASSERT_NEAR(d_br, phi * phi * sigma_x * sigma_x * (1.0 - r.gamma),
                1e-9 * (1.0 + d_br));

    double z_hi = sigma_x + sigma_w + 1.0;
    for (int gi = 0; gi <= 60; ++gi) {
      double gamma = gi / 60.0;
      for (int zi = 0; zi <= 60; ++zi) {
        double sigma_z = z_hi * zi / 60.0;
        double j = attack_objective(gamma, sigma_z, sigma_w, sigma_x, phi,
                                    lambda);
        ASSERT_LE(best, j + 1e-3)
            << "sx=" << sigma_x << " sw=" << sigma_w << " phi=" << phi
            << " lambda=" << lambda << " gamma=" << gamma
            << " sz=" << sigma_z;
      }
    }
  }
}

TEST(AttackBestResponse, FrozenCasesAndLimits) {
  // The spec-level pinned oracle point.
  AttackResponse r = attack_best_response(0.5, 1.0, 1.0, 4.0);
  EXPECT_NEAR(r.gamma, 0.6, 1e-12);
  EXPECT_NEAR(r.sigma_z * r.sigma_z, 0.15, 1e-12);

  // Expensive distortion: no attack.
  AttackResponse weak = attack_best_response(0.5, 1.0, 1.0, 1e12);
  EXPECT_NEAR(weak.gamma, wiener_gain(1.0, 0.5), 1e-5);
  EXPECT_LT(weak.sigma_z, 1e-2);

  // Watermark too strong to be worth keeping: erased.
  AttackResponse erased = attack_best_response(1.5, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(erased.gamma, 0.0);
  EXPECT_DOUBLE_EQ(erased.sigma_z, 0.0);

  AttackResponse dead = attack_best_response(0.0, 0.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(dead.gamma, 0.0);
  EXPECT_DOUBLE_EQ(dead.sigma_z, 0.0);

  EXPECT_THROW(attack_best_response(1.0, 1.0, 1.0, 0.0),
               std::invalid_argument);
  EXPECT_THROW(attack_best_response(1.0, 1.0, 0.0, 1.0),
               std::invalid_argument);
}

TEST(EmbedBestResponse, ClosedFormBeatsGridSearch) {
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    double sigma_x = rng.next_double(0.1, 3.0);
    double phi = rng.next_double(0.5, 2.0);
    double lambda = rng.next_double(0.1, 10.0);
    double chi = lambda * rng.next_double(0.05, 3.0);

    double sw = embed_best_response(sigma_x, phi, lambda, chi);
    ASSERT_GE(sw, 0.0);
    double best = embed_objective(sw, sigma_x, phi, lambda, chi);

    double hi = 1.5 * std::max(std::sqrt(lambda) * phi * sigma_x * sigma_x,
                               sigma_x) +
                1.0;
    for (int wi = 0; wi <= 300; ++wi) {
      double cand = hi * wi / 300.0;
      double j = embed_objective(cand, sigma_x, phi, lambda, chi);
      ASSERT_GE(best, j - 1e-3)
          << "sx=" << sigma_x << " phi=" << phi << " lambda=" << lambda
          << " chi=" << chi << " cand=" << cand;
    }
  }
}

TEST(EmbedBestResponse, FrozenCasesAndContinuity) {
  // chi = 0 puts the response exactly on the erasure boundary
  // sqrt(lambda) phi sigma_x^2; at unit parameters that is 1.
  EXPECT_NEAR(embed_best_response(1.0, 1.0, 1.0, 0.0), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(embed_best_response(0.0, 1.0, 1.0, 0.0), 0.0);

  // The response that provokes exactly the reference attack point: at
  // lambda = 4, chi = 6 the embedder picks sigma_w = 0.5, whose best-response
  // attack is gamma = 0.6, sigma_z^2 = 0.15.
  EXPECT_NEAR(embed_best_response(1.0, 1.0, 4.0, 6.0), 0.5, 1e-12);

  // Strictly decreasing in chi and continuous across chi = lambda.
  double lambda = 2.0, phi = 1.3, sigma_x = 1.7;
  double a = 4.0 * lambda * phi * phi * sigma_x * sigma_x;
  double at_equal = (-1.0 + std::sqrt(1.0 + a)) /
                    (2.0 * std::sqrt(lambda) * phi);
  double prev = embed_best_response(sigma_x, phi, lambda, 0.0);
  for (double frac : {0.5, 0.9, 0.999999, 1.0, 1.5, 3.0, 10.0}) {
    double cur = embed_best_response(sigma_x, phi, lambda, frac * lambda);
    EXPECT_LT(cur, prev);
    EXPECT_GT(cur, 0.0);
    prev = cur;
  }
  EXPECT_NEAR(embed_best_response(sigma_x, phi, lambda, lambda), at_equal,
              1e-12);
  double below = embed_best_response(sigma_x, phi, lambda, lambda - 1e-9);
  double above = embed_best_response(sigma_x, phi, lambda, lambda + 1e-9);
  EXPECT_NEAR(below, above, 1e-6);

  EXPECT_THROW(embed_best_response(1.0, 1.0, 1.0, -0.1),
               std::invalid_argument);
  EXPECT_THROW(embed_best_response(1.0, 1.0, 0.0, 0.5),
               std::invalid_argument);
}

TEST(Distortion, FrozenValuesAndDegenerates) {
  EXPECT_DOUBLE_EQ(distortion_embed({1.0}, {2.0}, {1.0}), 0.8);
  EXPECT_DOUBLE_EQ(distortion_embed({1.0}, {0.0}, {0.0}), 0.0);
  EXPECT_DOUBLE_EQ(
      distortion_attack({1.0}, {2.0}, {0.0}, {1.0}, {0.0}), 0.0);
  EXPECT_DOUBLE_EQ(distortion_embed({1.0, 1.0}, {2.0, 0.0}, {1.0, 0.0}), 0.4);
}

TEST(Distortion, MatchesSampledSignalsWithinTwoPercent) {
  const std::size_t m = 1 << 16;
  Rng rng(6);
  std::vector<double> phi(m), sigma_x(m), sigma_w(m), gamma(m), sigma_z(m);
  std::vector<double> gamma_w(m);
  for (std::size_t i = 0; i < m; ++i) {
    phi[i] = rng.next_double(0.5, 1.5);
    sigma_x[i] = rng.next_double(0.5, 3.0);
    sigma_w[i] = rng.next_double(0.1, 1.5);
    gamma_w[i] = wiener_gain(sigma_x[i], sigma_w[i]);
    gamma[i] = gamma_w[i] * rng.next_double(0.5, 1.0);
    sigma_z[i] = rng.next_double(0.0, 1.0);
  }
  double embed_acc = 0.0, attack_acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double x = sigma_x[i] * rng.next_gaussian();
    double w = sigma_w[i] * rng.next_gaussian();
    double noise = sigma_z[i] * rng.next_gaussian();
    double y = gamma_w[i] * (x + w);
    double y_attacked = (gamma[i] / gamma_w[i]) * y + noise;
    embed_acc += phi[i] * phi[i] * (x - y) * (x - y);
    attack_acc += phi[i] * phi[i] * (x - y_attacked) * (x - y_attacked);
  }
  double d_embed = distortion_embed(phi, sigma_x, sigma_w);
  double d_attack = distortion_attack(phi, sigma_x, sigma_w, gamma, sigma_z);
  EXPECT_NEAR(embed_acc / m, d_embed, 0.02 * d_embed);
  EXPECT_NEAR(attack_acc / m, d_attack, 0.02 * d_attack);
}

std::vector<double> uniform_host(std::size_t m, double lo, double hi,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> sigma_x(m);
  for (auto& s : sigma_x) s = rng.next_double(lo, hi);
  return sigma_x;
}

TEST(SolveGame, MeetsBothBudgetsAndInvariants) {
  const std::size_t m = 2048;
  std::vector<double> sigma_x = uniform_host(m, 1.0, 6.0, 7);
  sigma_x[17] = 0.0;
  sigma_x[1024] = 0.0;
  std::vector<double> phi(m, 1.0);
  double d_erase = 0.0;
  for (std::size_t i = 0; i < m; ++i) d_erase += sigma_x[i] * sigma_x[i];
  d_erase /= m;

  DistortionBudget budget;
  budget.embed_max = 0.02 * d_erase;
  budget.attack_max = 0.10 * d_erase;
  ChannelParams params = solve_game(sigma_x, phi, budget);

  EXPECT_NEAR(distortion_embed(params), budget.embed_max,
              0.005 * budget.embed_max);
  EXPECT_NEAR(distortion_attack(params), budget.attack_max,
              0.005 * budget.attack_max);
  EXPECT_GT(params.lambda, 0.0);
  EXPECT_GT(params.chi, 0.0);
  double beta_norm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    EXPECT_GE(params.gamma_a[i], 0.0);
    EXPECT_GE(params.gamma_w[i], 0.0);
    EXPECT_LE(params.gamma_w[i], 1.0);
    EXPECT_LE(params.gamma[i], params.gamma_w[i] + 1e-12);
    EXPECT_GE(params.sigma_z[i], 0.0);
    EXPECT_NEAR(params.gamma[i], params.gamma_a[i] * params.gamma_w[i],
                1e-12);
    if (sigma_x[i] == 0.0) {
      EXPECT_DOUBLE_EQ(params.sigma_w[i], 0.0);
      EXPECT_DOUBLE_EQ(params.gamma_w[i], 1.0);
      EXPECT_DOUBLE_EQ(params.beta[i], 0.0);
    }
    beta_norm += params.beta[i] * params.beta[i];
  }
  EXPECT_NEAR(beta_norm / m, 1.0, 1e-9);
}

TEST(SolveGame, SaddleHasNoUnilateralImprovement) {
  const std::size_t m = 256;
  std::vector<double> sigma_x = uniform_host(m, 1.0, 4.0, 8);
  std::vector<double> phi(m, 1.0);
  double d_erase = 0.0;
  for (double s : sigma_x) d_erase += s * s;
  d_erase /= m;
  DistortionBudget budget{0.03 * d_erase, 0.12 * d_erase};
  ChannelParams p = solve_game(sigma_x, phi, budget);

  for (std::size_t i = 0; i < m; i += 17) {
    double base_embed = embed_objective(p.sigma_w[i], sigma_x[i], phi[i],
                                        p.lambda, p.chi);
    for (double f : {0.95, 1.05}) {
      double j = embed_objective(f * p.sigma_w[i], sigma_x[i], phi[i],
                                 p.lambda, p.chi);
      EXPECT_LE(j, base_embed + 1e-9 * (1.0 + std::abs(base_embed)));
    }
    double base_attack = attack_objective(p.gamma[i], p.sigma_z[i],
                                          p.sigma_w[i], sigma_x[i], phi[i],
                                          p.lambda);
    for (double fg : {0.95, 1.0, 1.05}) {
      for (double fz : {0.95, 1.0, 1.05}) {
        double j = attack_objective(fg * p.gamma[i], fz * p.sigma_z[i],
                                    p.sigma_w[i], sigma_x[i], phi[i],
                                    p.lambda);
        EXPECT_GE(j, base_attack - 1e-9 * (1.0 + std::abs(base_attack)));
      }
    }
  }
}

double game_ebn0(const ChannelParams& p, int n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double signal = p.gamma[i] * p.sigma_w[i];
    if (signal > 0.0) acc += signal * signal / (p.sigma_z[i] * p.sigma_z[i]);
  }
  return acc / n;
}

TEST(SolveGame, StrongerAttackBudgetNeverHelpsTheEmbedder) {
  const std::size_t m = 1024;
  std::vector<double> sigma_x = uniform_host(m, 1.0, 5.0, 9);
  std::vector<double> phi(m, 1.0);
  double d_erase = 0.0;
  for (double s : sigma_x) d_erase += s * s;
  d_erase /= m;

  double embed_max = 0.02 * d_erase;
  double prev = 1e300;
  for (double frac : {0.05, 0.15, 0.35, 0.6}) {
    ChannelParams p = solve_game(sigma_x, phi,
                                 DistortionBudget{embed_max, frac * d_erase});
    double ebn0 = game_ebn0(p, 132);
    EXPECT_LT(ebn0, prev * (1.0 + 1e-9));
    prev = ebn0;
  }
}

TEST(SolveGame, TightAttackBudgetDegeneratesToWienerOnly) {
  const std::size_t m = 512;
  std::vector<double> sigma_x = uniform_host(m, 2.0, 4.0, 10);
  std::vector<double> phi(m, 1.0);
  double d_erase = 0.0;
  for (double s : sigma_x) d_erase += s * s;
  d_erase /= m;

  double embed_max = 0.02 * d_erase;
  ChannelParams p = solve_game(sigma_x, phi,
                               DistortionBudget{embed_max, 1.02 * embed_max});
  double mean_gamma_a = 0.0, mean_noise = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_gamma_a += p.gamma_a[i];
    mean_noise += p.sigma_z[i] * p.sigma_z[i];
  }
  mean_gamma_a /= m;
  mean_noise /= m;
  EXPECT_GT(mean_gamma_a, 0.9);
  EXPECT_LT(mean_noise, 0.05 * embed_max);
}

TEST(SolveGame, ConcentratesEnergyOnStrongCoefficients) {
  const std::size_t m = 1000;
  std::vector<double> sigma_x(m);
  for (std::size_t i = 0; i < m; ++i) sigma_x[i] = (i % 2 == 0) ? 1.0 : 10.0;
  std::vector<double> phi(m, 1.0);
  double d_erase = 0.0;
  for (double s : sigma_x) d_erase += s * s;
  d_erase /= m;
  ChannelParams p = solve_game(
      sigma_x, phi, DistortionBudget{0.01 * d_erase, 0.05 * d_erase});
  double low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sigma_x[i] == 1.0) {
      low += p.sigma_w[i] * p.sigma_w[i];
    } else {
      high += p.sigma_w[i] * p.sigma_w[i];
    }
  }
  EXPECT_GT(high, 3.0 * low);
}

TEST(SolveGame, RejectsInfeasibleBudgets) {
  const std::size_t m = 256;
  std::vector<double> sigma_x = uniform_host(m, 1.0, 4.0, 11);
  std::vector<double> phi(m, 1.0);
  double d_erase = 0.0;
  for (double s : sigma_x) d_erase += s * s;
  d_erase /= m;

  // Attack budget large enough to erase the host outright.
  EXPECT_THROW(solve_game(sigma_x, phi,
                          DistortionBudget{0.02 * d_erase, 1.01 * d_erase}),
               infeasible_error);
  // Malformed budget ordering.
  EXPECT_THROW(solve_game(sigma_x, phi,
                          DistortionBudget{0.1 * d_erase, 0.05 * d_erase}),
               std::invalid_argument);
  EXPECT_THROW(solve_game({1.0, 2.0}, {1.0}, DistortionBudget{1.0, 2.0}),
               std::invalid_argument);
  EXPECT_THROW(solve_game({0.0, 0.0}, {1.0, 1.0}, DistortionBudget{0.1, 0.2}),
               std::invalid_argument);
}

TEST(SolveGame, TinyEmbedBudgetStillSolves) {
  const std::size_t m = 256;
  std::vector<double> sigma_x = uniform_host(m, 1.0, 4.0, 12);
  std::vector<double> phi(m, 1.0);
  double d_erase = 0.0;
  for (double s : sigma_x) d_erase += s * s;
  d_erase /= m;
  DistortionBudget budget{1e-6 * d_erase, 0.1 * d_erase};
  ChannelParams p = solve_game(sigma_x, phi, budget);
  EXPECT_NEAR(distortion_embed(p), budget.embed_max,
              0.005 * budget.embed_max);
  EXPECT_NEAR(distortion_attack(p), budget.attack_max,
              0.005 * budget.attack_max);
  for (std::size_t i = 0; i < m; ++i) {
    EXPECT_LT(p.sigma_w[i], 0.1 * sigma_x[i]);
  }
}

}  // namespace
}  // namespace sswm
