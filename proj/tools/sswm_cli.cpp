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

// Command-line front door: embed/extract/attack on PGM images or synthetic
// Gaussian hosts, parameter solving, and benchmark sweeps emitting CSV.
// Exit codes: 0 ok, 2 bad configuration, 3 infeasible budgets, 4 file I/O.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "sswm/sswm.hpp"

namespace sswm {
namespace {

constexpr std::uint64_t kHostSalt = 1;
constexpr std::uint64_t kMessageSalt = 2;
constexpr std::uint64_t kCarrierSalt = 3;
constexpr std::uint64_t kAttackSalt = 4;

// Synthetic hosts draw per-coefficient deviations from this range, the same
// image-like band the benchmark preset uses.
constexpr double kSyntheticSigmaLo = 10.0;
constexpr double kSyntheticSigmaHi = 40.0;

std::string base_name(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string dir_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

enum class PayloadKind { kImage, kSignal };

PayloadKind sniff_payload(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  char magic[8] = {};
  in.read(magic, 8);
  if (in.gcount() >= 2 && magic[0] == 'P' && magic[1] == '5') {
    return PayloadKind::kImage;
  }
  if (in.gcount() == 8 && std::memcmp(magic, "SSWMSIG1", 8) == 0) {
    return PayloadKind::kSignal;
  }
  throw io_error("unrecognized payload (want binary PGM or signal blob): " +
                 path);
}

// Host coefficients plus the per-coefficient channel model inputs. Synthetic
// hosts have no image dimensions and unit perceptual weights.
struct Host {
  std::vector<double> coeffs;
  std::vector<double> sigma_x;
  std::vector<double> phi;
  int width = 0;
  int height = 0;

  bool image() const { return width > 0; }
  std::size_t m() const { return coeffs.size(); }
};

Host host_from_plane(const MediaPlane& plane) {
  HostModel model = analyze_host(plane);
  Host host;
  host.coeffs = std::move(model.coeffs);
  host.sigma_x = std::move(model.sigma_x);
  host.phi = std::move(model.phi);
  host.width = model.width;
  host.height = model.height;
  return host;
}

Host make_host(const std::string& in, std::uint64_t synthetic,
               std::uint64_t seed) {
  if (in.empty() == (synthetic == 0)) {
    throw std::invalid_argument("pass exactly one of --in and --synthetic");
  }
  if (!in.empty()) return host_from_plane(read_pgm(in));
  SyntheticHost sh = synthetic_host(synthetic, kSyntheticSigmaLo,
                                    kSyntheticSigmaHi, mix64(seed ^ kHostSalt));
  Host host;
  host.coeffs = std::move(sh.x);
  host.sigma_x = std::move(sh.sigma_x);
  host.phi.assign(host.coeffs.size(), 1.0);
  return host;
}

// Watermark profile for a run with no anticipated attack: sigma_w_i = s/phi_i
// with s bisected until the formula distortion meets the target, Wiener
// embedding gains, unit attack gains. Targets at or above the host energy
// are unreachable at any power.
ChannelParams direct_channel(const std::vector<double>& sigma_x,
                             const std::vector<double>& phi, double dxy) {
  std::size_t m = sigma_x.size();
  if (!(dxy > 0.0)) throw std::invalid_argument("embed: --dxy must be > 0");
  double d_erase = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    d_erase += phi[i] * phi[i] * sigma_x[i] * sigma_x[i];
  }
  d_erase /= static_cast<double>(m);
  if (dxy >= d_erase * (1.0 - 1e-9)) {
    throw infeasible_error(
        "embed: --dxy target is at or above the host energy");
  }
  std::vector<double> sw(m);
  auto shoot = [&](double s) {
    for (std::size_t i = 0; i < m; ++i) sw[i] = s / phi[i];
    return distortion_embed(phi, sigma_x, sw);
  };
  double hi = 1.0;
  int step = 0;
  while (shoot(hi) < dxy && ++step < 200) hi *= 2.0;
  if (shoot(hi) < dxy) {
    throw infeasible_error("embed: --dxy target is out of reach");
  }
  double lo = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    (shoot(mid) < dxy ? lo : hi) = mid;
  }
  shoot(0.5 * (lo + hi));
  ChannelParams params;
  params.sigma_x = sigma_x;
  params.phi = phi;
  params.sigma_w = sw;
  params.gamma_w.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    params.gamma_w[i] = wiener_gain(sigma_x[i], sw[i]);
  }
  params.gamma_a.assign(m, 1.0);
  params.gamma = params.gamma_w;
  params.sigma_z.assign(m, 0.0);
  params.beta = beta_weights_perceptual(phi);
  return params;
}

// Index bits, when not pinned, follow the index-bit rule at this operating
// point with the carrier interference added to the anticipated attack noise.
CodebookSpec derive_spec(int k, int index_bits, int n,
                         const ChannelParams& params) {
  TrellisCode code;
  if (n == 0) n = default_codeword_length(k, code);
  if (index_bits < 0) {
    SubspaceEnergies e =
        subspace_energies(params.beta, params.gamma, params.sigma_x,
                          params.sigma_z, params.sigma_w, n);
    double interference =
        isi_energy(params.beta, params.gamma, params.sigma_w, n, e.p);
    index_bits = index_bit_count(e.p, e.q, e.n + interference, n, k);
  }
  return make_codebook_spec(k, index_bits, n, code);
}

double corr_snr_db(const std::vector<double>& y_st,
                   const std::vector<double>& u) {
  double uu = 0.0, yu = 0.0, yy = 0.0;
  for (std::size_t j = 0; j < y_st.size(); ++j) {
    uu += u[j] * u[j];
    yu += y_st[j] * u[j];
    yy += y_st[j] * y_st[j];
  }
  std::size_t n = y_st.size();
  if (n < 2 || !(uu > 0.0)) return kMetricCapDb;
  double a2 = yu * yu / uu;
  double noise = yy - a2;
  if (!(noise > 0.0)) return kMetricCapDb;
  double snr = a2 * static_cast<double>(n - 1) /
               (static_cast<double>(n) * noise);
  if (!(snr > 0.0)) return -kMetricCapDb;
  return std::clamp(10.0 * std::log10(snr), -kMetricCapDb, kMetricCapDb);
}

// ---------------------------------------------------------------------------
// embed

struct EmbedArgs {
  std::string in;
  std::uint64_t synthetic = 0;
  int k = 64;
  std::string rate = "1/2";
  int n = 0;
  int index_bits = -1;
  std::string message_hex;
  double dxy = 7.0;
  double dxyp = 0.0;
  std::string carriers = "dense";
  std::string cancel = "both";
  std::uint64_t seed = 1;
  std::string out;
};

int run_embed(const EmbedArgs& args) {
  if (args.rate != "1/2") {
    throw std::invalid_argument("embed: only --rate 1/2 is supported");
  }
  CarrierMode carrier_mode = carrier_mode_from(args.carriers);
  CancelMode cancel = cancel_mode_from(args.cancel);
  Host host = make_host(args.in, args.synthetic, args.seed);
  ChannelParams params =
      args.dxyp > 0.0
          ? solve_game(host.sigma_x, host.phi,
                       DistortionBudget{args.dxy, args.dxyp})
          : direct_channel(host.sigma_x, host.phi, args.dxy);
  CodebookSpec spec = derive_spec(args.k, args.index_bits, args.n, params);
  // Orthogonal rows each feed one column, thinning the per-coefficient mark
  // by sqrt(n); widen the spread profile so the distortion budget is still
  // met. The genie records the realized per-coefficient deviation.
  std::vector<double> sigma_w_mark = params.sigma_w;
  if (carrier_mode == CarrierMode::kOrthogonal) {
    double root_n = std::sqrt(static_cast<double>(spec.codeword_length));
    for (double& s : params.sigma_w) s *= root_n;
  }
  std::uint64_t carrier_seed = mix64(args.seed ^ kCarrierSalt);
  RunContext ctx = make_context(spec, params, carrier_mode, carrier_seed);
  Bits message = args.message_hex.empty()
                     ? random_message(args.k, mix64(args.seed ^ kMessageSalt))
                     : bits_from_hex(args.message_hex, args.k);

  std::vector<double> y;
  int iterations = 0;
  bool converged = true;
  if (cancel == CancelMode::kEmbedder || cancel == CancelMode::kBoth) {
    double eps = 1e-6 * std::sqrt(
                            static_cast<double>(ctx.spec.codeword_length) *
                            ctx.p);
    EmbedConfig cfg{ctx.spec, ctx.carriers, ctx.params, ctx.p, eps, 10};
    EmbedResult res = embed_informed(host.coeffs, message, cfg);
    y = std::move(res.y);
    iterations = res.iterations;
    converged = res.converged;
  } else {
    const ChannelParams& pr = ctx.params;
    std::vector<double> x_st =
        forward_host(host.coeffs, pr.beta, pr.gamma, ctx.carriers);
    DecodeResult dec = nearest_in_subcodebook(x_st, message, ctx.spec);
    std::vector<double> w =
        max_robust_watermark(x_st, dec.codeword, ctx.spec.theta, ctx.p);
    y = embed_spatial(host.coeffs, w, pr.sigma_w, pr.gamma_w, ctx.carriers,
                      ctx.p);
  }

  std::string payload = args.out + (host.image() ? ".pgm" : ".sig");
  double measured = 0.0;
  double psnr_db = 0.0;
  if (host.image()) {
    MediaPlane marked = real_to_plane(idwt3(y, host.width, host.height),
                                      host.width, host.height);
    write_pgm(marked, payload);
    std::vector<double> rounded =
        dwt3(plane_to_real(marked), host.width, host.height);
    measured = weighted_mse(host.coeffs, rounded, host.phi);
    psnr_db = psnr(plane_to_real(marked),
                   idwt3(host.coeffs, host.width, host.height));
  } else {
    write_signal(payload, y);
    measured = weighted_mse(host.coeffs, y, host.phi);
  }

  RunSidecar sc;
  sc.k = args.k;
  sc.index_bits = ctx.spec.index_bits;
  sc.n = ctx.spec.codeword_length;
  sc.rate_inverse = ctx.spec.code.rate_inverse();
  sc.constraint_length = ctx.spec.code.constraint_length;
  sc.m = host.m();
  sc.carrier_mode = carrier_mode;
  sc.carrier_seed = carrier_seed;
  sc.p = ctx.p;
  sc.cancel = cancel_mode_name(cancel);
  sc.message_hex = hex_from_bits(message);
  sc.signal_file = base_name(payload);
  sc.genie_file = base_name(args.out) + ".genie";
  write_sidecar(args.out + ".sidecar", sc);

  ChannelState state;
  state.sigma_x = ctx.params.sigma_x;
  state.sigma_w = std::move(sigma_w_mark);
  state.gamma_w = ctx.params.gamma_w;
  state.gamma_a.assign(host.m(), 1.0);
  state.beta = ctx.params.beta;
  write_genie(args.out + ".genie", state);

  std::printf("out=%s\n", payload.c_str());
  std::printf("sidecar=%s\n", (args.out + ".sidecar").c_str());
  std::printf("message_hex=%s\n", sc.message_hex.c_str());
  std::printf("n=%d\n", ctx.spec.codeword_length);
  std::printf("index_bits=%d\n", ctx.spec.index_bits);
  std::printf("pad_bits=%d\n", ctx.spec.pad_bits);
  std::printf("iterations=%d\n", iterations);
  std::printf("converged=%d\n", converged ? 1 : 0);
  std::printf("dxy=%.6g\n", measured);
  std::printf("wpsnr=%.3f\n", wpsnr_from_distortion(measured));
  if (host.image()) std::printf("psnr=%.3f\n", psnr_db);
  return 0;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string sidecar;
  std::string in;
  std::string cancel = "decoder";
  bool blind = false;
};

int run_extract(const ExtractArgs& args) {
  RunSidecar sc = read_sidecar(args.sidecar);
  TrellisCode code;
  if (sc.rate_inverse != code.rate_inverse() ||
      sc.constraint_length != code.constraint_length) {
    throw std::invalid_argument("extract: sidecar names an unsupported code");
  }
  CancelMode cancel = cancel_mode_from(args.cancel);
  if (cancel != CancelMode::kNone && cancel != CancelMode::kDecoder) {
    throw std::invalid_argument(
        "extract: --cancel must be none or decoder at the receiver");
  }
  if (args.blind && cancel == CancelMode::kDecoder) {
    throw std::invalid_argument(
        "extract: cancellation needs the recorded channel state; pass "
        "--cancel none with --blind");
  }

  std::string in = args.in;
  if (in.empty()) {
    if (sc.signal_file.empty()) {
      throw std::invalid_argument(
          "extract: sidecar has no signal file; pass --in");
    }
    in = dir_of(args.sidecar) + sc.signal_file;
  }
  std::vector<double> yp;
  if (sniff_payload(in) == PayloadKind::kImage) {
    MediaPlane plane = read_pgm(in);
    yp = dwt3(plane_to_real(plane), plane.width, plane.height);
  } else {
    yp = read_signal(in);
  }
  if (yp.size() != sc.m) {
    throw std::invalid_argument("extract: payload length does not match the "
                                "sidecar");
  }

  CodebookSpec spec = make_codebook_spec(sc.k, sc.index_bits, sc.n, code);
  CarrierMatrix g(sc.carrier_seed, sc.m,
                  static_cast<std::size_t>(sc.n), sc.carrier_mode);

  GenieInfo genie;
  if (!args.blind) {
    if (sc.genie_file.empty()) {
      throw std::invalid_argument(
          "extract: sidecar has no channel state file; pass --blind");
    }
    ChannelState state = read_genie(dir_of(args.sidecar) + sc.genie_file);
    if (state.sigma_x.size() != sc.m) {
      throw std::invalid_argument(
          "extract: channel state length does not match the sidecar");
    }
    genie = state.genie();
  } else {
    genie.beta.assign(sc.m, 1.0);
  }

  Bits decoded;
  std::vector<double> codeword;
  std::vector<double> y_st = forward_received(yp, genie.beta, g);
  if (cancel == CancelMode::kDecoder) {
    ExtractResult res = extract_isi_cancel(yp, genie, spec, g);
    decoded = res.message;
    codeword = res.codeword;
    double root_n = std::sqrt(static_cast<double>(sc.n));
    std::vector<double> weight(sc.m);
    for (std::size_t i = 0; i < sc.m; ++i) {
      weight[i] = genie.beta[i] * genie.gamma[i] * genie.sigma_w[i] / root_n;
    }
    std::vector<double> self = internal::correlate_squared(weight, g);
    y_st = internal::isi_cancel_pass(y_st, weight, self, codeword, g);
    std::printf("iterations=%d\n", res.iterations);
    std::printf("fixed_point=%d\n", res.fixed_point ? 1 : 0);
  } else {
    DecodeResult dec = nearest_any(y_st, spec);
    decoded = dec.message;
    codeword = dec.codeword;
  }

  std::printf("message_hex=%s\n", hex_from_bits(decoded).c_str());
  if (!sc.message_hex.empty()) {
    Bits truth = bits_from_hex(sc.message_hex, sc.k);
    double rate = ber(truth, decoded);
    std::printf("ber=%.6g\n", rate);
    std::printf("wrong_bits=%d\n",
                static_cast<int>(std::lround(rate * sc.k)));
  }
  std::printf("corr_snr_db=%.3f\n", corr_snr_db(y_st, codeword));
  return 0;
}

// ---------------------------------------------------------------------------
// attack

struct AttackArgs {
  std::string in;
  std::string out;
  std::string sidecar;
  std::string attack;
  double level = 0.0;
  int quality = 75;
  double dxyp = 0.0;
  std::uint64_t seed = 1;
};

int run_attack(const AttackArgs& args) {
  PayloadKind kind = sniff_payload(args.in);
  bool tracked = !args.sidecar.empty();
  RunSidecar sc;
  ChannelState state;
  if (tracked) {
    sc = read_sidecar(args.sidecar);
    if (sc.genie_file.empty()) {
      throw std::invalid_argument("attack: sidecar has no channel state file");
    }
    state = read_genie(dir_of(args.sidecar) + sc.genie_file);
  }

  MediaPlane plane;
  std::vector<double> coeffs;
  if (kind == PayloadKind::kImage) {
    plane = read_pgm(args.in);
    coeffs = dwt3(plane_to_real(plane), plane.width, plane.height);
  } else {
    coeffs = read_signal(args.in);
  }
  if (tracked && coeffs.size() != sc.m) {
    throw std::invalid_argument(
        "attack: payload length does not match the sidecar");
  }

  std::uint64_t noise_seed = mix64(args.seed ^ kAttackSalt);
  std::vector<double> attacked;
  MediaPlane attacked_plane;
  bool have_plane = false;
  if (args.attack == "awgn") {
    if (args.level < 0.0) {
      throw std::invalid_argument("attack: --level must be >= 0");
    }
    attacked = awgn(coeffs, args.level, noise_seed);
  } else if (args.attack == "jpeg") {
    if (kind != PayloadKind::kImage) {
      throw std::invalid_argument(
          "attack: jpeg applies to PGM payloads only");
    }
    attacked_plane = jpeg_surrogate(plane, args.quality);
    attacked = dwt3(plane_to_real(attacked_plane), plane.width, plane.height);
    have_plane = true;
    if (tracked) {
      double yy = 0.0, ay = 0.0;
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        yy += coeffs[i] * coeffs[i];
        ay += attacked[i] * coeffs[i];
      }
      double gain = yy > 0.0 ? std::max(ay / yy, 0.0) : 1.0;
      for (double& ga : state.gamma_a) ga *= gain;
      std::printf("mean_gamma_a=%.6g\n", gain);
    }
  } else if (args.attack == "optimal") {
    if (!tracked) {
      throw std::invalid_argument("attack: --attack optimal needs --sidecar");
    }
    if (!(args.dxyp > 0.0)) {
      throw std::invalid_argument("attack: --attack optimal needs --dxyp > 0");
    }
    std::vector<double> phi;
    if (kind == PayloadKind::kImage) {
      phi = perceptual_phi(state.sigma_x,
                           subband_map3(plane.width, plane.height))
                .phi;
    } else {
      phi.assign(coeffs.size(), 1.0);
    }
    OptimalAttackPlan plan =
        plan_optimal_attack(state.sigma_x, state.sigma_w, phi, args.dxyp);
    attacked = sawgn(coeffs, plan.gamma_a, plan.sigma_z, noise_seed);
    double mean = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      state.gamma_a[i] *= plan.gamma_a[i];
      mean += plan.gamma_a[i];
    }
    std::printf("mean_gamma_a=%.6g\n", mean / static_cast<double>(coeffs.size()));
  } else {
    throw std::invalid_argument(
        "attack: --attack must be awgn, jpeg, or optimal");
  }

  std::string payload =
      args.out + (kind == PayloadKind::kImage ? ".pgm" : ".sig");
  if (kind == PayloadKind::kImage) {
    if (!have_plane) {
      attacked_plane = real_to_plane(
          idwt3(attacked, plane.width, plane.height), plane.width,
          plane.height);
    }
    write_pgm(attacked_plane, payload);
    std::printf("out=%s\n", payload.c_str());
    std::printf("attack_mse=%.6g\n",
                mse(plane_to_real(plane), plane_to_real(attacked_plane)));
    std::printf("psnr=%.3f\n", psnr(plane, attacked_plane));
  } else {
    write_signal(payload, attacked);
    std::printf("out=%s\n", payload.c_str());
    std::printf("attack_mse=%.6g\n", mse(coeffs, attacked));
  }

  if (tracked) {
    sc.signal_file = base_name(payload);
    sc.genie_file = base_name(args.out) + ".genie";
    write_sidecar(args.out + ".sidecar", sc);
    write_genie(args.out + ".genie", state);
    std::printf("sidecar=%s\n", (args.out + ".sidecar").c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  BenchPreset preset;
  int reps = 4;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string modes = "none,decoder";
  int levels = 8;
  double lo = 1.0 / 3.0;
  double hi = 3.0;
  std::string out;
};

std::vector<CancelMode> parse_modes(const std::string& csv) {
  std::vector<CancelMode> modes;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = csv.find(',', start);
    std::size_t end = comma == std::string::npos ? csv.size() : comma;
    modes.push_back(cancel_mode_from(csv.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return modes;
}

int run_sweep(const SweepArgs& args) {
  SweepConfig cfg;
  cfg.preset = args.preset;
  cfg.levels = awgn_levels(args.preset, args.lo, args.hi, args.levels);
  cfg.modes = parse_modes(args.modes);
  cfg.reps = args.reps;
  cfg.seed = args.seed;
  cfg.threads = args.threads;
  std::vector<SweepRow> rows = sweep(cfg);
  if (args.out.empty()) {
    write_sweep_csv(std::cout, rows);
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw io_error("sweep: cannot open " + args.out);
    write_sweep_csv(out, rows);
    if (!out) throw io_error("sweep: write failed: " + args.out);
    std::printf("out=%s\n", args.out.c_str());
    std::printf("rows=%d\n", static_cast<int>(rows.size()));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string in;
  std::uint64_t synthetic = 0;
  double dxy = 7.0;
  double dxyp = 0.0;
  std::uint64_t seed = 1;
};

int run_solve(const SolveArgs& args) {
  if (!(args.dxyp > 0.0)) {
    throw std::invalid_argument("solve: --dxyp must be > 0");
  }
  Host host = make_host(args.in, args.synthetic, args.seed);
  ChannelParams params =
      solve_game(host.sigma_x, host.phi,
                 DistortionBudget{args.dxy, args.dxyp});
  double mean_w = 0.0, mean_g = 0.0, mean_z = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    mean_w += params.sigma_w[i];
    mean_g += params.gamma[i];
    mean_z += params.sigma_z[i];
  }
  double m = static_cast<double>(params.size());
  std::printf("lambda=%.17g\n", params.lambda);
  std::printf("chi=%.17g\n", params.chi);
  std::printf("dxy=%.6g\n", distortion_embed(params));
  std::printf("dxyp=%.6g\n", distortion_attack(params));
  std::printf("wpsnr_embed=%.3f\n",
              wpsnr_from_distortion(distortion_embed(params)));
  std::printf("wpsnr_attack=%.3f\n",
              wpsnr_from_distortion(distortion_attack(params)));
  std::printf("mean_sigma_w=%.6g\n", mean_w / m);
  std::printf("mean_gamma=%.6g\n", mean_g / m);
  std::printf("mean_sigma_z=%.6g\n", mean_z / m);
  return 0;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"side-informed spread-transform watermarking"};
  app.require_subcommand(1);

  EmbedArgs embed_args;
  CLI::App* embed =
      app.add_subcommand("embed", "embed a message into a host");
  embed->add_option("--in", embed_args.in, "host image (binary PGM)");
  embed->add_option("--synthetic", embed_args.synthetic,
                    "synthetic Gaussian host with this many coefficients");
  embed->add_option("--k", embed_args.k, "message bits");
  embed->add_option("--rate", embed_args.rate, "code rate (only 1/2)");
  embed->add_option("--n", embed_args.n,
                    "codeword length (0 derives it from --k)");
  embed->add_option("--index-bits", embed_args.index_bits,
                    "index bits (-1 derives them from the channel)");
  embed->add_option("--message-hex", embed_args.message_hex,
                    "message as hex (default: drawn from --seed)");
  embed->add_option("--dxy", embed_args.dxy,
                    "embedding distortion target (weighted MSE)");
  embed->add_option("--dxyp", embed_args.dxyp,
                    "anticipated attack distortion; enables the game solver");
  embed->add_option("--carriers", embed_args.carriers, "dense or orthogonal");
  embed->add_option("--cancel", embed_args.cancel,
                    "none, decoder, embedder, or both");
  embed->add_option("--seed", embed_args.seed, "run seed");
  embed->add_option("--out", embed_args.out, "output base path")->required();

  ExtractArgs extract_args;
  CLI::App* extract =
      app.add_subcommand("extract", "recover the message from a payload");
  extract->add_option("--sidecar", extract_args.sidecar, "run sidecar path")
      ->required();
  extract->add_option("--in", extract_args.in,
                      "payload (default: the sidecar's signal file)");
  extract->add_option("--cancel", extract_args.cancel, "none or decoder");
  extract->add_flag("--blind", extract_args.blind,
                    "ignore the recorded channel state (flat weights)");

  AttackArgs attack_args;
  CLI::App* attack =
      app.add_subcommand("attack", "distort a payload and track the channel");
  attack->add_option("--in", attack_args.in, "payload to attack")->required();
  attack->add_option("--out", attack_args.out, "output base path")->required();
  attack->add_option("--sidecar", attack_args.sidecar,
                     "run sidecar to carry over (required for optimal)");
  attack->add_option("--attack", attack_args.attack,
                     "awgn, jpeg, or optimal")
      ->required();
  attack->add_option("--level", attack_args.level,
                     "awgn noise power per coefficient");
  attack->add_option("--quality", attack_args.quality,
                     "jpeg quality 1..100 (base table scaled by 5000/q "
                     "percent below 50, else by 200-2q)");
  attack->add_option("--dxyp", attack_args.dxyp,
                     "optimal attack distortion budget (weighted MSE)");
  attack->add_option("--seed", attack_args.seed, "noise seed");

  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "robustness curves over AWGN levels, as CSV");
  sweep_cmd->add_option("--k", sweep_args.preset.k, "message bits");
  sweep_cmd->add_option("--index-bits", sweep_args.preset.index_bits,
                        "index bits");
  sweep_cmd->add_option("--n", sweep_args.preset.n, "codeword length");
  sweep_cmd->add_option("--m", sweep_args.preset.m, "host coefficients");
  sweep_cmd->add_option("--sigma-w", sweep_args.preset.sigma_w,
                        "watermark deviation");
  sweep_cmd->add_option("--reps", sweep_args.reps, "hosts per point");
  sweep_cmd->add_option("--seed", sweep_args.seed, "sweep seed");
  sweep_cmd->add_option("--threads", sweep_args.threads, "worker threads");
  sweep_cmd->add_option("--modes", sweep_args.modes,
                        "cancellation modes, comma separated");
  sweep_cmd->add_option("--levels", sweep_args.levels, "attack level count");
  sweep_cmd->add_option("--lo", sweep_args.lo,
                        "lowest level over the carrier interference");
  sweep_cmd->add_option("--hi", sweep_args.hi,
                        "highest level over the carrier interference");
  sweep_cmd->add_option("--out", sweep_args.out,
                        "CSV path (default: stdout)");

  SolveArgs solve_args;
  CLI::App* solve =
      app.add_subcommand("solve", "solve the embedder/attacker game");
  solve->add_option("--in", solve_args.in, "host image (binary PGM)");
  solve->add_option("--synthetic", solve_args.synthetic,
                    "synthetic Gaussian host with this many coefficients");
  solve->add_option("--dxy", solve_args.dxy, "embedding distortion budget");
  solve->add_option("--dxyp", solve_args.dxyp, "attack distortion budget")
      ->required();
  solve->add_option("--seed", solve_args.seed, "host seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (embed->parsed()) return run_embed(embed_args);
    if (extract->parsed()) return run_extract(extract_args);
    if (attack->parsed()) return run_attack(attack_args);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args);
    if (solve->parsed()) return run_solve(solve_args);
  } catch (const infeasible_error& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 3;
  } catch (const io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace sswm

int main(int argc, char** argv) { return sswm::run(argc, argv); }
