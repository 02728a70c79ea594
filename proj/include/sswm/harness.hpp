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

#ifndef SSWM_HARNESS_HPP_
#define SSWM_HARNESS_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sswm/channel.hpp"
#include "sswm/codebook.hpp"
#include "sswm/errors.hpp"
#include "sswm/media.hpp"
#include "sswm/optimizer.hpp"
#include "sswm/rng.hpp"
#include "sswm/spread.hpp"
#include "sswm/trellis.hpp"
#include "sswm/watermarker.hpp"

namespace sswm {

// ---------------------------------------------------------------------------
// Messages.

inline Bits random_message(int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("random_message: k < 1");
  Rng rng(seed);
  Bits msg(static_cast<std::size_t>(k));
  for (auto& b : msg) b = static_cast<std::uint8_t>(rng.next_below(2));
  return msg;
}

// Big-endian nibbles, one hex digit per four bits; a trailing partial nibble
// sits in the high bits of the last digit.
inline std::string hex_from_bits(const Bits& bits) {
  if (bits.empty()) throw std::invalid_argument("hex_from_bits: empty");
  static const char* digits = "0123456789abcdef";
  std::string hex;
  hex.reserve((bits.size() + 3) / 4);
  for (std::size_t d = 0; d * 4 < bits.size(); ++d) {
    int v = 0;
    for (std::size_t t = 0; t < 4; ++t) {
      std::size_t j = 4 * d + t;
      std::uint8_t bit = j < bits.size() ? bits[j] : 0;
      if (bit > 1) throw std::invalid_argument("hex_from_bits: bit not 0/1");
      v = (v << 1) | bit;
    }
    hex.push_back(digits[v]);
  }
  return hex;
}

inline Bits bits_from_hex(const std::string& hex, int k) {
  if (k < 1) throw std::invalid_argument("bits_from_hex: k < 1");
  std::size_t want = (static_cast<std::size_t>(k) + 3) / 4;
  if (hex.size() != want) {
    throw std::invalid_argument("bits_from_hex: need " + std::to_string(want) +
                                " hex digits for " + std::to_string(k) +
                                " bits");
  }
  Bits bits(static_cast<std::size_t>(k));
  for (std::size_t d = 0; d < hex.size(); ++d) {
    char c = hex[d];
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw std::invalid_argument("bits_from_hex: not a hex digit");
    }
    for (int t = 0; t < 4; ++t) {
      std::size_t j = 4 * d + static_cast<std::size_t>(t);
      bool bit = (v >> (3 - t)) & 1;
      if (j < bits.size()) {
        bits[j] = bit ? 1 : 0;
      } else if (bit) {
        throw std::invalid_argument("bits_from_hex: padding bits set");
      }
    }
  }
  return bits;
}

// ---------------------------------------------------------------------------
// Synthetic hosts and flat channels.

struct SyntheticHost {
  std::vector<double> x;
  std::vector<double> sigma_x;
};

// Gaussian host whose per-coefficient deviations are drawn uniformly from
// [sigma_lo, sigma_hi].
inline SyntheticHost synthetic_host(std::size_t m, double sigma_lo,
                                    double sigma_hi, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("synthetic_host: empty");
  if (!(sigma_lo > 0.0) || sigma_hi < sigma_lo) {
    throw std::invalid_argument(
        "synthetic_host: need 0 < sigma_lo <= sigma_hi");
  }
  Rng rng(seed);
  SyntheticHost host;
  host.sigma_x.resize(m);
  host.x.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = rng.next_double(sigma_lo, sigma_hi);
    host.sigma_x[i] = s;
    host.x[i] = s * rng.next_gaussian();
  }
  return host;
}

// Channel state for a synthetic run: unit perceptual weights, one watermark
// deviation everywhere, Wiener gains, flat correlation weights, and no
// anticipated attack.
inline ChannelParams flat_channel(std::vector<double> sigma_x,
                                  double sigma_w) {
  std::size_t m = sigma_x.size();
  if (m == 0) throw std::invalid_argument("flat_channel: empty");
  if (!(sigma_w > 0.0)) {
    throw std::invalid_argument("flat_channel: sigma_w must be > 0");
  }
  for (double s : sigma_x) {
    if (!(s > 0.0)) {
      throw std::invalid_argument("flat_channel: sigma_x must be > 0");
    }
  }
  ChannelParams cp;
  cp.sigma_x = std::move(sigma_x);
  cp.phi.assign(m, 1.0);
  cp.sigma_w.assign(m, sigma_w);
  cp.gamma_w.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    cp.gamma_w[i] = wiener_gain(cp.sigma_x[i], sigma_w);
  }
  cp.gamma_a.assign(m, 1.0);
  cp.gamma = cp.gamma_w;
  cp.sigma_z.assign(m, 0.0);
  cp.beta.assign(m, 1.0);
  return cp;
}

// ---------------------------------------------------------------------------
// Run context.

// Everything a run needs besides the host realization.
struct RunContext {
  CodebookSpec spec;
  CarrierMatrix carriers;
  ChannelParams params;
  double p = 0.0;
};

// Received per-symbol watermark power of this carrier layout: the mean
// square of the per-column correlation gains of the embed weights. Dense
// carriers give every column the same gain, which recovers the closed form
// (sum beta gamma sigma_w)^2 / n; orthogonal columns see only their own
// rows, so the power drops by roughly n^2. Embedding against this value
// makes the receiver-side watermark land at unit scale either way.
inline double carrier_subspace_power(const ChannelParams& params,
                                     const CarrierMatrix& g) {
  std::size_t m = g.rows();
  internal::check_length(params.size(), m, "carrier_subspace_power");
  double root_n = std::sqrt(static_cast<double>(g.cols()));
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) {
    weight[i] =
        params.beta[i] * params.gamma[i] * params.sigma_w[i] / root_n;
  }
  std::vector<double> gains = internal::correlate_squared(weight, g);
  double acc = 0.0;
  for (double c : gains) acc += c * c;
  return acc / static_cast<double>(g.cols());
}

inline RunContext make_context(CodebookSpec spec, ChannelParams params,
                               CarrierMode mode, std::uint64_t carrier_seed) {
  std::size_t m = params.size();
  if (m == 0) throw std::invalid_argument("make_context: empty channel");
  CarrierMatrix g(carrier_seed, m,
                  static_cast<std::size_t>(spec.codeword_length), mode);
  double p = carrier_subspace_power(params, g);
  return RunContext{std::move(spec), std::move(g), std::move(params), p};
}

// ---------------------------------------------------------------------------
// Benchmark preset.

// Synthetic benchmark operating point: a 512x512-coefficient host with
// image-like deviations, watermark deviation 2.5 everywhere, and 64 message
// bits in a length-162 codebook. The index budget matches the index-bit
// rule at this operating point, with the carrier interference standing in
// for the attack noise.
struct BenchPreset {
  int k = 64;
  int index_bits = 8;
  int n = 162;
  std::size_t m = 262144;
  double sigma_w = 2.5;
  double sigma_lo = 10.0;
  double sigma_hi = 40.0;
};

inline CodebookSpec preset_spec(const BenchPreset& bp) {
  return make_codebook_spec(bp.k, bp.index_bits, bp.n, TrellisCode{});
}

namespace internal {

// E[(gamma_w sigma_w)^2] over the preset's deviation range, by Simpson's
// rule; gamma_w is the Wiener gain.
inline double expected_carrier_weight2(const BenchPreset& bp) {
  auto f = [&](double sx) {
    double g = wiener_gain(sx, bp.sigma_w) * bp.sigma_w;
    return g * g;
  };
  const int steps = 200;
  double h = (bp.sigma_hi - bp.sigma_lo) / steps;
  if (!(h > 0.0)) return f(bp.sigma_lo);
  double acc = f(bp.sigma_lo) + f(bp.sigma_hi);
  for (int s = 1; s < steps; ++s) {
    acc += f(bp.sigma_lo + h * s) * (s % 2 ? 4.0 : 2.0);
  }
  return acc * h / 3.0 / (bp.sigma_hi - bp.sigma_lo);
}

}  // namespace internal

// Attack powers placing the subspace noise at count log-spaced multiples,
// from lo to hi, of the expected carrier interference of the preset.
inline std::vector<double> awgn_levels(const BenchPreset& bp, double lo,
                                       double hi, int count) {
  if (count < 1) throw std::invalid_argument("awgn_levels: count < 1");
  if (!(lo > 0.0) || hi < lo) {
    throw std::invalid_argument("awgn_levels: need 0 < lo <= hi");
  }
  if (bp.n < 2) throw std::invalid_argument("awgn_levels: n < 2");
  double per_coeff = internal::expected_carrier_weight2(bp) *
                     static_cast<double>(bp.n - 1) /
                     static_cast<double>(bp.n);
  std::vector<double> levels(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    double ratio =
        count == 1 ? lo
                   : lo * std::pow(hi / lo,
                                   static_cast<double>(j) / (count - 1));
    levels[static_cast<std::size_t>(j)] = per_coeff * ratio;
  }
  return levels;
}

// ---------------------------------------------------------------------------
// Signal-to-noise measurement.

// Mean squared subspace residual per symbol once the forwarded host and the
// embedded watermark are explained: what remains is carrier interference
// plus attack noise.
inline double residual_power(const std::vector<double>& y_st,
                             const std::vector<double>& x_st_fwd,
                             const std::vector<double>& w_st) {
  std::size_t n = y_st.size();
  internal::check_length(x_st_fwd.size(), n, "residual_power");
  internal::check_length(w_st.size(), n, "residual_power");
  if (n == 0) throw std::invalid_argument("residual_power: empty");
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double r = y_st[j] - x_st_fwd[j] - w_st[j];
    acc += r * r;
  }
  return acc / static_cast<double>(n);
}

// Watermark power over disturbance power in dB, capped like the other
// metrics when the disturbance vanishes.
inline double ebn0_db(double p, double disturbance) {
  if (!(p > 0.0)) throw std::invalid_argument("ebn0_db: P must be > 0");
  if (!(disturbance > 0.0)) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(p / disturbance));
}

// ---------------------------------------------------------------------------
// Cancellation modes.

enum class CancelMode { kNone, kDecoder, kEmbedder, kBoth };

inline const char* cancel_mode_name(CancelMode mode) {
  switch (mode) {
    case CancelMode::kNone: return "none";
    case CancelMode::kDecoder: return "decoder";
    case CancelMode::kEmbedder: return "embedder";
    case CancelMode::kBoth: return "both";
  }
  throw std::invalid_argument("cancel_mode_name: unknown mode");
}

inline CancelMode cancel_mode_from(const std::string& name) {
  if (name == "none") return CancelMode::kNone;
  if (name == "decoder") return CancelMode::kDecoder;
  if (name == "embedder") return CancelMode::kEmbedder;
  if (name == "both") return CancelMode::kBoth;
  throw std::invalid_argument("cancel_mode_from: unknown mode: " + name);
}

inline const char* carrier_mode_name(CarrierMode mode) {
  switch (mode) {
    case CarrierMode::kDense: return "dense";
    case CarrierMode::kOrthogonal: return "orthogonal";
  }
  throw std::invalid_argument("carrier_mode_name: unknown mode");
}

inline CarrierMode carrier_mode_from(const std::string& name) {
  if (name == "dense") return CarrierMode::kDense;
  if (name == "orthogonal") return CarrierMode::kOrthogonal;
  throw std::invalid_argument("carrier_mode_from: unknown mode: " + name);
}

// ---------------------------------------------------------------------------
// Benchmark sweep.

struct SweepConfig {
  BenchPreset preset;
  std::vector<double> levels;
  std::vector<CancelMode> modes = {CancelMode::kNone, CancelMode::kDecoder};
  int reps = 4;
  std::uint64_t seed = 1;
  int threads = 1;
  int max_iters = 10;
};

struct SweepRow {
  int level = 0;
  CancelMode mode = CancelMode::kNone;
  double noise_power = 0.0;
  int reps = 0;
  double ber = 0.0;
  double ebn0_db = 0.0;
  double theory_db = 0.0;
  double embed_iterations = 0.0;
  double embed_converged = 0.0;
};

namespace internal {

struct SweepCell {
  double resid = 0.0;
  double wrong = 0.0;
  double iters = 0.0;
  double conv = 0.0;
};

struct RepAccum {
  double p = 0.0;
  double beta2 = 0.0;
  std::vector<SweepCell> cells;
};

inline bool uses_informed_embed(CancelMode mode) {
  return mode == CancelMode::kEmbedder || mode == CancelMode::kBoth;
}

inline bool uses_decoder_cancel(CancelMode mode) {
  return mode == CancelMode::kDecoder || mode == CancelMode::kBoth;
}

inline void run_sweep_rep(const SweepConfig& cfg, const CodebookSpec& spec,
                          int rep, RepAccum* out) {
  const BenchPreset& bp = cfg.preset;
  std::uint64_t rep_key =
      mix64(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(rep) + 1)));
  SyntheticHost host =
      synthetic_host(bp.m, bp.sigma_lo, bp.sigma_hi, mix64(rep_key ^ 1));
  RunContext ctx =
      make_context(spec, flat_channel(host.sigma_x, bp.sigma_w),
                   CarrierMode::kDense, mix64(rep_key ^ 2));
  Bits msg = random_message(spec.message_bits, mix64(rep_key ^ 3));

  const ChannelParams& params = ctx.params;
  const CarrierMatrix& g = ctx.carriers;
  std::size_t n = g.cols();
  std::vector<double> x_st_fwd =
      forward_host(host.x, params.beta, params.gamma, g);

  bool need_plain = false, need_informed = false;
  for (CancelMode mode : cfg.modes) {
    (uses_informed_embed(mode) ? need_informed : need_plain) = true;
  }

  EmbedResult plain, informed;
  if (need_plain) {
    DecodeResult dec = nearest_in_subcodebook(x_st_fwd, msg, ctx.spec);
    plain.w_st =
        max_robust_watermark(x_st_fwd, dec.codeword, ctx.spec.theta, ctx.p);
    plain.y = embed_spatial(host.x, plain.w_st, params.sigma_w,
                            params.gamma_w, g, ctx.p);
    plain.codeword = dec.codeword;
    plain.converged = true;
  }
  if (need_informed) {
    EmbedConfig ec{ctx.spec, g, params, ctx.p,
                   1e-6 * std::sqrt(static_cast<double>(n) * ctx.p),
                   cfg.max_iters};
    informed = embed_informed(host.x, msg, ec);
  }

  GenieInfo genie{params.sigma_w, params.gamma, params.beta};
  double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> weight(bp.m);
  for (std::size_t i = 0; i < bp.m; ++i) {
    weight[i] = params.beta[i] * params.gamma[i] * params.sigma_w[i] / root_n;
  }
  std::vector<double> self = correlate_squared(weight, g);

  out->p = ctx.p;
  out->beta2 = 0.0;
  for (double b : params.beta) out->beta2 += b * b;
  out->cells.assign(cfg.levels.size() * cfg.modes.size(), SweepCell{});

  for (std::size_t lv = 0; lv < cfg.levels.size(); ++lv) {
    std::uint64_t attack_seed = mix64(rep_key ^ (0x10 + lv));
    std::vector<double> y_plain, y_informed;
    std::vector<double> yst_plain, yst_informed;
    if (need_plain) {
      y_plain = awgn(plain.y, cfg.levels[lv], attack_seed);
      yst_plain = forward_received(y_plain, params.beta, g);
    }
    if (need_informed) {
      y_informed = awgn(informed.y, cfg.levels[lv], attack_seed);
      yst_informed = forward_received(y_informed, params.beta, g);
    }
    for (std::size_t mo = 0; mo < cfg.modes.size(); ++mo) {
      CancelMode mode = cfg.modes[mo];
      bool inf = uses_informed_embed(mode);
      const EmbedResult& emb = inf ? informed : plain;
      const std::vector<double>& y_att = inf ? y_informed : y_plain;
      const std::vector<double>& y_st = inf ? yst_informed : yst_plain;
      Bits decoded;
      double resid;
      if (uses_decoder_cancel(mode)) {
        ExtractResult ex =
            extract_isi_cancel(y_att, genie, ctx.spec, g, cfg.max_iters);
        decoded = ex.message;
        resid = residual_power(isi_cancel_pass(y_st, weight, self,
                                               ex.codeword, g),
                               x_st_fwd, emb.w_st);
      } else {
        decoded = extract_plain(y_att, params.beta, ctx.spec, g);
        resid = residual_power(y_st, x_st_fwd, emb.w_st);
      }
      SweepCell& cell = out->cells[lv * cfg.modes.size() + mo];
      cell.resid = resid;
      cell.wrong = ber(msg, decoded) * static_cast<double>(msg.size());
      cell.iters = emb.iterations;
      cell.conv = emb.converged ? 1.0 : 0.0;
    }
  }
}

}  // namespace internal

// Runs reps independent hosts over dense carriers through every (attack
// level, cancellation mode) pair and averages; the point of the sweep is the
// carrier interference, which orthogonal carriers do not have. Per-rep seeds
// are derived from the sweep seed, so the result is one deterministic
// function of the configuration no matter how many threads carry it.
inline std::vector<SweepRow> sweep(const SweepConfig& cfg) {
  if (cfg.levels.empty()) throw std::invalid_argument("sweep: no levels");
  for (double level : cfg.levels) {
    if (!(level >= 0.0)) {
      throw std::invalid_argument("sweep: negative attack level");
    }
  }
  if (cfg.modes.empty()) throw std::invalid_argument("sweep: no modes");
  for (std::size_t a = 0; a < cfg.modes.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (cfg.modes[a] == cfg.modes[b]) {
        throw std::invalid_argument("sweep: duplicate cancellation mode");
      }
    }
  }
  if (cfg.reps < 1) throw std::invalid_argument("sweep: reps < 1");
  if (cfg.threads < 1) throw std::invalid_argument("sweep: threads < 1");

  CodebookSpec spec = preset_spec(cfg.preset);
  std::vector<internal::RepAccum> accum(
      static_cast<std::size_t>(cfg.reps));
  int workers = std::min(cfg.threads, cfg.reps);
  if (workers <= 1) {
    for (int rep = 0; rep < cfg.reps; ++rep) {
      internal::run_sweep_rep(cfg, spec, rep, &accum[rep]);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (int rep = t; rep < cfg.reps; rep += workers) {
          internal::run_sweep_rep(cfg, spec, rep, &accum[rep]);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  double reps = static_cast<double>(cfg.reps);
  double bits = reps * static_cast<double>(spec.message_bits);
  std::vector<SweepRow> rows;
  rows.reserve(cfg.levels.size() * cfg.modes.size());
  for (std::size_t lv = 0; lv < cfg.levels.size(); ++lv) {
    for (std::size_t mo = 0; mo < cfg.modes.size(); ++mo) {
      SweepRow row;
      row.level = static_cast<int>(lv);
      row.mode = cfg.modes[mo];
      row.noise_power = cfg.levels[lv];
      row.reps = cfg.reps;
      double p = 0.0, resid = 0.0, noise = 0.0;
      for (const internal::RepAccum& acc : accum) {
        const internal::SweepCell& cell =
            acc.cells[lv * cfg.modes.size() + mo];
        p += acc.p;
        resid += cell.resid;
        noise += cfg.levels[lv] * acc.beta2;
        row.ber += cell.wrong;
        row.embed_iterations += cell.iters;
        row.embed_converged += cell.conv;
      }
      row.ber /= bits;
      row.embed_iterations /= reps;
      row.embed_converged /= reps;
      row.ebn0_db = ebn0_db(p / reps, resid / reps);
      row.theory_db = ebn0_db(p / reps, noise / reps);
      rows.push_back(row);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.level != b.level) return a.level < b.level;
    return static_cast<int>(a.mode) < static_cast<int>(b.mode);
  });
  return rows;
}

inline void write_sweep_csv(std::ostream& out,
                            const std::vector<SweepRow>& rows) {
  out << "# schema: sweep-v1\n";
  out << "level,mode,noise_power,reps,ber,ebn0_db,theory_db,"
         "embed_iterations,embed_converged\n";
  for (const SweepRow& row : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%s,%.10g,%d,%.10g,%.6f,%.6f,%.4g,%.4g\n",
                  row.level, cancel_mode_name(row.mode), row.noise_power,
                  row.reps, row.ber, row.ebn0_db, row.theory_db,
                  row.embed_iterations, row.embed_converged);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Run files: a text sidecar describing the run, a binary blob with the
// channel state the receiver is granted, and raw signal blobs for synthetic
// hosts.

struct RunSidecar {
  int k = 0;
  int index_bits = 0;
  int n = 0;
  int rate_inverse = 2;
  int constraint_length = 7;
  std::uint64_t m = 0;
  CarrierMode carrier_mode = CarrierMode::kDense;
  std::uint64_t carrier_seed = 0;
  double p = 0.0;
  std::string cancel;
  std::string message_hex;
  std::string signal_file;
  std::string genie_file;
};

namespace internal {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int j = 0; j < 8; ++j) b[j] = static_cast<char>(v >> (8 * j));
  out.write(b, 8);
}

inline std::uint64_t get_u64(std::istream& in, const std::string& what) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw io_error(what + ": truncated");
  std::uint64_t v = 0;
  for (int j = 0; j < 8; ++j) v |= static_cast<std::uint64_t>(b[j]) << (8 * j);
  return v;
}

inline void put_f64(std::ostream& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

inline double get_f64(std::istream& in, const std::string& what) {
  return std::bit_cast<double>(get_u64(in, what));
}

inline void write_doubles(std::ostream& out, const std::vector<double>& v) {
  for (double d : v) put_f64(out, d);
}

inline std::vector<double> read_doubles(std::istream& in, std::uint64_t count,
                                        const std::string& what) {
  if (count == 0 || count > (1ULL << 32)) {
    throw io_error(what + ": implausible length");
  }
  std::vector<double> v(static_cast<std::size_t>(count));
  for (double& d : v) d = get_f64(in, what);
  return v;
}

inline void check_magic(std::istream& in, const char* magic,
                        const std::string& what) {
  char got[8];
  in.read(got, 8);
  if (!in || !std::equal(got, got + 8, magic)) {
    throw io_error(what + ": bad magic");
  }
}

inline long long parse_ll(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long long v;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw io_error(what + ": not an integer: " + text);
  }
  if (used != text.size()) {
    throw io_error(what + ": not an integer: " + text);
  }
  return v;
}

inline std::uint64_t parse_u64(const std::string& text,
                               const std::string& what) {
  if (text.empty() || text[0] == '-' || text[0] == '+') {
    throw io_error(what + ": not an unsigned integer: " + text);
  }
  std::size_t used = 0;
  unsigned long long v;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw io_error(what + ": not an unsigned integer: " + text);
  }
  if (used != text.size()) {
    throw io_error(what + ": not an unsigned integer: " + text);
  }
  return static_cast<std::uint64_t>(v);
}

inline double parse_f64(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw io_error(what + ": not a number: " + text);
  }
  if (used != text.size()) {
    throw io_error(what + ": not a number: " + text);
  }
  return v;
}

}  // namespace internal

inline void write_sidecar(const std::string& path, const RunSidecar& sc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_sidecar: cannot open " + path);
  char num[64];
  out << "format=sswm-run-v1\n";
  out << "k=" << sc.k << "\n";
  out << "index_bits=" << sc.index_bits << "\n";
  out << "n=" << sc.n << "\n";
  out << "rate_inverse=" << sc.rate_inverse << "\n";
  out << "constraint_length=" << sc.constraint_length << "\n";
  out << "m=" << sc.m << "\n";
  out << "carrier_mode=" << carrier_mode_name(sc.carrier_mode) << "\n";
  out << "carrier_seed=" << sc.carrier_seed << "\n";
  std::snprintf(num, sizeof(num), "%.17g", sc.p);
  out << "p=" << num << "\n";
  if (!sc.cancel.empty()) out << "cancel=" << sc.cancel << "\n";
  if (!sc.message_hex.empty()) out << "message_hex=" << sc.message_hex << "\n";
  if (!sc.signal_file.empty()) out << "signal_file=" << sc.signal_file << "\n";
  if (!sc.genie_file.empty()) out << "genie_file=" << sc.genie_file << "\n";
  if (!out) throw io_error("write_sidecar: write failed: " + path);
}

inline RunSidecar read_sidecar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("read_sidecar: cannot open " + path);
  RunSidecar sc;
  std::string line;
  bool first = true;
  unsigned seen = 0;
  auto mark = [&](unsigned bit) { seen |= 1u << bit; };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw io_error("read_sidecar: expected key=value: " + line);
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (first) {
      if (key != "format" || value != "sswm-run-v1") {
        throw io_error("read_sidecar: not an sswm-run-v1 sidecar");
      }
      first = false;
      continue;
    }
    if (key == "k") {
      sc.k = static_cast<int>(internal::parse_ll(value, "read_sidecar"));
      mark(0);
    } else if (key == "index_bits") {
      sc.index_bits =
          static_cast<int>(internal::parse_ll(value, "read_sidecar"));
      mark(1);
    } else if (key == "n") {
      sc.n = static_cast<int>(internal::parse_ll(value, "read_sidecar"));
      mark(2);
    } else if (key == "rate_inverse") {
      sc.rate_inverse =
          static_cast<int>(internal::parse_ll(value, "read_sidecar"));
      mark(3);
    } else if (key == "constraint_length") {
      sc.constraint_length =
          static_cast<int>(internal::parse_ll(value, "read_sidecar"));
      mark(4);
    } else if (key == "m") {
      sc.m = internal::parse_u64(value, "read_sidecar");
      mark(5);
    } else if (key == "carrier_mode") {
      try {
        sc.carrier_mode = carrier_mode_from(value);
      } catch (const std::invalid_argument& e) {
        throw io_error(std::string("read_sidecar: ") + e.what());
      }
      mark(6);
    } else if (key == "carrier_seed") {
      sc.carrier_seed = internal::parse_u64(value, "read_sidecar");
      mark(7);
    } else if (key == "p") {
      sc.p = internal::parse_f64(value, "read_sidecar");
      mark(8);
    } else if (key == "cancel") {
      sc.cancel = value;
    } else if (key == "message_hex") {
      sc.message_hex = value;
    } else if (key == "signal_file") {
      sc.signal_file = value;
    } else if (key == "genie_file") {
      sc.genie_file = value;
    } else {
      throw io_error("read_sidecar: unknown key: " + key);
    }
  }
  if (first) throw io_error("read_sidecar: empty file: " + path);
  if (seen != 0x1FF) {
    throw io_error("read_sidecar: missing required keys in " + path);
  }
  return sc;
}

// Channel state written beside a run: enough to rebuild the receiver's
// side information and to mount planned attacks on the marked data. The
// attack gains start at the embedder's anticipation; an attack command that
// actually rescales the data rewrites them, so the receiver always sees the
// realized channel.
struct ChannelState {
  std::vector<double> sigma_x;
  std::vector<double> sigma_w;
  std::vector<double> gamma_w;
  std::vector<double> gamma_a;
  std::vector<double> beta;

  GenieInfo genie() const {
    GenieInfo info;
    info.sigma_w = sigma_w;
    info.beta = beta;
    info.gamma.resize(gamma_w.size());
    for (std::size_t i = 0; i < gamma_w.size(); ++i) {
      info.gamma[i] = gamma_w[i] * gamma_a[i];
    }
    return info;
  }
};

inline void write_genie(const std::string& path, const ChannelState& state) {
  std::size_t m = state.sigma_x.size();
  internal::check_length(state.sigma_w.size(), m, "write_genie");
  internal::check_length(state.gamma_w.size(), m, "write_genie");
  internal::check_length(state.gamma_a.size(), m, "write_genie");
  internal::check_length(state.beta.size(), m, "write_genie");
  if (m == 0) throw std::invalid_argument("write_genie: empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_genie: cannot open " + path);
  out.write("SSWMGEN1", 8);
  internal::put_u64(out, m);
  internal::write_doubles(out, state.sigma_x);
  internal::write_doubles(out, state.sigma_w);
  internal::write_doubles(out, state.gamma_w);
  internal::write_doubles(out, state.gamma_a);
  internal::write_doubles(out, state.beta);
  if (!out) throw io_error("write_genie: write failed: " + path);
}

inline ChannelState read_genie(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("read_genie: cannot open " + path);
  internal::check_magic(in, "SSWMGEN1", "read_genie");
  std::uint64_t m = internal::get_u64(in, "read_genie");
  ChannelState state;
  state.sigma_x = internal::read_doubles(in, m, "read_genie");
  state.sigma_w = internal::read_doubles(in, m, "read_genie");
  state.gamma_w = internal::read_doubles(in, m, "read_genie");
  state.gamma_a = internal::read_doubles(in, m, "read_genie");
  state.beta = internal::read_doubles(in, m, "read_genie");
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw io_error("read_genie: trailing bytes in " + path);
  }
  return state;
}

inline void write_signal(const std::string& path,
                         const std::vector<double>& signal) {
  if (signal.empty()) throw std::invalid_argument("write_signal: empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_signal: cannot open " + path);
  out.write("SSWMSIG1", 8);
  internal::put_u64(out, signal.size());
  internal::write_doubles(out, signal);
  if (!out) throw io_error("write_signal: write failed: " + path);
}

inline std::vector<double> read_signal(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("read_signal: cannot open " + path);
  internal::check_magic(in, "SSWMSIG1", "read_signal");
  std::uint64_t count = internal::get_u64(in, "read_signal");
  std::vector<double> signal = internal::read_doubles(in, count, "read_signal");
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw io_error("read_signal: trailing bytes in " + path);
  }
  return signal;
}

}  // namespace sswm

#endif  // SSWM_HARNESS_HPP_
