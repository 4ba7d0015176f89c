// Copyright 2026 The srake Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRAKE_MODEL_HPP
#define SRAKE_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "srake/rng.hpp"

namespace srake {

/// Scenario parameters of the synchronous time-hopping impulse-radio link.
///
/// One frame per symbol is assumed throughout, so each user carries a single
/// (chip offset, polarity) code pair. Time-hopping offsets are confined to
/// {0, ..., th_range-1} with th_range <= chips_per_frame - paths, which rules
/// out inter-frame interference. Path indices are 0-based everywhere.
struct SystemConfig {
  int users = 1;             // K, user 0 is the desired user
  int paths = 1;             // L, resolvable multipath components per user
  int fingers = 1;           // M, paths the selective receiver combines
  int chips_per_frame = 1;   // Nc
  int th_range = 1;          // NT, time-hopping offsets drawn from {0..NT-1}
  Eigen::VectorXd energies;  // per-user bit energy, linear scale, length K
  double noise_var = 1.0;    // thermal noise variance
  double decay = 0.0;        // exponential power-delay decay factor
  double shadow_var = 0.0;   // variance of the log tap magnitude

  double desired_energy() const { return energies(0); }

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SystemConfig: " + what); };
    if (users < 1) fail("users must be >= 1");
    if (paths < 1) fail("paths must be >= 1");
    if (fingers < 1 || fingers > paths) fail("fingers must lie in [1, paths]");
    if (chips_per_frame < 1) fail("chips_per_frame must be >= 1");
    if (th_range < 1 || th_range > chips_per_frame - paths)
      fail("th_range must lie in [1, chips_per_frame - paths]");
    if (energies.size() != users) fail("energies must have one entry per user");
    for (int k = 0; k < users; ++k) {
      if (!std::isfinite(energies(k)) || energies(k) < 0.0) fail("energies must be finite and nonnegative");
    }
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) fail("noise_var must be positive and finite");
    if (!(decay >= 0.0) || !std::isfinite(decay)) fail("decay must be nonnegative");
    if (!(shadow_var >= 0.0) || !std::isfinite(shadow_var)) fail("shadow_var must be nonnegative");
  }
};

/// energies = [desired, interferer, interferer, ...]
inline Eigen::VectorXd make_energies(int users, double desired, double interferer) {
  Eigen::VectorXd e = Eigen::VectorXd::Constant(users, interferer);
  e(0) = desired;
  return e;
}

/// Per-user time-hopping chip offset and polarity code.
struct CodeSet {
  Eigen::VectorXi th;        // length K, entries in {0..th_range-1}
  Eigen::VectorXd polarity;  // length K, entries +-1
};

/// Per-user channel tap realizations, taps(k, l).
struct ChannelSet {
  Eigen::MatrixXd taps;  // K x L
};

/// Everything the SINR expressions need about one scenario:
/// the desired user's taps and the interference signature seen by each of
/// its paths. Column j of smai belongs to interferer j (user j+1); entry
/// (l, j) is the interferer's tap that lands on the desired user's l-th
/// chip position, signed by the product of the two polarity codes.
struct MaiSignature {
  Eigen::VectorXd alpha1;  // length L
  Eigen::MatrixXd smai;    // L x (K-1); empty when K == 1
  Eigen::VectorXd amps;    // length K-1, sqrt of interferer energies

  int paths() const { return static_cast<int>(alpha1.size()); }
  int interferers() const { return static_cast<int>(smai.cols()); }
};

/// Mean tap energy E{alpha_l^2} for 0-based path l: Omega0 * exp(-decay*l),
/// normalized so the profile sums to 1 over all paths. The decay = 0 limit
/// of Omega0 is 1/paths.
inline double tap_energy_profile(const SystemConfig& cfg, int path) {
  const double lam = cfg.decay;
  const double omega0 =
      (lam == 0.0) ? 1.0 / cfg.paths
                   : (1.0 - std::exp(-lam)) / (1.0 - std::exp(-lam * cfg.paths));
  return omega0 * std::exp(-lam * path);
}

/// Mean of log|alpha_l| such that |alpha_l| ~ Lognormal(mu_l, shadow_var)
/// reproduces tap_energy_profile: mu_l = 0.5*(ln E{alpha_l^2} - 2*shadow_var).
inline double log_magnitude_mean(const SystemConfig& cfg, int path) {
  return 0.5 * (std::log(tap_energy_profile(cfg, path)) - 2.0 * cfg.shadow_var);
}

/// Draw each user's chip offset uniformly on {0..th_range-1} and polarity
/// uniformly on {-1, +1}. Interferer offsets may coincide with the desired
/// user's.
inline CodeSet generate_codes(const SystemConfig& cfg, Rng& rng) {
  CodeSet c;
  c.th.resize(cfg.users);
  c.polarity.resize(cfg.users);
  for (int k = 0; k < cfg.users; ++k) c.th(k) = rng.next_below(cfg.th_range);
  for (int k = 0; k < cfg.users; ++k) c.polarity(k) = rng.next_sign();
  return c;
}

/// Draw taps with equiprobable sign and lognormal magnitude,
/// log|alpha| ~ Normal(mu_l, shadow_var), independently across users and paths.
inline ChannelSet generate_channels(const SystemConfig& cfg, Rng& rng) {
  ChannelSet ch;
  ch.taps.resize(cfg.users, cfg.paths);
  const double sigma = std::sqrt(cfg.shadow_var);
  for (int k = 0; k < cfg.users; ++k) {
    for (int l = 0; l < cfg.paths; ++l) {
      const double sign = rng.next_sign();
      const double z = rng.next_normal();
      ch.taps(k, l) = sign * std::exp(log_magnitude_mean(cfg, l) + sigma * z);
    }
  }
  return ch;
}

/// 1 iff path `pathk` of a user with offset `ck` lands on the same chip as
/// path `path1` of the desired user with offset `c1`. Paths are 0-based;
/// under the synchronous no-IFI model chip positions are offset + path.
inline int collision_indicator(int c1, int ck, int path1, int pathk) {
  return (c1 + path1 == ck + pathk) ? 1 : 0;
}

/// Assemble the interference signature from codes and channels. For each
/// desired-user path l and interferer k, at most one interferer path can
/// collide, and its (polarity-signed) tap becomes entry (l, k-1).
inline MaiSignature build_mai_signature(const SystemConfig& cfg, const CodeSet& codes,
                                        const ChannelSet& channels) {
  if (codes.th.size() != cfg.users || channels.taps.rows() != cfg.users ||
      channels.taps.cols() != cfg.paths) {
    throw std::invalid_argument("build_mai_signature: dimension mismatch");
  }
  MaiSignature sig;
  sig.alpha1 = channels.taps.row(0).transpose();
  sig.smai = Eigen::MatrixXd::Zero(cfg.paths, cfg.users - 1);
  sig.amps = cfg.energies.tail(cfg.users - 1).cwiseSqrt();
  for (int k = 1; k < cfg.users; ++k) {
    const double d = codes.polarity(0) * codes.polarity(k);
    for (int l = 0; l < cfg.paths; ++l) {
      const int m = codes.th(0) + l - codes.th(k);  // unique colliding path, if in range
      if (m >= 0 && m < cfg.paths) sig.smai(l, k - 1) = d * channels.taps(k, m);
    }
  }
  return sig;
}

}  // namespace srake

#endif  // SRAKE_MODEL_HPP
