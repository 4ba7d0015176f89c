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

#ifndef SRAKE_SINR_HPP
#define SRAKE_SINR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "srake/model.hpp"

namespace srake {

/// Binary path-selection vector; exactly `fingers` ones when it encodes a
/// valid assignment.
struct SelectionVector {
  std::vector<std::uint8_t> bits;

  int ones() const {
    int n = 0;
    for (auto b : bits) n += b;
    return n;
  }

  std::vector<int> support() const {
    std::vector<int> s;
    s.reserve(bits.size());
    for (int i = 0; i < static_cast<int>(bits.size()); ++i)
      if (bits[i]) s.push_back(i);
    return s;
  }

  static SelectionVector from_support(std::span<const int> idx, int paths) {
    SelectionVector v;
    v.bits.assign(paths, 0);
    for (int i : idx) v.bits.at(i) = 1;
    return v;
  }

  bool operator==(const SelectionVector&) const = default;
};

/// Data of the quadratic SINR surrogate
///   sinr(x) ~= (e1/nv) * (q'x - x'Px/nv),
/// with q the squared desired-user taps and P the Gram matrix of the
/// tap-weighted, energy-weighted interference signature. P is symmetric
/// positive semidefinite by construction and has rank at most K-1.
struct QpData {
  Eigen::VectorXd q;
  Eigen::MatrixXd P;
  double e1 = 1.0;
  double noise_var = 1.0;
};

/// Exact output SINR of the MMSE combiner over the selected paths:
///   (e1/nv) * a' (I + B B'/nv)^{-1} a,
/// where a is the selected desired-user tap subvector and B the selected
/// rows of the energy-weighted interference signature. Evaluated through a
/// Cholesky solve of the M x M system, never an explicit inverse.
inline double exact_sinr(std::span<const int> selected, const MaiSignature& sig, double e1,
                         double noise_var) {
  if (selected.empty()) throw std::invalid_argument("exact_sinr: empty selection");
  const int m = static_cast<int>(selected.size());
  const int j = sig.interferers();
  Eigen::VectorXd a(m);
  Eigen::MatrixXd b(m, j);
  for (int i = 0; i < m; ++i) {
    const int l = selected[i];
    if (l < 0 || l >= sig.paths()) throw std::invalid_argument("exact_sinr: path index out of range");
    a(i) = sig.alpha1(l);
    if (j > 0) b.row(i) = sig.smai.row(l);
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(m, m);
  if (j > 0) {
    const Eigen::MatrixXd bw = b * sig.amps.asDiagonal();
    c.selfadjointView<Eigen::Lower>().rankUpdate(bw, 1.0 / noise_var);
  }
  const Eigen::VectorXd y = c.selfadjointView<Eigen::Lower>().llt().solve(a);
  return (e1 / noise_var) * a.dot(y);
}

inline double exact_sinr(const SelectionVector& sel, const MaiSignature& sig, double e1,
                         double noise_var) {
  const auto s = sel.support();
  return exact_sinr(std::span<const int>(s), sig, e1, noise_var);
}

/// SINR of a single path on its own:
///   e1 * alpha_l^2 / (interference power on that path + noise_var).
inline double individual_sinr(int path, const MaiSignature& sig, double e1, double noise_var) {
  if (path < 0 || path >= sig.paths()) throw std::invalid_argument("individual_sinr: path out of range");
  double mai = 0.0;
  for (int j = 0; j < sig.interferers(); ++j) {
    const double v = sig.amps(j) * sig.smai(path, j);
    mai += v * v;
  }
  const double a = sig.alpha1(path);
  return e1 * a * a / (mai + noise_var);
}

inline QpData build_qp_data(const MaiSignature& sig, double e1, double noise_var) {
  QpData qp;
  qp.e1 = e1;
  qp.noise_var = noise_var;
  qp.q = sig.alpha1.array().square();
  const int n = sig.paths();
  qp.P = Eigen::MatrixXd::Zero(n, n);
  if (sig.interferers() > 0) {
    const Eigen::MatrixXd g = sig.alpha1.asDiagonal() * sig.smai * sig.amps.asDiagonal();
    qp.P.selfadjointView<Eigen::Lower>().rankUpdate(g, 1.0);
    qp.P.triangularView<Eigen::StrictlyUpper>() = qp.P.transpose();
  }
  return qp;
}

/// Quadratic surrogate of the SINR, valid when the interference is weak
/// relative to the noise. Accepts fractional x (relaxation diagnostics).
inline double approx_sinr(const Eigen::VectorXd& x, const QpData& qp) {
  return (qp.e1 / qp.noise_var) * (qp.q.dot(x) - x.dot(qp.P * x) / qp.noise_var);
}

}  // namespace srake

#endif  // SRAKE_SINR_HPP
