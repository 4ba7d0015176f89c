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

#ifndef SRAKE_SELECTORS_HPP
#define SRAKE_SELECTORS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srake/qp.hpp"
#include "srake/sinr.hpp"

namespace srake {

/// Sorted set of selected path indices (0-based, strictly increasing).
struct FingerSet {
  std::vector<int> indices;

  int size() const { return static_cast<int>(indices.size()); }
  bool operator==(const FingerSet&) const = default;
};

enum class Method {
  Conventional,
  Exhaustive,
  Sphere,
  Box,
  SphereDual,
  Hybrid,
  Ga,
};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::Conventional: return "conventional";
    case Method::Exhaustive: return "exhaustive";
    case Method::Sphere: return "sphere";
    case Method::Box: return "box";
    case Method::SphereDual: return "sphere-dual";
    case Method::Hybrid: return "hybrid";
    case Method::Ga: return "ga";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Conventional, Method::Exhaustive, Method::Sphere, Method::Box,
                   Method::SphereDual, Method::Hybrid, Method::Ga}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

struct SelectionOutcome {
  FingerSet fingers;
  double exact_sinr = 0.0;  // linear scale, recomputed from `fingers`
  Method method = Method::Conventional;
  std::optional<qp::SolveReport> solver_report;
  bool fallback = false;  // solver failed; conventional selection substituted
};

/// C(n, m), saturating at uint64 max.
inline std::uint64_t combination_count(int n, int m) {
  if (m < 0 || m > n) return 0;
  m = std::min(m, n - m);
  __uint128_t r = 1;
  for (int i = 1; i <= m; ++i) {
    r = r * static_cast<unsigned>(n - m + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

inline constexpr std::uint64_t kDefaultExhaustiveBudget = 2'000'000;

struct ExhaustiveBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Indices of the m largest entries, ties resolved toward the smaller index.
inline FingerSet round_top_m(const Eigen::VectorXd& x, int m) {
  const int n = static_cast<int>(x.size());
  if (m < 0 || m > n) throw std::invalid_argument("round_top_m: m out of range");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (x(a) != x(b)) return x(a) > x(b);
    return a < b;
  });
  FingerSet f;
  f.indices.assign(order.begin(), order.begin() + m);
  std::sort(f.indices.begin(), f.indices.end());
  return f;
}

/// Pick the m paths with the largest per-path SINR.
inline SelectionOutcome select_conventional(const MaiSignature& sig, const SystemConfig& cfg) {
  Eigen::VectorXd s(sig.paths());
  for (int l = 0; l < sig.paths(); ++l)
    s(l) = individual_sinr(l, sig, cfg.desired_energy(), cfg.noise_var);
  SelectionOutcome out;
  out.method = Method::Conventional;
  out.fingers = round_top_m(s, cfg.fingers);
  out.exact_sinr =
      exact_sinr(std::span<const int>(out.fingers.indices), sig, cfg.desired_energy(), cfg.noise_var);
  return out;
}

/// Global maximizer of the exact SINR over all m-subsets, by lexicographic
/// enumeration (first-found wins ties, i.e. the lexicographically smallest
/// set). Refuses to run past `budget` combinations.
inline SelectionOutcome select_exhaustive(const MaiSignature& sig, const SystemConfig& cfg,
                                          std::uint64_t budget = kDefaultExhaustiveBudget) {
  const int n = cfg.paths;
  const int m = cfg.fingers;
  const std::uint64_t count = combination_count(n, m);
  if (count > budget) {
    throw ExhaustiveBudgetError("select_exhaustive: " + std::to_string(count) +
                                " combinations exceed the budget of " + std::to_string(budget));
  }
  std::vector<int> comb(m);
  std::iota(comb.begin(), comb.end(), 0);
  SelectionOutcome out;
  out.method = Method::Exhaustive;
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    const double v = exact_sinr(std::span<const int>(comb), sig, cfg.desired_energy(), cfg.noise_var);
    if (v > best) {
      best = v;
      out.fingers.indices = comb;
    }
    // Advance to the next combination in lexicographic order.
    int i = m - 1;
    while (i >= 0 && comb[i] == n - m + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
  }
  out.exact_sinr = best;
  return out;
}

enum class RelaxVariant { Sphere, Box, SphereDual };

inline Method relax_method(RelaxVariant v) {
  switch (v) {
    case RelaxVariant::Sphere: return Method::Sphere;
    case RelaxVariant::Box: return Method::Box;
    case RelaxVariant::SphereDual: return Method::SphereDual;
  }
  return Method::Sphere;
}

/// Solve the chosen relaxation, round its optimizer to the top-m support and
/// evaluate the exact SINR there. On solver failure the conventional
/// selection is substituted and flagged.
inline SelectionOutcome select_relaxation(const MaiSignature& sig, const SystemConfig& cfg,
                                          RelaxVariant variant, double tol = 1e-8) {
  const QpData qp_data = build_qp_data(sig, cfg.desired_energy(), cfg.noise_var);
  const qp::RelaxedProblem prob = qp::make_problem(qp_data, cfg.fingers);
  qp::SolveReport report;
  switch (variant) {
    case RelaxVariant::Sphere: report = qp::solve_sphere_qcqp(prob, tol); break;
    case RelaxVariant::Box: report = qp::solve_box_lcqp(prob, tol); break;
    case RelaxVariant::SphereDual: report = qp::solve_sphere_dual(prob, tol); break;
  }
  SelectionOutcome out;
  out.method = relax_method(variant);
  out.solver_report = report;
  if (!report.converged || report.x.size() != cfg.paths || !report.x.allFinite()) {
    SelectionOutcome conv = select_conventional(sig, cfg);
    out.fingers = std::move(conv.fingers);
    out.exact_sinr = conv.exact_sinr;
    out.fallback = true;
    return out;
  }
  out.fingers = round_top_m(report.x, cfg.fingers);
  out.exact_sinr =
      exact_sinr(std::span<const int>(out.fingers.indices), sig, cfg.desired_energy(), cfg.noise_var);
  return out;
}

/// Keep the candidate with the largest exact SINR; ties go to the earlier
/// candidate.
inline SelectionOutcome select_hybrid(std::span<const SelectionOutcome> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_hybrid: no candidates");
  const SelectionOutcome* best = &candidates[0];
  for (const auto& c : candidates.subspan(1)) {
    if (c.exact_sinr > best->exact_sinr) best = &c;
  }
  SelectionOutcome out;
  out.fingers = best->fingers;
  out.exact_sinr = best->exact_sinr;
  out.method = Method::Hybrid;
  return out;
}

}  // namespace srake

#endif  // SRAKE_SELECTORS_HPP
