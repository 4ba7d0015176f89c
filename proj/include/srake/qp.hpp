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

#ifndef SRAKE_QP_HPP
#define SRAKE_QP_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "srake/sinr.hpp"

// Self-contained dense convex solvers for the two relaxations of the binary
// finger-selection program
//
//   minimize  f(x) = x'Px/nv - q'x   subject to  sum(x) = M,  x binary,
//
// namely the sphere relaxation (2x-1)'(2x-1) <= L, a QCQP solved by a
// log-barrier interior method, and the hypercube relaxation x in [0,1]^L, an
// LCQP solved by accelerated projected gradient with an exact projection onto
// the capped simplex. A two-variable dual of the sphere problem is solved by
// gradient descent. Every solver reports a KKT residual computed against the
// problem as stated.

namespace srake::qp {

struct RelaxedProblem {
  Eigen::MatrixXd P;       // symmetric PSD
  Eigen::VectorXd q;
  double noise_var = 1.0;  // nv
  int cardinality = 0;     // M
  double reg = 0.0;        // ridge added only where a solve needs invertibility

  int dim() const { return static_cast<int>(q.size()); }

  double objective(const Eigen::VectorXd& x) const {
    return x.dot(P * x) / noise_var - q.dot(x);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    return 2.0 / noise_var * (P * x) - q;
  }

  void validate() const {
    if (P.rows() != dim() || P.cols() != dim())
      throw std::invalid_argument("RelaxedProblem: P must be dim x dim");
    if (cardinality < 0 || cardinality > dim())
      throw std::invalid_argument("RelaxedProblem: cardinality out of range");
    if (!(noise_var > 0.0)) throw std::invalid_argument("RelaxedProblem: noise_var must be positive");
    if (!(reg >= 0.0)) throw std::invalid_argument("RelaxedProblem: reg must be nonnegative");
  }
};

/// P is rank-deficient whenever there are fewer interferers than paths, so
/// solvers that must invert a P-derived matrix get a trace-scaled ridge.
inline RelaxedProblem make_problem(const QpData& qp, int cardinality) {
  RelaxedProblem prob;
  prob.P = qp.P;
  prob.q = qp.q;
  prob.noise_var = qp.noise_var;
  prob.cardinality = cardinality;
  prob.reg = 1e-8 * qp.P.trace() / std::max(1, static_cast<int>(qp.q.size()));
  return prob;
}

struct Duals {
  double lambda = 0.0;  // equality multiplier
  double nu = 0.0;      // inequality multiplier, >= 0
};

struct SolveReport {
  Eigen::VectorXd x;
  double objective = 0.0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::optional<Duals> duals;
  std::optional<double> dual_objective;  // set by the dual method
  bool regularized = false;              // ridge was required during the solve
};

enum class Geometry { Sphere, Box };

/// Euclidean projection onto {x in [0,1]^n : sum(x) = m}.
///
/// The projection is clip(v - tau, 0, 1) for the shift tau at which the
/// coordinate sum equals m. The sum is a piecewise-linear non-increasing
/// function of tau with breakpoints at v_i and v_i - 1; bisecting over the
/// sorted breakpoint grid locates the crossing segment and the exact tau
/// follows by linear interpolation. O(n log n).
inline Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, int m) {
  const int n = static_cast<int>(v.size());
  if (m < 0 || m > n) throw std::invalid_argument("project_capped_simplex: m out of range");
  if (m == 0) return Eigen::VectorXd::Zero(n);
  if (m == n) return Eigen::VectorXd::Ones(n);

  std::vector<double> bp(2 * n);
  for (int i = 0; i < n; ++i) {
    bp[2 * i] = v(i);
    bp[2 * i + 1] = v(i) - 1.0;
  }
  std::sort(bp.begin(), bp.end());

  auto sum_at = [&](double tau) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::clamp(v(i) - tau, 0.0, 1.0);
    return s;
  };

  // Invariants: sum_at(bp.front()) = n > m and sum_at(bp.back()) = 0 <= m.
  int lo = 0, hi = 2 * n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (sum_at(bp[mid]) <= static_cast<double>(m))
      hi = mid;
    else
      lo = mid;
  }
  const double sa = sum_at(bp[lo]);
  const double sb = sum_at(bp[hi]);
  double tau = (sa == sb) ? bp[lo] : bp[lo] + (sa - m) * (bp[hi] - bp[lo]) / (sa - sb);

  Eigen::VectorXd x = (v.array() - tau).cwiseMax(0.0).cwiseMin(1.0);
  // One floating-point touch-up on the interior coordinates.
  int active = 0;
  for (int i = 0; i < n; ++i)
    if (x(i) > 0.0 && x(i) < 1.0) ++active;
  if (active > 0) {
    tau += (x.sum() - m) / active;
    x = (v.array() - tau).cwiseMax(0.0).cwiseMin(1.0);
  }
  return x;
}

namespace detail {

inline Eigen::VectorXd ones(int n) { return Eigen::VectorXd::Ones(n); }

/// Fit (lambda, nu >= 0) minimizing ||g + lambda*1 + nu*4w||_2 by 2x2 normal
/// equations; used when the caller has no multipliers for the sphere case.
inline Duals fit_sphere_duals(const Eigen::VectorXd& g, const Eigen::VectorXd& w) {
  const int n = static_cast<int>(g.size());
  const Eigen::VectorXd b2 = 4.0 * w;
  const double a11 = static_cast<double>(n);
  const double a12 = b2.sum();
  const double a22 = b2.squaredNorm();
  const double r1 = -g.sum();
  const double r2 = -b2.dot(g);
  const double det = a11 * a22 - a12 * a12;
  Duals d;
  if (std::abs(det) > 1e-14 * (a11 * a22 + 1.0)) {
    d.lambda = (r1 * a22 - r2 * a12) / det;
    d.nu = (a11 * r2 - a12 * r1) / det;
  } else {
    d.lambda = r1 / a11;
    d.nu = 0.0;
  }
  if (d.nu < 0.0) {
    d.nu = 0.0;
    d.lambda = r1 / a11;
  }
  return d;
}

/// Best equality multiplier for the box case: minimizes the largest
/// per-coordinate stationarity violation, a convex piecewise-linear function
/// of lambda, by ternary search.
inline std::pair<double, double> fit_box_lambda(const Eigen::VectorXd& g, const Eigen::VectorXd& x,
                                                double bound_tol = 1e-9) {
  const int n = static_cast<int>(g.size());
  auto worst = [&](double lam) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = g(i) + lam;
      double v;
      if (x(i) <= bound_tol)
        v = std::max(0.0, -r);  // lower-bound multiplier must be nonnegative
      else if (x(i) >= 1.0 - bound_tol)
        v = std::max(0.0, r);  // upper-bound multiplier must be nonnegative
      else
        v = std::abs(r);
      s = std::max(s, v);
    }
    return s;
  };
  double a = -(g.cwiseAbs().maxCoeff() + 1.0);
  double b = -a;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (worst(m1) <= worst(m2))
      b = m2;
    else
      a = m1;
  }
  const double lam = 0.5 * (a + b);
  return {worst(lam), lam};
}

}  // namespace detail

/// Max of stationarity, primal feasibility, dual feasibility and
/// complementary-slackness magnitudes at x. For the sphere geometry the
/// multipliers are taken from `duals` when provided and fitted otherwise; for
/// the box geometry the bound multipliers are implied by the gradient and the
/// equality multiplier is always fitted, so `duals` is ignored.
inline double kkt_residual(const RelaxedProblem& prob, Geometry geom, const Eigen::VectorXd& x,
                           const std::optional<Duals>& duals = std::nullopt) {
  if (x.size() != prob.dim()) throw std::invalid_argument("kkt_residual: dimension mismatch");
  const Eigen::VectorXd g = prob.gradient(x);
  const double eq = x.sum() - prob.cardinality;
  if (geom == Geometry::Sphere) {
    const Eigen::VectorXd w = 2.0 * x - detail::ones(prob.dim());
    const double gin = w.squaredNorm() - prob.dim();
    const Duals d = duals ? *duals : detail::fit_sphere_duals(g, w);
    const double stat = (g + d.lambda * detail::ones(prob.dim()) + 4.0 * d.nu * w)
                            .cwiseAbs()
                            .maxCoeff();
    const double feas = std::max(std::abs(eq), std::max(0.0, gin));
    const double dual_feas = std::max(0.0, -d.nu);
    const double comp = std::abs(d.nu * gin);
    return std::max({stat, feas, dual_feas, comp});
  }
  const double stat = detail::fit_box_lambda(g, x).first;
  const double feas = std::max({std::abs(eq), std::max(0.0, -x.minCoeff()),
                                std::max(0.0, x.maxCoeff() - 1.0)});
  return std::max(stat, feas);
}

namespace detail {

struct Candidate {
  Eigen::VectorXd x;
  Duals duals;
  double residual = std::numeric_limits<double>::infinity();
};

inline void consider(const RelaxedProblem& prob, Geometry geom, Candidate& best,
                     const Eigen::VectorXd& x, const Duals& d) {
  if (!x.allFinite()) return;
  const double r = kkt_residual(prob, geom, x, d);
  if (r < best.residual) best = Candidate{x, d, r};
}

/// Equality-constrained stationary point: solve [H 1; 1' 0] [x; lam] = [q; m].
/// Returns false when the KKT matrix is numerically singular.
inline bool equality_qp_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& q, double m,
                              Eigen::VectorXd* x, double* lambda) {
  const int n = static_cast<int>(q.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
  kkt.topLeftCorner(n, n) = h;
  kkt.topRightCorner(n, 1).setOnes();
  kkt.bottomLeftCorner(1, n).setOnes();
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = q;
  rhs(n) = m;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd z = lu.solve(rhs);
  if (!z.allFinite()) return false;
  *x = z.head(n);
  *lambda = z(n);
  return true;
}

}  // namespace detail

/// Sphere relaxation: minimize f over {sum(x) = M, (2x-1)'(2x-1) <= L}.
///
/// Log-barrier interior scheme: Newton iterations on the equality-constrained
/// centering problem t*f(x) - log(L - ||2x-1||^2), with t increased
/// geometrically. The centering Hessian is positive definite on the barrier
/// domain regardless of rank(P), so no ridge is needed here. A final
/// active-set Newton polish sharpens the iterate to the reported KKT residual;
/// polish candidates are kept only when they lower that residual.
inline SolveReport solve_sphere_qcqp(const RelaxedProblem& prob, double tol = 1e-8) {
  prob.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("solve_sphere_qcqp: tol must be positive");
  const int n = prob.dim();
  const int m = prob.cardinality;
  SolveReport rep;
  if (m == 0 || m == n) {
    // The hyperplane is tangent to the sphere: the feasible set is one point.
    rep.x = (m == 0) ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd::Ones(n);
    rep.objective = prob.objective(rep.x);
    rep.kkt_residual = 0.0;
    rep.converged = true;
    return rep;
  }

  const Eigen::MatrixXd h = 2.0 / prob.noise_var * prob.P;
  const Eigen::VectorXd one = detail::ones(n);
  const double big_l = static_cast<double>(n);
  auto slack = [&](const Eigen::VectorXd& z) {
    return big_l - (2.0 * z - one).squaredNorm();
  };

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, static_cast<double>(m) / n);
  double t = 1.0;
  int iters = 0;
  detail::Candidate best;

  for (int outer = 0; outer < 60; ++outer) {
    // Newton centering on the hyperplane.
    for (int it = 0; it < 60; ++it) {
      ++iters;
      const Eigen::VectorXd w = 2.0 * x - one;
      const double s = big_l - w.squaredNorm();
      const Eigen::VectorXd gf = h * x - prob.q;
      const Eigen::VectorXd gc = t * gf + (4.0 / s) * w;
      Eigen::MatrixXd hc = t * h;
      hc.diagonal().array() += 8.0 / s;
      hc.noalias() += (16.0 / (s * s)) * w * w.transpose();
      Eigen::LLT<Eigen::MatrixXd> llt(hc);
      if (llt.info() != Eigen::Success) {
        hc.diagonal().array() += 1e-12 * (1.0 + hc.diagonal().cwiseAbs().maxCoeff());
        llt.compute(hc);
        if (llt.info() != Eigen::Success) break;
      }
      const Eigen::VectorXd u = llt.solve(gc);
      const Eigen::VectorXd v = llt.solve(one);
      const double weq = u.sum() / v.sum();
      const Eigen::VectorXd dx = weq * v - u;
      const double nd2 = std::max(0.0, -gc.dot(dx));
      const double psi0 = t * prob.objective(x) - std::log(s);
      if (nd2 <= 1e-13 * (1.0 + std::abs(psi0))) break;

      double alpha = 1.0;
      bool stepped = false;
      while (alpha > 1e-14) {
        const Eigen::VectorXd xn = x + alpha * dx;
        const double sn = slack(xn);
        if (sn > 0.0) {
          const double psin = t * prob.objective(xn) - std::log(sn);
          if (psin <= psi0 - 0.01 * alpha * nd2) {
            x = xn;
            stepped = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!stepped) break;
    }

    const Eigen::VectorXd w = 2.0 * x - one;
    const double s = slack(x);
    Duals d;
    d.nu = 1.0 / (t * s);
    d.lambda = -(h * x - prob.q + 4.0 * d.nu * w).mean();
    detail::consider(prob, Geometry::Sphere, best, x, d);
    if (best.residual <= 0.25 * tol) break;
    if (1.0 / t < 1e-3 * tol) break;
    if (iters >= 500) break;
    t *= 20.0;
  }

  // Polish A: constraint inactive -> equality-only stationary point.
  {
    Eigen::VectorXd xa;
    double lam;
    if (detail::equality_qp_solve(h, prob.q, m, &xa, &lam) && slack(xa) >= -1e-9 * big_l) {
      detail::consider(prob, Geometry::Sphere, best, xa, Duals{lam, 0.0});
    }
  }
  // Polish B: constraint active -> Newton on the full KKT system.
  {
    Eigen::VectorXd xb = best.x;
    double lam = best.duals.lambda;
    double nu = std::max(best.duals.nu, 1e-12);
    for (int it = 0; it < 8; ++it) {
      const Eigen::VectorXd w = 2.0 * xb - one;
      Eigen::VectorXd f(n + 2);
      f.head(n) = h * xb - prob.q + lam * one + 4.0 * nu * w;
      f(n) = xb.sum() - m;
      f(n + 1) = w.squaredNorm() - big_l;
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 2, n + 2);
      jac.topLeftCorner(n, n) = h;
      jac.topLeftCorner(n, n).diagonal().array() += 8.0 * nu;
      jac.block(0, n, n, 1).setOnes();
      jac.block(0, n + 1, n, 1) = 4.0 * w;
      jac.block(n, 0, 1, n).setOnes();
      jac.block(n + 1, 0, 1, n) = 4.0 * w.transpose();
      const Eigen::VectorXd dz = jac.partialPivLu().solve(-f);
      if (!dz.allFinite()) break;
      xb += dz.head(n);
      lam += dz(n);
      nu += dz(n + 1);
      if (nu >= 0.0) detail::consider(prob, Geometry::Sphere, best, xb, Duals{lam, nu});
      if (dz.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + xb.cwiseAbs().maxCoeff())) break;
    }
  }

  rep.x = best.x;
  rep.objective = prob.objective(best.x);
  rep.kkt_residual = best.residual;
  rep.iterations = iters;
  rep.duals = best.duals;
  rep.converged = best.residual <= tol;
  return rep;
}

/// Hypercube relaxation: minimize f over {sum(x) = M, 0 <= x <= 1}.
///
/// Accelerated projected gradient (momentum with adaptive restart) using the
/// exact capped-simplex projection and a step of 1/Lipschitz, with the
/// Lipschitz constant 2*lambda_max(P)/nv estimated by power iteration. An
/// active-set polish solves the free subsystem exactly once the face has been
/// identified.
inline SolveReport solve_box_lcqp(const RelaxedProblem& prob, double tol = 1e-8) {
  prob.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("solve_box_lcqp: tol must be positive");
  const int n = prob.dim();
  const int m = prob.cardinality;

  // Power iteration for lambda_max(P).
  double lam_max = 0.0;
  if (prob.P.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = 1.0 + 1e-3 * i;
    v.normalize();
    double prev = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXd pv = prob.P * v;
      const double nrm = pv.norm();
      if (nrm == 0.0) break;
      v = pv / nrm;
      lam_max = v.dot(prob.P * v);
      if (std::abs(lam_max - prev) <= 1e-13 * std::max(1.0, lam_max)) break;
      prev = lam_max;
    }
  }
  const double lip = 2.0 * lam_max * 1.05 / prob.noise_var;
  double step = 1.0 / std::max(lip, 1e-12 * std::max(1.0, prob.q.cwiseAbs().maxCoeff()));

  Eigen::VectorXd x = project_capped_simplex(Eigen::VectorXd::Constant(n, double(m) / n), m);
  Eigen::VectorXd y = x;
  double tk = 1.0;
  double fx = prob.objective(x);
  int iters = 0;
  detail::Candidate best;
  {
    const double lam = detail::fit_box_lambda(prob.gradient(x), x).second;
    detail::consider(prob, Geometry::Box, best, x, Duals{lam, 0.0});
  }

  for (int it = 0; it < 5000; ++it) {
    ++iters;
    Eigen::VectorXd xn = project_capped_simplex(y - step * prob.gradient(y), m);
    double fn = prob.objective(xn);
    if (fn > fx) {
      // Momentum restart; if a plain gradient step still ascends, the step
      // size estimate was too optimistic.
      tk = 1.0;
      xn = project_capped_simplex(x - step * prob.gradient(x), m);
      fn = prob.objective(xn);
      if (fn > fx) {
        step *= 0.5;
        y = x;
        continue;
      }
    }
    const double tk1 = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    y = xn + ((tk - 1.0) / tk1) * (xn - x);
    x = xn;
    fx = fn;
    tk = tk1;

    if (it % 8 == 0 || it == 4999) {
      const double lam = detail::fit_box_lambda(prob.gradient(x), x).second;
      detail::consider(prob, Geometry::Box, best, x, Duals{lam, 0.0});
      if (best.residual <= 0.25 * tol) break;
    }
  }

  // Active-set refinement from the accelerated-gradient iterate: fix the
  // bounds the iterate has (nearly) reached, minimize exactly on the free
  // face, step to the first blocking bound, and release mis-signed bound
  // multipliers. Terminates at the exact optimum on a correct face; every
  // visited feasible point only replaces `best` when its residual improves.
  {
    const Eigen::MatrixXd h = 2.0 / prob.noise_var * prob.P;
    const double atol = 1e-7;
    Eigen::VectorXd x = best.x;
    std::vector<int> state(n);  // 0: at lower bound, 1: at upper bound, 2: free
    for (int i = 0; i < n; ++i) {
      if (x(i) <= atol) {
        state[i] = 0;
        x(i) = 0.0;
      } else if (x(i) >= 1.0 - atol) {
        state[i] = 1;
        x(i) = 1.0;
      } else {
        state[i] = 2;
      }
    }
    for (int pivot = 0; pivot < 50 + 4 * n; ++pivot) {
      std::vector<int> free_idx;
      int ones = 0;
      for (int i = 0; i < n; ++i) {
        if (state[i] == 2) free_idx.push_back(i);
        ones += state[i] == 1;
      }
      const int nf = static_cast<int>(free_idx.size());
      double lam;
      bool moved = false;
      if (nf > 0) {
        Eigen::MatrixXd hff(nf, nf);
        Eigen::VectorXd rhs(nf);
        for (int a = 0; a < nf; ++a) {
          for (int b = 0; b < nf; ++b) hff(a, b) = h(free_idx[a], free_idx[b]);
          double fixed = 0.0;
          for (int i = 0; i < n; ++i)
            if (state[i] == 1) fixed += h(free_idx[a], i);
          rhs(a) = prob.q(free_idx[a]) - fixed;
        }
        Eigen::VectorXd xf;
        if (!detail::equality_qp_solve(hff, rhs, m - static_cast<double>(ones), &xf, &lam)) {
          hff.diagonal().array() += 1e-12 * (1.0 + hff.diagonal().cwiseAbs().maxCoeff());
          if (!detail::equality_qp_solve(hff, rhs, m - static_cast<double>(ones), &xf, &lam)) break;
        }
        // Step toward the face minimizer, stopping at the first bound.
        double alpha = 1.0;
        int blocker = -1, blocker_bound = 0;
        for (int a = 0; a < nf; ++a) {
          const int i = free_idx[a];
          const double d = xf(a) - x(i);
          if (d > 1e-15 && x(i) + d > 1.0) {
            const double step_a = (1.0 - x(i)) / d;
            if (step_a < alpha) {
              alpha = step_a;
              blocker = i;
              blocker_bound = 1;
            }
          } else if (d < -1e-15 && x(i) + d < 0.0) {
            const double step_a = x(i) / (-d);
            if (step_a < alpha) {
              alpha = step_a;
              blocker = i;
              blocker_bound = 0;
            }
          }
        }
        double dmax = 0.0;
        for (int a = 0; a < nf; ++a) {
          const int i = free_idx[a];
          const double d = xf(a) - x(i);
          dmax = std::max(dmax, std::abs(d));
          x(i) = std::clamp(x(i) + alpha * d, 0.0, 1.0);
        }
        if (blocker >= 0) {
          state[blocker] = blocker_bound;
          x(blocker) = blocker_bound;
          moved = true;
        } else if (dmax > 1e-13 * (1.0 + x.cwiseAbs().maxCoeff())) {
          moved = true;  // full step taken, face unchanged
        }
      } else {
        lam = detail::fit_box_lambda(prob.gradient(x), x).second;
      }
      detail::consider(prob, Geometry::Box, best, x, Duals{lam, 0.0});
      if (!moved) {
        // Face optimum reached: release the worst mis-signed bound multiplier.
        const Eigen::VectorXd g = prob.gradient(x);
        const double rtol = 1e-11 * (1.0 + g.cwiseAbs().maxCoeff());
        int release = -1;
        double worst = rtol;
        for (int i = 0; i < n; ++i) {
          const double r = g(i) + lam;
          if (state[i] == 0 && -r > worst) {
            worst = -r;
            release = i;
          } else if (state[i] == 1 && r > worst) {
            worst = r;
            release = i;
          }
        }
        if (release < 0) break;
        state[release] = 2;
      }
    }
  }

  SolveReport rep;
  rep.x = best.x;
  rep.objective = prob.objective(best.x);
  rep.kkt_residual = best.residual;
  rep.iterations = iters;
  rep.duals = best.duals;
  rep.converged = best.residual <= tol;
  return rep;
}

/// Two-variable dual of the sphere relaxation.
///
/// Minimizes h(lambda, nu) = r'W^{-1}r/4 + M*lambda with W = P/nv + nu*I and
/// r = q + (nu - lambda)*1 by gradient descent (Barzilai-Borwein steps with
/// Armijo backtracking), then clamps nu* = max(0, nu_bar). When the clamp
/// lands on nu = 0, lambda is re-solved in closed form so the recovered
/// primal point x* = W^{-1} r / 2 satisfies the cardinality constraint. If W
/// becomes numerically singular (rank-deficient P with nu -> 0), the solve is
/// retried with the ridge from `reg` and flagged.
inline SolveReport solve_sphere_dual(const RelaxedProblem& prob, double tol = 1e-8) {
  prob.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("solve_sphere_dual: tol must be positive");
  const int n = prob.dim();
  const double m = prob.cardinality;
  const Eigen::VectorXd one = detail::ones(n);

  struct Eval {
    double h = 0.0;
    Eigen::VectorXd x;
    double glam = 0.0, gnu = 0.0;
    bool ok = false;
  };

  auto attempt = [&](const Eigen::MatrixXd& p_eff, bool flagged) -> SolveReport {
    SolveReport rep;
    rep.regularized = flagged;

    auto eval = [&](double lam, double nu) {
      Eval e;
      Eigen::MatrixXd w = p_eff / prob.noise_var;
      w.diagonal().array() += nu;
      Eigen::LLT<Eigen::MatrixXd> llt(w);
      if (llt.info() != Eigen::Success) return e;
      const Eigen::VectorXd r = prob.q + (nu - lam) * one;
      const Eigen::VectorXd u = llt.solve(r);
      if (!u.allFinite()) return e;
      e.x = 0.5 * u;
      e.h = 0.25 * r.dot(u) + m * lam;
      e.glam = m - e.x.sum();
      e.gnu = e.x.sum() - e.x.squaredNorm();
      e.ok = true;
      return e;
    };

    double lam = 0.0;
    double nu = 1.0 + p_eff.trace() / (n * prob.noise_var);
    Eval cur = eval(lam, nu);
    if (!cur.ok) return rep;

    double prev_lam = lam, prev_nu = nu, prev_glam = cur.glam, prev_gnu = cur.gnu;
    bool have_prev = false;
    int iters = 0;

    // Gradient descent (Barzilai-Borwein steps, Armijo backtracking).
    for (int it = 0; it < 5000; ++it) {
      ++iters;
      const double gnorm = std::max(std::abs(cur.glam), std::abs(cur.gnu));
      if (gnorm <= std::max(tol, 1e-6)) break;
      double alpha;
      if (have_prev) {
        const double s1 = lam - prev_lam, s2 = nu - prev_nu;
        const double y1 = cur.glam - prev_glam, y2 = cur.gnu - prev_gnu;
        const double sy = s1 * y1 + s2 * y2;
        const double ss = s1 * s1 + s2 * s2;
        alpha = (sy > 1e-300) ? ss / sy : 1.0 / (1.0 + gnorm);
        alpha = std::clamp(alpha, 1e-12, 1e12);
      } else {
        alpha = 1.0 / (1.0 + gnorm);
      }
      prev_lam = lam;
      prev_nu = nu;
      prev_glam = cur.glam;
      prev_gnu = cur.gnu;

      bool stepped = false;
      for (int bt = 0; bt < 60; ++bt) {
        const double nlam = lam - alpha * cur.glam;
        const double nnu = nu - alpha * cur.gnu;
        const Eval next = eval(nlam, nnu);
        if (next.ok &&
            next.h <= cur.h - 1e-4 * alpha * (cur.glam * cur.glam + cur.gnu * cur.gnu)) {
          lam = nlam;
          nu = nnu;
          cur = next;
          stepped = true;
          break;
        }
        alpha *= 0.5;
      }
      have_prev = stepped;
      if (!stepped) break;
    }

    // Newton refinement on the two dual variables; the Hessian of h is
    //   [ 1'W^{-1}1 / 2          -1'W^{-1}(1-2x) / 2      ]
    //   [ -1'W^{-1}(1-2x) / 2    (1-2x)'W^{-1}(1-2x) / 2  ].
    for (int it = 0; it < 50; ++it) {
      ++iters;
      const double gnorm = std::max(std::abs(cur.glam), std::abs(cur.gnu));
      if (gnorm <= std::max(1e-3 * tol, 1e-14)) break;
      Eigen::MatrixXd w = p_eff / prob.noise_var;
      w.diagonal().array() += nu;
      Eigen::LLT<Eigen::MatrixXd> llt(w);
      if (llt.info() != Eigen::Success) break;
      const Eigen::VectorXd a = llt.solve(one);
      const Eigen::VectorXd c = one - 2.0 * cur.x;
      const Eigen::VectorXd b = llt.solve(c);
      double h11 = 0.5 * one.dot(a);
      double h12 = -0.5 * one.dot(b);
      double h22 = 0.5 * c.dot(b);
      const double jitter = 1e-14 * (1.0 + h11 + h22);
      h11 += jitter;
      h22 += jitter;
      const double det = h11 * h22 - h12 * h12;
      if (!(std::abs(det) > 0.0)) break;
      const double dlam = -(h22 * cur.glam - h12 * cur.gnu) / det;
      const double dnu = -(h11 * cur.gnu - h12 * cur.glam) / det;
      double alpha = 1.0;
      bool stepped = false;
      for (int bt = 0; bt < 40; ++bt) {
        const Eval next = eval(lam + alpha * dlam, nu + alpha * dnu);
        if (next.ok && next.h <= cur.h + 1e-12 * (1.0 + std::abs(cur.h))) {
          lam += alpha * dlam;
          nu += alpha * dnu;
          cur = next;
          stepped = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!stepped) break;
    }

    // Clamp and recover the primal point.
    double nu_star = std::max(0.0, nu);
    double lam_star = lam;
    Eval fin;
    if (nu <= 0.0 || nu_star != nu) {
      nu_star = 0.0;
      Eigen::MatrixXd w0 = p_eff / prob.noise_var;
      Eigen::LLT<Eigen::MatrixXd> llt(w0);
      if (llt.info() != Eigen::Success) {
        rep.converged = false;
        return rep;  // caller retries with ridge
      }
      const Eigen::VectorXd wq = llt.solve(prob.q);
      const Eigen::VectorXd w1 = llt.solve(one);
      lam_star = (one.dot(wq) - 2.0 * m) / one.dot(w1);
      fin = eval(lam_star, 0.0);
    } else {
      fin = eval(lam_star, nu_star);
    }
    if (!fin.ok) {
      rep.converged = false;
      return rep;
    }

    rep.x = fin.x;
    rep.objective = prob.objective(fin.x);
    rep.iterations = iters;
    // The dual is parameterized with nu multiplying x'x - 1'x, which is a
    // quarter of the sphere constraint (2x-1)'(2x-1) - L; rescale so the
    // reported multiplier matches the kkt_residual convention.
    rep.duals = Duals{lam_star, nu_star / 4.0};
    rep.dual_objective = -fin.h;
    rep.kkt_residual = kkt_residual(prob, Geometry::Sphere, fin.x, rep.duals);
    // Convergence means the KKT conditions of the constrained dual hold at
    // (lambda*, nu*): zero lambda-gradient, and a nonnegative nu-gradient
    // when the clamp is active. Gradients scale with the cardinality and
    // ||x||^2, so the test is relative to those.
    const double gscale = 1.0 + std::abs(m) + fin.x.cwiseAbs().sum() + fin.x.squaredNorm();
    const bool kkt_ok = (nu_star > 0.0)
                            ? std::max(std::abs(fin.glam), std::abs(fin.gnu)) <= tol * gscale
                            : std::abs(fin.glam) <= tol * gscale && fin.gnu >= -tol * gscale;
    rep.converged = kkt_ok && fin.x.allFinite();
    return rep;
  };

  SolveReport rep = attempt(prob.P, false);
  if (!rep.converged) {
    const double ridge =
        (prob.reg > 0.0) ? prob.reg : 1e-8 * (1.0 + prob.P.trace() / std::max(1, n));
    Eigen::MatrixXd p_reg = prob.P;
    p_reg.diagonal().array() += ridge;
    SolveReport rep2 = attempt(p_reg, true);
    if (rep2.converged || rep2.kkt_residual < rep.kkt_residual) return rep2;
  }
  return rep;
}

}  // namespace srake::qp

#endif  // SRAKE_QP_HPP
