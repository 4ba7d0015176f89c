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

#include "srake/qp.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace srake;
using qp::Geometry;
using qp::RelaxedProblem;
using qp::SolveReport;

namespace {

RelaxedProblem simple_problem(const Eigen::MatrixXd& p, const Eigen::VectorXd& q, double nv,
                              int m) {
  RelaxedProblem prob;
  prob.P = p;
  prob.q = q;
  prob.noise_var = nv;
  prob.cardinality = m;
  prob.reg = 1e-8 * p.trace() / std::max<int>(1, p.rows());
  return prob;
}

double sphere_violation(const RelaxedProblem& prob, const Eigen::VectorXd& x) {
  const Eigen::VectorXd w = 2.0 * x - Eigen::VectorXd::Ones(prob.dim());
  return std::max({std::abs(x.sum() - prob.cardinality), w.squaredNorm() - prob.dim()});
}

double box_violation(const RelaxedProblem& prob, const Eigen::VectorXd& x) {
  return std::max({std::abs(x.sum() - prob.cardinality), -x.minCoeff(), x.maxCoeff() - 1.0});
}

TEST(Projection, FixedPointsAndEdgeCardinalities) {
  Eigen::VectorXd v(4);
  v << 0.1, 0.9, 0.3, 0.7;  // already feasible for m = 2
  const Eigen::VectorXd p = qp::project_capped_simplex(v, 2);
  EXPECT_LT((p - v).cwiseAbs().maxCoeff(), 1e-12);

  EXPECT_EQ(qp::project_capped_simplex(Eigen::VectorXd::Zero(5), 5),
            Eigen::VectorXd::Ones(5));
  EXPECT_EQ(qp::project_capped_simplex(Eigen::VectorXd::Random(5), 0),
            Eigen::VectorXd::Zero(5));
  EXPECT_THROW(qp::project_capped_simplex(v, 5), std::invalid_argument);
}

TEST(Projection, MatchesEnumerationOracle) {
  Rng rng(81);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = 3.0 * rng.next_normal();
    const Eigen::VectorXd got = qp::project_capped_simplex(v, 2);
    const Eigen::VectorXd want = oracle::project_box_enumerate(v, 2);
    ASSERT_LT((got - want).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Projection, MatchesBisectionOnLargerInputs) {
  Rng rng(82);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd v(30);
    for (int i = 0; i < 30; ++i) v(i) = 5.0 * rng.next_normal();
    const int m = 1 + rng.next_below(29);
    const Eigen::VectorXd got = qp::project_capped_simplex(v, m);
    const Eigen::VectorXd want = oracle::project_box_bisect(v, m);
    ASSERT_LT((got - want).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_NEAR(got.sum(), m, 1e-10);
  }
}

TEST(SphereSolver, SymmetricIdentityCase) {
  const auto prob = simple_problem(Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4),
                                   1.0, 2);
  const SolveReport rep = qp::solve_sphere_qcqp(prob);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((rep.x - Eigen::VectorXd::Constant(4, 0.5)).cwiseAbs().maxCoeff(), 1e-8);
  // Constraint inactive: the binary shell passes through radius n, the
  // centered point has ||2x-1||^2 = 0.
  EXPECT_LE(rep.kkt_residual, 1e-8);
}

TEST(SphereSolver, UniformLinearCase) {
  const auto prob = simple_problem(1e-6 * Eigen::MatrixXd::Identity(5, 5),
                                   Eigen::VectorXd::Constant(5, 3.0), 0.5, 2);
  const SolveReport rep = qp::solve_sphere_qcqp(prob);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((rep.x - Eigen::VectorXd::Constant(5, 0.4)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SphereSolver, MatchesReferenceOnRandomInstances) {
  Rng rng(91);
  for (int rep = 0; rep < 10; ++rep) {
    auto prob = oracle::random_problem(rng, 8);
    prob.cardinality = std::min(3, prob.dim() - 1);
    const SolveReport got = qp::solve_sphere_qcqp(prob);
    const double ref = oracle::reference_solve(prob, /*sphere=*/true, 200000);
    ASSERT_TRUE(got.converged);
    ASSERT_LE(got.objective, ref + 1e-6 * (1.0 + std::abs(ref)));
    ASSERT_NEAR(got.objective, ref, 1e-6 * (1.0 + std::abs(ref)));
    ASSERT_LE(sphere_violation(prob, got.x), 1e-8);
  }
}

TEST(BoxSolver, UniformAndVertexCases) {
  const auto uniform = simple_problem(1e-6 * Eigen::MatrixXd::Identity(5, 5),
                                      Eigen::VectorXd::Constant(5, 3.0), 1.0, 2);
  const SolveReport rep = qp::solve_box_lcqp(uniform);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((rep.x - Eigen::VectorXd::Constant(5, 0.4)).cwiseAbs().maxCoeff(), 1e-6);

  Eigen::VectorXd q(6);
  q << 9.0, 0.1, 8.5, 0.2, 0.1, 7.9;  // three dominant entries
  const auto vertex = simple_problem(Eigen::MatrixXd::Zero(6, 6), q, 1.0, 3);
  const SolveReport vrep = qp::solve_box_lcqp(vertex);
  EXPECT_TRUE(vrep.converged);
  Eigen::VectorXd want(6);
  want << 1, 0, 1, 0, 0, 1;
  EXPECT_LT((vrep.x - want).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(BoxSolver, MatchesReferenceOnRandomInstances) {
  Rng rng(92);
  for (int rep = 0; rep < 10; ++rep) {
    auto prob = oracle::random_problem(rng, 8);
    prob.cardinality = std::min(3, prob.dim() - 1);
    const SolveReport got = qp::solve_box_lcqp(prob);
    const double ref = oracle::reference_solve(prob, /*sphere=*/false, 200000);
    ASSERT_TRUE(got.converged);
    ASSERT_NEAR(got.objective, ref, 1e-6 * (1.0 + std::abs(ref)));
    ASSERT_LE(box_violation(prob, got.x), 1e-8);
  }
}

TEST(Solvers, BeatRandomFeasiblePoints) {
  Rng rng(93);
  auto prob = oracle::random_problem(rng, 10);
  const SolveReport sph = qp::solve_sphere_qcqp(prob);
  const SolveReport box = qp::solve_box_lcqp(prob);
  for (int rep = 0; rep < 10000; ++rep) {
    Eigen::VectorXd y(prob.dim());
    for (int i = 0; i < prob.dim(); ++i) y(i) = 2.0 * rng.next_normal();
    const Eigen::VectorXd on_box = qp::project_capped_simplex(y, prob.cardinality);
    ASSERT_GE(prob.objective(on_box), box.objective - 1e-9 * (1.0 + std::abs(box.objective)));
    const Eigen::VectorXd on_sphere = oracle::project_sphere_cap(y, prob.cardinality);
    ASSERT_GE(prob.objective(on_sphere),
              sph.objective - 1e-9 * (1.0 + std::abs(sph.objective)));
  }
}

TEST(Solvers, LowerBoundIntegerOptimum) {
  Rng rng(94);
  for (int rep = 0; rep < 20; ++rep) {
    auto prob = oracle::random_problem(rng, 12);
    const double integer = oracle::integer_optimum(prob);
    const double margin = 1e-6 * (1.0 + std::abs(integer));
    EXPECT_LE(qp::solve_sphere_qcqp(prob).objective, integer + margin);
    EXPECT_LE(qp::solve_box_lcqp(prob).objective, integer + margin);
  }
}

TEST(DualSolver, SymmetricIdentityCase) {
  const auto prob = simple_problem(Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4),
                                   1.0, 2);
  const SolveReport rep = qp::solve_sphere_dual(prob);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((rep.x - Eigen::VectorXd::Constant(4, 0.5)).cwiseAbs().maxCoeff(), 1e-6);
  ASSERT_TRUE(rep.dual_objective.has_value());
  EXPECT_NEAR(*rep.dual_objective, 1.0, 1e-8);  // strong duality: primal value is 1
}

TEST(DualSolver, StrongDualityOnStrictlyConvexInstances) {
  Rng rng(95);
  for (int rep = 0; rep < 20; ++rep) {
    auto prob = oracle::random_problem(rng, 8, /*convexify=*/1e-3);
    const SolveReport primal = qp::solve_sphere_qcqp(prob);
    const SolveReport dual = qp::solve_sphere_dual(prob);
    ASSERT_TRUE(primal.converged);
    ASSERT_TRUE(dual.converged);
    ASSERT_TRUE(dual.dual_objective.has_value());
    // Weak duality plus a tiny numerical slack, and a tight gap.
    EXPECT_LE(*dual.dual_objective, primal.objective + 1e-9 * (1.0 + std::abs(primal.objective)));
    EXPECT_NEAR(*dual.dual_objective, primal.objective,
                1e-5 * (1.0 + std::abs(primal.objective)));
    EXPECT_NEAR(dual.x.sum(), prob.cardinality, 1e-5);
  }
}

TEST(DualSolver, SingularInterferenceNeedsRidge) {
  // Rank-1 P with a generic q: the dual may approach nu -> 0 where the
  // unregularized system is singular; the solve must still return a usable,
  // flagged report with the cardinality met.
  Rng rng(96);
  for (int it = 0; it < 10; ++it) {
    Eigen::VectorXd g(6), q(6);
    for (int i = 0; i < 6; ++i) {
      g(i) = rng.next_normal();
      const double z = rng.next_normal();
      q(i) = z * z;
    }
    auto prob = simple_problem(g * g.transpose(), q, 0.1, 3);
    const SolveReport rep = qp::solve_sphere_dual(prob);
    ASSERT_TRUE(rep.x.allFinite());
    EXPECT_NEAR(rep.x.sum(), 3.0, 1e-4);
  }
}

TEST(KktResidual, ExactOptimumAndPerturbationScan) {
  const auto prob = simple_problem(Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4),
                                   1.0, 2);
  const Eigen::VectorXd star = Eigen::VectorXd::Constant(4, 0.5);
  EXPECT_LE(qp::kkt_residual(prob, Geometry::Sphere, star), 1e-10);
  EXPECT_LE(qp::kkt_residual(prob, Geometry::Box, star), 1e-10);

  Eigen::VectorXd dir(4);
  dir << 1.0, -0.3, 0.2, 0.4;
  double prev = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double r = qp::kkt_residual(prob, Geometry::Sphere, star + 0.05 * k * dir);
    EXPECT_GE(r, prev - 1e-12);
    prev = r;
  }
}

TEST(KktResidual, InfeasibilityIsLowerBounded) {
  Rng rng(97);
  auto prob = oracle::random_problem(rng, 8);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(prob.dim(), 0.25);
  const double miss = std::abs(x.sum() - prob.cardinality);
  EXPECT_GE(qp::kkt_residual(prob, Geometry::Sphere, x), miss - 1e-12);
  EXPECT_GE(qp::kkt_residual(prob, Geometry::Box, x), miss - 1e-12);
}

TEST(Solvers, RejectBadArguments) {
  const auto prob = simple_problem(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3),
                                   1.0, 1);
  EXPECT_THROW(qp::solve_sphere_qcqp(prob, 0.0), std::invalid_argument);
  EXPECT_THROW(qp::solve_box_lcqp(prob, -1.0), std::invalid_argument);
  EXPECT_THROW(qp::solve_sphere_dual(prob, 0.0), std::invalid_argument);
  auto bad = prob;
  bad.cardinality = 7;
  EXPECT_THROW(qp::solve_box_lcqp(bad), std::invalid_argument);
}

TEST(Solvers, DegenerateCardinalities) {
  const auto zero = simple_problem(Eigen::MatrixXd::Identity(4, 4),
                                   Eigen::VectorXd::Ones(4), 1.0, 0);
  EXPECT_EQ(qp::solve_sphere_qcqp(zero).x, Eigen::VectorXd::Zero(4));
  const auto full = simple_problem(Eigen::MatrixXd::Identity(4, 4),
                                   Eigen::VectorXd::Ones(4), 1.0, 4);
  EXPECT_EQ(qp::solve_sphere_qcqp(full).x, Eigen::VectorXd::Ones(4));
  const SolveReport boxful = qp::solve_box_lcqp(full);
  EXPECT_LT((boxful.x - Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff(), 1e-9);
}

}  // namespace
