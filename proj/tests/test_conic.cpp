#include "tvcert/conic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace tvcert::conic;

namespace {

VectorXd s(const MatrixXd& M) { return svec(M); }

MatrixXd diag2(double a, double b) {
  MatrixXd M = MatrixXd::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

Constraint psd_constraint(const MatrixXd& C, std::map<int, MatrixXd> terms) {
  Constraint c;
  c.cone = Cone::psd(static_cast<int>(C.rows()));
  c.constant = s(C);
  for (auto& [i, G] : terms) c.terms[i] = s(G);
  return c;
}

Constraint nonneg(double constant, int var, double coeff) {
  Constraint c;
  c.cone = Cone::nonneg(1);
  c.constant = VectorXd::Constant(1, constant);
  c.terms[var] = VectorXd::Constant(1, coeff);
  return c;
}

// X = [[x0, x1], [x1, x2]] as three scalar variables
std::map<int, MatrixXd> sym_vars(double sign) {
  MatrixXd E0 = MatrixXd::Zero(2, 2), E1 = MatrixXd::Zero(2, 2), E2 = MatrixXd::Zero(2, 2);
  E0(0, 0) = sign;
  E1(0, 1) = E1(1, 0) = sign;
  E2(1, 1) = sign;
  return {{0, E0}, {1, E1}, {2, E2}};
}

}  // namespace

TEST(Svec, Examples) {
  EXPECT_EQ(svec(MatrixXd::Identity(2, 2)), Eigen::Vector3d(1, 0, 1));
  MatrixXd S(2, 2);
  S << 0, 1, 1, 0;
  VectorXd v = svec(S);
  EXPECT_NEAR(v(1), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(v.dot(v), (S * S).trace(), 1e-14);
  EXPECT_EQ(svec_dim(4), 10);
  EXPECT_EQ(smat_dim(10), 4);
}

TEST(Svec, RoundTripAndIsometry) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N(0, 1);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 7;
    MatrixXd A(n, n), B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = N(rng), B(i, j) = N(rng);
    A = (A + A.transpose()).eval();
    B = (B + B.transpose()).eval();
    EXPECT_LE((smat(svec(A)) - A).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(svec(A).dot(svec(B)), (A * B).trace(), 1e-12 * (1 + std::abs((A * B).trace())));
  }
}

TEST(Svec, RejectsAsymmetricInput) {
  MatrixXd A(2, 2);
  A << 1, 2, 3, 4;
  EXPECT_THROW(svec(A), std::invalid_argument);
}

TEST(Solve, ScalarLowerBound) {
  ConicProblem p;
  p.add_vars(1);
  p.objective = VectorXd::Ones(1);
  p.constraints.push_back(psd_constraint(-MatrixXd::Ones(1, 1), {{0, MatrixXd::Ones(1, 1)}}));
  auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-6);
  EXPECT_NEAR(sol.objective_value, 1.0, 1e-6);
}

TEST(Solve, IntervalSandwichIsFeasible) {
  ConicProblem p;
  p.add_vars(3);
  p.constraints.push_back(psd_constraint(-diag2(2, 2), sym_vars(1.0)));
  p.constraints.push_back(psd_constraint(diag2(3, 3), sym_vars(-1.0)));
  auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::Optimal);
  MatrixXd X(2, 2);
  X << sol.x(0), sol.x(1), sol.x(1), sol.x(2);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X);
  EXPECT_GE(es.eigenvalues().minCoeff(), 2.0 - 1e-7);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 3.0 + 1e-7);
  // independent re-check agrees with the solver
  EXPECT_LE(max_violation(p, sol.x), 1e-7);
}

TEST(Solve, DetectsInfeasibility) {
  ConicProblem p;
  p.add_vars(1);
  p.constraints.push_back(nonneg(-1.0, 0, 1.0));  // x >= 1
  p.constraints.push_back(nonneg(0.0, 0, -1.0));  // -x >= 0
  EXPECT_EQ(solve(p).status, Status::Infeasible);
}

TEST(Solve, DetectsPsdInfeasibility) {
  // X >= 3I and X <= 2I
  ConicProblem p;
  p.add_vars(3);
  p.constraints.push_back(psd_constraint(-diag2(3, 3), sym_vars(1.0)));
  p.constraints.push_back(psd_constraint(diag2(2, 2), sym_vars(-1.0)));
  EXPECT_NE(solve(p).status, Status::Optimal);
}

TEST(Solve, MinimizesTraceOverSpectrahedron) {
  // minimize x0 + x2 s.t. [[x0, 1], [1, x2]] >= 0: optimum 2 at x0 = x2 = 1
  ConicProblem p;
  p.add_vars(2);
  p.objective = VectorXd::Ones(2);
  MatrixXd C(2, 2), E0 = diag2(1, 0), E1 = diag2(0, 1);
  C << 0, 1, 1, 0;
  p.constraints.push_back(psd_constraint(C, {{0, E0}, {1, E1}}));
  auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.objective_value, 2.0, 1e-5);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-3);
}

TEST(Solve, RejectsMalformedProblems) {
  ConicProblem p;
  p.add_vars(1);
  Constraint c = psd_constraint(MatrixXd::Identity(2, 2), {{0, MatrixXd::Identity(2, 2)}});
  c.terms[0] = VectorXd::Ones(2);  // wrong svec length
  p.constraints.push_back(c);
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(solve(p), std::invalid_argument);
  ConicProblem q;
  q.add_vars(1);
  q.constraints.push_back(nonneg(0.0, 3, 1.0));  // unknown variable
  EXPECT_THROW(solve(q), std::invalid_argument);
}

TEST(Solve, MinEigenvaluesAreComputedIndependently) {
  ConicProblem p;
  p.add_vars(3);
  p.constraints.push_back(psd_constraint(-diag2(2, 2), sym_vars(1.0)));
  auto e = constraint_min_eigs(p, Eigen::Vector3d(1.0, 0.0, 5.0));
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NEAR(e[0], -1.0, 1e-14);
  EXPECT_NEAR(max_violation(p, Eigen::Vector3d(1.0, 0.0, 5.0)), 1.0, 1e-14);
}

TEST(Io, DumpLoadRoundTrip) {
  ConicProblem p;
  p.add_vars(3);
  p.objective = Eigen::Vector3d(1, 0, 1);
  p.constraints.push_back(psd_constraint(-diag2(2, 2), sym_vars(1.0)));
  p.constraints.push_back(psd_constraint(diag2(3, 3), sym_vars(-1.0)));
  Constraint loose = nonneg(0.0, 1, 1.0);
  loose.strict = false;
  p.constraints.push_back(loose);
  std::stringstream ss;
  dump(p, ss);
  ConicProblem q = load(ss);
  ASSERT_EQ(q.n_vars, p.n_vars);
  ASSERT_EQ(q.constraints.size(), p.constraints.size());
  EXPECT_EQ(q.objective, p.objective);
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    EXPECT_EQ(q.constraints[i].cone.kind, p.constraints[i].cone.kind);
    EXPECT_EQ(q.constraints[i].cone.dim, p.constraints[i].cone.dim);
    EXPECT_EQ(q.constraints[i].strict, p.constraints[i].strict);
    EXPECT_LE((q.constraints[i].constant - p.constraints[i].constant).cwiseAbs().maxCoeff(), 1e-15);
    for (const auto& [v, G] : p.constraints[i].terms)
      EXPECT_LE((q.constraints[i].terms.at(v) - G).cwiseAbs().maxCoeff(), 1e-15);
  }
  auto a = solve(p), b = solve(q);
  EXPECT_EQ(a.status, b.status);
  EXPECT_NEAR(a.objective_value, b.objective_value, 1e-9);
}

TEST(Io, RejectsGarbage) {
  std::stringstream ss("not a problem\n");
  EXPECT_THROW(load(ss), std::invalid_argument);
}
