#include "tvcert/certifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace tvcert;
using cert::Theorem;
using lpv::MatrixXd;
using lpv::VectorXd;

namespace {

constexpr double kTol = 1.0 / 4096;

cert::Setup setup(const std::string& algo, double kappa, double frac, double m = 1.0) {
  cert::CellSpec c;
  c.algorithm = algo;
  c.kappa = kappa;
  c.nu_fraction = frac;
  c.m = m;
  return cert::make_setup(c);
}

conic::Status solve_thm1(const cert::Setup& s, double rho, bool drop_multipliers = false) {
  cert::CertifyOptions opt;
  auto grid = s.grid(opt.n_nodes);
  auto basis = cert::LyapunovParam::for_domain(s.domain, s.is_static, s.sys.n_xi);
  auto a = cert::assemble_thm1(s.sys, s.sched, grid, rho, basis, opt);
  if (drop_multipliers) {
    std::vector<conic::Constraint> kept;
    for (auto c : a.problem.constraints) {
      for (int v : a.vars.lambda_p) c.terms.erase(v);
      if (c.cone.kind == conic::Cone::Kind::Nonneg) continue;
      kept.push_back(c);
    }
    a.problem.constraints = kept;
  }
  return conic::solve(a.problem, opt.solver).status;
}

conic::ConicSolution solve_thm2(const cert::Setup& s, double rho, std::optional<cert::Weights> w = {}) {
  cert::CertifyOptions opt;
  auto grid = s.grid(opt.n_nodes);
  auto plant = cert::build_plant(s, Theorem::Variational, rho, opt.with_sector);
  auto basis = cert::LyapunovParam::for_domain(s.domain, s.is_static, plant.n_eta);
  auto a = cert::assemble_thm2(plant, grid, rho, basis, w, opt);
  auto sol = conic::solve(a.problem, opt.solver);
  if (a.vars.t >= 0 && sol.status == conic::Status::Optimal) EXPECT_GE(sol.x(a.vars.t), 1.0 - 1e-6);
  return sol;
}

cert::Certificate run(const std::string& algo, Theorem th, double kappa, double frac, double m = 1.0) {
  cert::CellSpec c;
  c.algorithm = algo;
  c.kappa = kappa;
  c.nu_fraction = frac;
  c.m = m;
  cert::CertifyOptions opt;
  opt.theorem = th;
  return cert::certify(c, opt);
}

}  // namespace

TEST(LyapunovParam, NormalizedAffineBasis) {
  cert::LyapunovParam P;
  P.lo = 8;
  P.hi = 10;
  P.n = 1;
  P.coeffs = {MatrixXd::Constant(1, 1, 3.0), MatrixXd::Constant(1, 1, 1.0)};
  EXPECT_DOUBLE_EQ(P(8.0)(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(P(9.0)(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(P(10.0)(0, 0), 4.0);
}

TEST(AssembleThm1, StaticGdBracketsTheRate) {
  auto s = setup("gd", 100, 0.0);
  EXPECT_EQ(solve_thm1(s, 0.985), conic::Status::Optimal);
  EXPECT_NE(solve_thm1(s, 0.95), conic::Status::Optimal);
}

TEST(AssembleThm1, ZeroMultipliersAreInfeasible) {
  for (const char* algo : {"gd", "nesterov", "tmm", "gd-m2"}) {
    auto s = setup(algo, 3, 0.05);
    EXPECT_EQ(solve_thm1(s, 0.999, false), conic::Status::Optimal) << algo;
    EXPECT_NE(solve_thm1(s, 0.999, true), conic::Status::Optimal) << algo;
  }
}

TEST(AssembleThm2, TripleMomentumBracket) {
  auto s = setup("tmm", 100, 0.05);
  EXPECT_EQ(solve_thm2(s, 0.955).status, conic::Status::Optimal);
}

TEST(AssembleThm2, NesterovGapBetweenTheorems) {
  auto s = setup("nesterov", 14.2671288, 0.05);
  EXPECT_NE(solve_thm1(s, 4095.0 / 4096), conic::Status::Optimal);
  EXPECT_EQ(solve_thm2(s, 0.80).status, conic::Status::Optimal);
}

TEST(AssembleThm2, ConditionOnlyObjectiveGivesTAtLeastOne) {
  // minimizing only the condition bound t of I <= P <= tI
  auto s = setup("gd", 10, 0.05);
  cert::CertifyOptions opt;
  auto plant = cert::build_plant(s, Theorem::Variational, 0.9, opt.with_sector);
  auto basis = cert::LyapunovParam::for_domain(s.domain, s.is_static, plant.n_eta);
  auto a = cert::assemble_thm2(plant, s.grid(opt.n_nodes), 0.9, basis, cert::Weights{0, 0, 0}, opt);
  ASSERT_GE(a.vars.t, 0);
  auto sol = conic::solve(a.problem, opt.solver);
  ASSERT_NE(sol.status, conic::Status::Infeasible);
  ASSERT_EQ(sol.x.size(), a.problem.n_vars);
  EXPECT_LE(conic::max_violation(a.problem, sol.x), opt.solver.feas_tol);
  EXPECT_GE(sol.x(a.vars.t), 1.0);
  EXPECT_LE(sol.rel_gap, 1e-3);
}

TEST(AssembleThm2, RejectsConstrainedSystems) {
  auto s = setup("aogd", 10, 0.05);
  EXPECT_THROW(cert::build_plant(s, Theorem::Variational, 0.9, true), std::invalid_argument);
  EXPECT_THROW(run("aogd", Theorem::Variational, 10, 0.05), std::invalid_argument);
}

TEST(LmiMatrix, AgreesWithTheAssembledConstraint) {
  // a certified GD solution makes the LMI negative definite at every grid pair
  auto c = run("gd", Theorem::Pointwise, 10, 0.5);
  ASSERT_TRUE(c.feasible);
  auto s = setup("gd", 10, 0.5);
  auto g = cert::build_plant(s, Theorem::Pointwise, c.rho, false);
  cert::LmiValues v;
  v.P = c.P;
  v.block_mult = {c.lambda_p(0)};
  for (const auto& nd : s.grid(c.grid_nodes).nodes)
    for (const auto& d : nd.deltas) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(cert::lmi_matrix(g, Theorem::Pointwise, c.rho, v, nd.theta, d));
      EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);
    }
}

TEST(Bisect, FindsTheLatticeThreshold) {
  long calls = 0;
  auto oracle = [&](long j) {
    ++calls;
    conic::ConicSolution s;
    s.status = j >= 3001 ? conic::Status::Optimal : conic::Status::Infeasible;
    return s;
  };
  auto r = cert::bisect_lattice(oracle, 0, 4095);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.j, 3001);
  EXPECT_EQ(r.solves, calls);
  EXPECT_LE(calls, 14);
  auto none = cert::bisect_lattice([](long) { return conic::ConicSolution(); }, 0, 4095);
  EXPECT_FALSE(none.feasible);
  EXPECT_EQ(none.j, 4095);
}

TEST(Certify, GdRateBoundCurvePoints) {
  auto a = run("gd", Theorem::Pointwise, 8.17934379, 1.0);
  ASSERT_TRUE(a.feasible);
  EXPECT_NEAR(a.rho, 0.9521484375, 0.01);
  auto b = run("gd", Theorem::Pointwise, 28.59955208, 0.5);
  EXPECT_FALSE(b.feasible);
  EXPECT_DOUBLE_EQ(b.rho, 4095.0 / 4096);
}

TEST(Certify, StaticGdMatchesTheContractionFactor) {
  for (double k : {2.0, 10.0}) {
    auto c = run("gd", Theorem::Pointwise, k, 0.0);
    ASSERT_TRUE(c.feasible);
    EXPECT_NEAR(c.rho, (k - 1) / (k + 1), 2 * kTol) << k;
    EXPECT_TRUE(c.is_static);
    EXPECT_EQ(c.grid_nodes, 1);
  }
}

TEST(Certify, ScalingInvariance) {
  auto a = run("gd", Theorem::Pointwise, 10, 0.5, 1.0);
  auto b = run("gd", Theorem::Pointwise, 10, 0.5, 3.0);
  ASSERT_TRUE(a.feasible && b.feasible);
  EXPECT_NEAR(a.rho, b.rho, kTol);
  auto c = run("nesterov", Theorem::Pointwise, 5, 0.05, 0.25);
  auto d = run("nesterov", Theorem::Pointwise, 5, 0.05, 1.0);
  EXPECT_NEAR(c.rho, d.rho, kTol);
}

TEST(Certify, MonotoneInRateBoundAndKappa) {
  double prev = 0;
  for (double f : {0.0, 0.05, 0.5, 1.0}) {
    auto c = run("gd", Theorem::Pointwise, 4.37419438, f);
    ASSERT_TRUE(c.feasible);
    EXPECT_GE(c.rho, prev - 1e-12) << f;
    prev = c.rho;
  }
  prev = 0;
  for (double k : cert::gd_figure_kappas()) {
    auto c = run("gd", Theorem::Pointwise, k, 0.05);
    ASSERT_TRUE(c.feasible);
    EXPECT_GE(c.rho, prev - 1e-12) << k;
    prev = c.rho;
  }
}

TEST(Certify, ReverificationPassesAndCatchesCorruption) {
  auto c = run("tmm", Theorem::Pointwise, 3, 0.05);
  ASSERT_TRUE(c.feasible);
  EXPECT_TRUE(c.recheck_ok);
  EXPECT_TRUE(c.offgrid_ok);
  auto s = setup("tmm", 3, 0.05);
  auto bad = c;
  bad.lambda_p *= 0.0;
  auto r = cert::recheck(s, bad, s.grid(c.grid_nodes), 1e-7, 50, 1);
  EXPECT_FALSE(r.grid_ok);
}

TEST(Certify, RejectsBadCells) {
  EXPECT_THROW(run("nosuch", Theorem::Pointwise, 10, 0.05), std::invalid_argument);
  EXPECT_THROW(run("gd", Theorem::Pointwise, 1.0, 0.05), std::invalid_argument);
  EXPECT_THROW(run("gd", Theorem::Pointwise, 10, -0.1), std::invalid_argument);
  EXPECT_THROW(cert::theorem_from_string("both"), std::invalid_argument);
  cert::CellSpec cell;
  cert::CertifyOptions opt;
  opt.weights = cert::Weights{};
  EXPECT_THROW(cert::certify(cell, opt), std::invalid_argument);
}

TEST(Certify, MinimizeModeReportsSensitivities) {
  cert::CellSpec cell;
  cell.algorithm = "gd";
  cell.kappa = 1.251;
  cell.nu_fraction = 0.05;
  cert::CertifyOptions opt;
  opt.theorem = Theorem::Variational;
  opt.weights = cert::Weights{};
  auto c = cert::certify(cell, opt);
  ASSERT_TRUE(c.feasible);
  ASSERT_TRUE(c.sens_rho && c.gamma_xi && c.gamma_delta && c.t_cond);
  EXPECT_NEAR(*c.sens_rho, c.rho + 64 * kTol, 1e-12);
  EXPECT_GE(*c.t_cond, 1.0 - 1e-6);
  EXPECT_GE(*c.gamma_xi, 0.0);
  EXPECT_GE(*c.gamma_delta, 0.0);
  EXPECT_TRUE(c.recheck_ok);
}

TEST(BoundConstants, IdentityAndScaledIdentity) {
  cert::Certificate c;
  c.feasible = true;
  c.is_static = true;
  c.L_nom = 1;
  c.P.kind = cert::LyapunovParam::Kind::Constant;
  c.P.n = 2;
  c.P.coeffs = {MatrixXd::Identity(2, 2)};
  cert::evaluate_bound_constants(c, 10);
  EXPECT_DOUBLE_EQ(c.c, 1.0);
  EXPECT_DOUBLE_EQ(c.c1, 1.0);
  EXPECT_DOUBLE_EQ(c.c2, 1.0);
  c.P.kind = cert::LyapunovParam::Kind::Affine;
  c.is_static = false;
  c.P.lo = 0.8;
  c.P.hi = 1.0;
  c.P.coeffs = {2 * MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2)};
  cert::evaluate_bound_constants(c, 10);
  EXPECT_DOUBLE_EQ(c.lam_max, 2.0);
  EXPECT_DOUBLE_EQ(c.lam_min, 2.0);
  EXPECT_DOUBLE_EQ(c.c, 1.0);
  EXPECT_DOUBLE_EQ(c.c2, 0.5);
  cert::Certificate infeasible;
  EXPECT_THROW(cert::evaluate_bound_constants(infeasible, 10), std::invalid_argument);
}

TEST(BoundConstants, GammaFFormula) {
  auto c = run("gd", Theorem::Variational, 10, 0.05);
  ASSERT_TRUE(c.feasible);
  ASSERT_EQ(c.gamma_f.size(), 1);
  EXPECT_NEAR(c.gamma_f(0), c.lambda_p(0) * c.rho * c.rho * (10.0 - 1.0), 1e-12 * std::abs(c.gamma_f(0)));
}

TEST(CertificateFile, RoundTrip) {
  auto c = run("nesterov", Theorem::Pointwise, 5, 0.5);
  ASSERT_TRUE(c.feasible);
  std::stringstream ss;
  cert::save_certificate(c, ss);
  auto d = cert::load_certificate(ss);
  EXPECT_EQ(d.algorithm, c.algorithm);
  EXPECT_EQ(d.theorem, c.theorem);
  EXPECT_EQ(d.rho, c.rho);
  EXPECT_EQ(d.feasible, c.feasible);
  EXPECT_EQ(d.grid_nodes, c.grid_nodes);
  EXPECT_EQ(d.lambda_p, c.lambda_p);
  EXPECT_EQ(d.c, c.c);
  ASSERT_EQ(d.P.coeffs.size(), c.P.coeffs.size());
  for (size_t i = 0; i < c.P.coeffs.size(); ++i)
    EXPECT_LE((d.P.coeffs[i] - c.P.coeffs[i]).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(d.gamma_xi.has_value());
  std::stringstream junk("{\"format\": \"other\"}");
  EXPECT_THROW(cert::load_certificate(junk), std::invalid_argument);
}

TEST(Sweep, CsvSchemaAndDeterminism) {
  cert::SweepSpec spec;
  spec.algorithm = "gd";
  spec.kappas = {2.0, 28.59955208};
  spec.fractions = {0.0, 1.0};
  spec.jobs = 2;
  auto rows = cert::sweep(spec);
  ASSERT_EQ(rows.size(), 4u);
  std::stringstream a, b;
  cert::write_sweep_csv(rows, a);
  spec.jobs = 1;
  cert::write_sweep_csv(cert::sweep(spec), b);
  EXPECT_EQ(a.str(), b.str());
  std::string header;
  std::getline(a, header);
  EXPECT_EQ(header, "algorithm,theorem,kappa,nu_fraction,rho,feasible,gamma_xi,gamma_delta,lambda_p_sum,t_cond");
  std::string line;
  std::getline(a, line);
  EXPECT_EQ(line.rfind("gd,pointwise,2,0,0.333", 0), 0u) << line;
  std::getline(a, line);
  std::getline(a, line);
  std::getline(a, line);
  EXPECT_EQ(line, "gd,pointwise,28.59955208,1,,false,,,,");
}

TEST(Sweep, PerCellFailuresAreRecorded) {
  cert::SweepSpec spec;
  spec.algorithm = "nesterov";
  spec.kappas = {1.0, 2.0};
  spec.fractions = {0.05};
  auto rows = cert::sweep(spec);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].cert.feasible);
  EXPECT_FALSE(rows[0].cert.message.empty());
  EXPECT_TRUE(rows[1].cert.feasible);
}
