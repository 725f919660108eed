#include "tvcert/certifier.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace tvcert::cert {

using conic::ConicProblem;
using conic::Cone;
using conic::Constraint;
using conic::svec;
using conic::svec_dim;
using iqc::AugmentedPlant;
using iqc::FilterKind;

const char* to_string(Theorem t) { return t == Theorem::Pointwise ? "pointwise" : "variational"; }

Theorem theorem_from_string(const std::string& s) {
  if (s == "pointwise") return Theorem::Pointwise;
  if (s == "variational") return Theorem::Variational;
  throw std::invalid_argument("unknown theorem '" + s + "' (expected pointwise or variational)");
}

LyapunovParam LyapunovParam::for_domain(const lpv::ParamDomain& dom, bool is_static, int n) {
  LyapunovParam p;
  p.kind = is_static ? Kind::Constant : Kind::Affine;
  p.lo = dom.lo(0);
  p.hi = dom.hi(0);
  p.n = n;
  return p;
}

double LyapunovParam::phi(int i, double theta) const {
  if (i == 0) return 1.0;
  return 2.0 * (theta - lo) / (hi - lo) - 1.0;
}

MatrixXd LyapunovParam::operator()(double theta) const {
  MatrixXd P = MatrixXd::Zero(n, n);
  for (int i = 0; i < static_cast<int>(coeffs.size()); ++i) P += phi(i, theta) * coeffs[i];
  return P;
}

namespace {

MatrixXd sym(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

// Outer factors of the LMI at one grid pair.
struct Outer {
  MatrixXd O1, O2, O3, E1, E2;
  int N = 0;
};

Outer outer_factors(const AugmentedPlant& g, Theorem th, const VectorXd& theta) {
  iqc::AugmentedMatrices M = iqc::eval_plant(g, theta);
  const int ne = g.n_eta, nu = g.n_u;
  const bool var = th == Theorem::Variational;
  Outer o;
  o.N = ne + nu + (var ? g.n_xi + g.p : 0);
  o.O1 = MatrixXd::Zero(ne, o.N);
  o.O1.leftCols(ne).setIdentity();
  o.O2 = MatrixXd::Zero(ne, o.N);
  o.O2.leftCols(ne) = M.A;
  o.O2.middleCols(ne, nu) = M.B;
  o.O3 = MatrixXd::Zero(g.n_psi, o.N);
  o.O3.leftCols(ne) = M.C;
  o.O3.middleCols(ne, nu) = M.D;
  if (var) {
    o.O2.middleCols(ne + nu, g.n_xi) = M.Bx;
    o.O2.rightCols(g.p) = M.Bd;
    o.O3.middleCols(ne + nu, g.n_xi) = M.Dx;
    o.O3.rightCols(g.p) = M.Dd;
    o.E1 = MatrixXd::Zero(g.n_xi, o.N);
    o.E1.middleCols(ne + nu, g.n_xi).setIdentity();
    o.E2 = MatrixXd::Zero(g.p, o.N);
    o.E2.rightCols(g.p).setIdentity();
  }
  return o;
}

MatrixXd block_quad(const Outer& o, const iqc::RowBlock& b) {
  MatrixXd R = o.O3.middleRows(b.first_row, b.rows);
  return R.transpose() * b.M * R;
}

Assembly assemble(const AugmentedPlant& g, Theorem th, const lpv::ConsistentGrid& grid, double rho,
                  const LyapunovParam& basis, const std::optional<Weights>& weights, const CertifyOptions& opt) {
  if (basis.n != g.n_eta) throw std::invalid_argument("Lyapunov basis size does not match the plant");
  Assembly a;
  a.basis = basis;
  a.basis.coeffs.clear();
  ConicProblem& pr = a.problem;
  VarMap& v = a.vars;
  const int n = g.n_eta, sn = svec_dim(n), p = g.p, q = g.n_u - g.p;
  v.n = n;
  for (int i = 0; i < basis.terms(); ++i) v.P.push_back(pr.add_vars(sn));
  v.lambda_p.assign(p, -1);
  v.lambda_q.assign(q, -1);
  v.lambda_s.assign(p, -1);
  for (const auto& b : g.rows) {
    int var;
    if (b.kind == FilterKind::Passivity) {
      int& s = v.lambda_q[b.channel - p];
      if (s < 0) s = pr.add_vars(1);
      var = s;
    } else if (b.kind == FilterKind::Variational || th == Theorem::Pointwise) {
      int& s = v.lambda_p[b.channel];
      if (s < 0) s = pr.add_vars(1);
      var = s;
    } else {
      int& s = v.lambda_s[b.channel];
      if (s < 0) s = pr.add_vars(1);
      var = s;
    }
    v.block.push_back(var);
  }
  for (int& s : v.lambda_p)
    if (s < 0) s = pr.add_vars(1);
  for (int& s : v.lambda_q)
    if (s < 0) s = pr.add_vars(1);
  if (th == Theorem::Variational) {
    v.gamma_xi = pr.add_vars(1);
    v.gamma_delta = pr.add_vars(1);
  }
  if (weights) v.t = pr.add_vars(1);

  // unit basis matrices of the svec coordinates
  std::vector<MatrixXd> E(sn);
  for (int k = 0; k < sn; ++k) E[k] = conic::smat(VectorXd::Unit(sn, k));

  const double s2 = rho * rho;
  int pair_id = 0;
  for (const auto& node : grid.nodes) {
    const double th0 = node.theta(0);
    for (const auto& d : node.deltas) {
      Outer o = outer_factors(g, th, node.theta);
      const double th1 = th0 + d(0);
      Constraint c;
      c.cone = Cone::psd(o.N);
      c.label = "lmi pair " + std::to_string(pair_id++);
      c.constant = svec(-opt.eps_feas * MatrixXd::Identity(o.N, o.N));
      for (int i = 0; i < basis.terms(); ++i) {
        const double f0 = basis.phi(i, th0), f1 = basis.phi(i, th1);
        for (int k = 0; k < sn; ++k) {
          MatrixXd G = -s2 * f0 * (o.O1.transpose() * E[k] * o.O1) + f1 * (o.O2.transpose() * E[k] * o.O2);
          c.terms[v.P[i] + k] = svec(sym(-G));
        }
      }
      for (size_t b = 0; b < g.rows.size(); ++b) {
        VectorXd t = svec(sym(-block_quad(o, g.rows[b])));
        auto it = c.terms.find(v.block[b]);
        if (it == c.terms.end())
          c.terms[v.block[b]] = t;
        else
          it->second += t;
      }
      if (th == Theorem::Variational) {
        c.terms[v.gamma_xi] = svec(o.E1.transpose() * o.E1);
        c.terms[v.gamma_delta] = svec(o.E2.transpose() * o.E2);
      }
      pr.constraints.push_back(std::move(c));
    }
    // P(theta) >= eps_P I
    Constraint cp;
    cp.cone = Cone::psd(n);
    cp.label = "P node";
    cp.constant = svec(-opt.eps_P * MatrixXd::Identity(n, n));
    for (int i = 0; i < basis.terms(); ++i) {
      const double f0 = basis.phi(i, th0);
      if (f0 == 0.0) continue;
      for (int k = 0; k < sn; ++k) cp.terms[v.P[i] + k] = f0 * VectorXd::Unit(sn, k);
    }
    pr.constraints.push_back(std::move(cp));
    if (weights) {
      // [P I; I tI] >= 0 and tI - P >= 0
      Constraint cs;
      cs.cone = Cone::psd(2 * n);
      cs.label = "condition schur";
      MatrixXd K = MatrixXd::Zero(2 * n, 2 * n);
      K.topRightCorner(n, n).setIdentity();
      K.bottomLeftCorner(n, n).setIdentity();
      cs.constant = svec(K);
      Constraint cu;
      cu.cone = Cone::psd(n);
      cu.label = "condition upper";
      cu.constant = VectorXd::Zero(sn);
      for (int i = 0; i < basis.terms(); ++i) {
        const double f0 = basis.phi(i, th0);
        if (f0 == 0.0) continue;
        for (int k = 0; k < sn; ++k) {
          MatrixXd B = MatrixXd::Zero(2 * n, 2 * n);
          B.topLeftCorner(n, n) = f0 * E[k];
          cs.terms[v.P[i] + k] = svec(B);
          cu.terms[v.P[i] + k] = -f0 * VectorXd::Unit(sn, k);
        }
      }
      MatrixXd T = MatrixXd::Zero(2 * n, 2 * n);
      T.bottomRightCorner(n, n).setIdentity();
      cs.terms[v.t] = svec(T);
      cu.terms[v.t] = svec(MatrixXd::Identity(n, n));
      pr.constraints.push_back(std::move(cs));
      pr.constraints.push_back(std::move(cu));
    }
  }

  // multipliers and sensitivities are nonnegative
  std::vector<int> nonneg;
  for (int s : v.lambda_p) nonneg.push_back(s);
  for (int s : v.lambda_q) nonneg.push_back(s);
  for (int s : v.lambda_s)
    if (s >= 0) nonneg.push_back(s);
  if (v.gamma_xi >= 0) nonneg.push_back(v.gamma_xi);
  if (v.gamma_delta >= 0) nonneg.push_back(v.gamma_delta);
  if (v.t >= 0) nonneg.push_back(v.t);
  Constraint cn;
  cn.cone = Cone::nonneg(static_cast<int>(nonneg.size()));
  cn.label = "multipliers";
  cn.strict = false;
  cn.constant = VectorXd::Zero(nonneg.size());
  for (size_t i = 0; i < nonneg.size(); ++i) {
    VectorXd e = VectorXd::Zero(nonneg.size());
    e(i) = 1.0;
    cn.terms[nonneg[i]] = e;
  }
  pr.constraints.push_back(std::move(cn));

  pr.objective = VectorXd::Zero(pr.n_vars);
  if (weights) {
    pr.objective(v.t) = 1.0;
    if (v.gamma_xi >= 0) pr.objective(v.gamma_xi) = weights->k1;
    if (v.gamma_delta >= 0) pr.objective(v.gamma_delta) = weights->k2;
    for (int s : v.lambda_p) pr.objective(s) = weights->k3;
  }
  pr.validate();
  return a;
}

VectorXd pick(const VectorXd& x, const std::vector<int>& idx) {
  VectorXd out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out(i) = idx[i] >= 0 ? x(idx[i]) : 0.0;
  return out;
}

}  // namespace

Assembly assemble_thm1(const lpv::LpvSystem& sys, const catalog::SectorSchedule& sched,
                       const lpv::ConsistentGrid& grid, double rho, const LyapunovParam& basis,
                       const CertifyOptions& opt) {
  if (!(rho > 0 && rho <= 1)) throw std::invalid_argument("rho must lie in (0, 1]");
  std::vector<iqc::Attachment> att;
  for (int i = 0; i < sys.p; ++i) att.push_back({iqc::make_sector_iqc(sched), i});
  for (int j = 0; j < sys.q; ++j) att.push_back({iqc::make_passivity_iqc(), sys.p + j});
  return assemble(iqc::augment(sys, att), Theorem::Pointwise, grid, rho, basis, std::nullopt, opt);
}

Assembly assemble_thm2(const AugmentedPlant& plant, const lpv::ConsistentGrid& grid, double rho,
                       const LyapunovParam& basis, const std::optional<Weights>& weights,
                       const CertifyOptions& opt) {
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must lie in (0, 1)");
  return assemble(plant, Theorem::Variational, grid, rho, basis, weights, opt);
}

MatrixXd lmi_matrix(const AugmentedPlant& g, Theorem th, double rho, const LmiValues& v, const VectorXd& theta,
                    const VectorXd& delta) {
  Outer o = outer_factors(g, th, theta);
  const double t0 = theta(0), t1 = theta(0) + delta(0);
  MatrixXd G = -rho * rho * o.O1.transpose() * v.P(t0) * o.O1 + o.O2.transpose() * v.P(t1) * o.O2;
  for (size_t b = 0; b < g.rows.size(); ++b) G += v.block_mult.at(b) * block_quad(o, g.rows[b]);
  if (th == Theorem::Variational)
    G -= v.gamma_xi * o.E1.transpose() * o.E1 + v.gamma_delta * o.E2.transpose() * o.E2;
  return sym(G);
}

lpv::ConsistentGrid Setup::grid(int n_nodes) const {
  if (is_static) return lpv::static_grid(VectorXd::Constant(1, L_nom));
  return lpv::build_consistent_grid(domain, n_nodes);
}

Setup make_setup(const CellSpec& cell) {
  if (!(cell.m > 0)) throw std::invalid_argument("strong convexity parameter must be positive");
  if (!(cell.kappa > 1.0)) throw std::invalid_argument("kappa must exceed 1");
  if (!(cell.nu_fraction >= 0.0)) throw std::invalid_argument("nu fraction must be nonnegative");
  if (!catalog::is_known(cell.algorithm)) throw std::invalid_argument("unknown algorithm id '" + cell.algorithm + "'");
  Setup s;
  s.cell = cell;
  s.L_nom = cell.kappa * cell.m;
  s.is_static = cell.nu_fraction == 0.0;
  const double nu = cell.nu_fraction * s.L_nom / 5.0;
  s.domain = lpv::ParamDomain::interval(0.8 * s.L_nom, s.L_nom, -nu, nu);
  s.sched = catalog::SectorSchedule::smoothness_scheduled(cell.m);
  s.sys = catalog::by_name(cell.algorithm, s.sched, s.L_nom, cell.aogd);
  return s;
}

AugmentedPlant build_plant(const Setup& s, Theorem th, double rho, bool with_sector) {
  if (th == Theorem::Variational) return iqc::augment_variational(s.sys, s.sched, rho, with_sector);
  std::vector<iqc::Attachment> att;
  for (int i = 0; i < s.sys.p; ++i) att.push_back({iqc::make_sector_iqc(s.sched), i});
  for (int j = 0; j < s.sys.q; ++j) att.push_back({iqc::make_passivity_iqc(), s.sys.p + j});
  return iqc::augment(s.sys, att);
}

BisectResult bisect_lattice(const std::function<conic::ConicSolution(long)>& feasible_at, long j_lo, long j_hi) {
  BisectResult r;
  conic::ConicSolution top = feasible_at(j_hi);
  ++r.solves;
  if (top.status != conic::Status::Optimal) {
    r.j = j_hi;
    return r;
  }
  r.feasible = true;
  r.solution = std::move(top);
  long lo = j_lo, hi = j_hi;
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    conic::ConicSolution s = feasible_at(mid);
    ++r.solves;
    if (s.status == conic::Status::Optimal) {
      hi = mid;
      r.solution = std::move(s);
    } else {
      lo = mid;
    }
  }
  r.j = hi;
  return r;
}

namespace {

// Copy solved variables into the certificate.
void store_solution(Certificate& c, const Assembly& a, const VectorXd& x) {
  c.P = a.basis;
  c.P.coeffs.clear();
  const int sn = svec_dim(a.vars.n);
  for (int off : a.vars.P) c.P.coeffs.push_back(conic::smat(x.segment(off, sn)));
  c.lambda_p = pick(x, a.vars.lambda_p);
  c.lambda_q = pick(x, a.vars.lambda_q);
  bool any_s = std::any_of(a.vars.lambda_s.begin(), a.vars.lambda_s.end(), [](int s) { return s >= 0; });
  c.lambda_s = any_s ? pick(x, a.vars.lambda_s) : VectorXd();
  c.gamma_xi.reset();
  c.gamma_delta.reset();
  c.t_cond.reset();
  if (a.vars.gamma_xi >= 0) c.gamma_xi = x(a.vars.gamma_xi);
  if (a.vars.gamma_delta >= 0) c.gamma_delta = x(a.vars.gamma_delta);
  if (a.vars.t >= 0) c.t_cond = x(a.vars.t);
}

LmiValues values_of(const Certificate& c, const AugmentedPlant& g, Theorem th) {
  LmiValues v;
  v.P = c.P;
  const int p = c.p;
  for (const auto& b : g.rows) {
    double mult;
    if (b.kind == FilterKind::Passivity)
      mult = c.lambda_q(b.channel - p);
    else if (b.kind == FilterKind::Variational || th == Theorem::Pointwise)
      mult = c.lambda_p(b.channel);
    else
      mult = c.lambda_s.size() ? c.lambda_s(b.channel) : 0.0;
    v.block_mult.push_back(mult);
  }
  v.gamma_xi = c.gamma_xi.value_or(0.0);
  v.gamma_delta = c.gamma_delta.value_or(0.0);
  return v;
}

double scaled_top_eig(const MatrixXd& G) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() / std::max(1.0, G.cwiseAbs().maxCoeff());
}

}  // namespace

void evaluate_bound_constants(Certificate& c, int fine_nodes) {
  if (!c.feasible) throw std::invalid_argument("bound constants need a feasible certificate");
  std::vector<double> ths;
  if (c.is_static || c.P.kind == LyapunovParam::Kind::Constant) {
    ths.push_back(c.L_nom);
  } else {
    const int nf = std::max(2, fine_nodes);
    for (int k = 0; k < nf; ++k) ths.push_back(c.P.lo + (c.P.hi - c.P.lo) * k / (nf - 1));
  }
  double hi = -INFINITY, lo = INFINITY;
  for (double th : ths) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(c.P(th), Eigen::EigenvaluesOnly);
    hi = std::max(hi, es.eigenvalues().maxCoeff());
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  if (!(lo > 0)) throw std::runtime_error("Lyapunov matrix is not positive definite on the evaluation grid");
  c.lam_max = hi;
  c.lam_min = lo;
  c.c1 = hi / lo;
  c.c = std::sqrt(c.c1);
  c.c2 = 1.0 / lo;
  c.gamma_f = VectorXd();
  if (c.theorem == Theorem::Variational) {
    const double r = c.sens_rho.value_or(c.rho);
    const double Lmax = c.is_static ? c.L_nom : c.domain.hi(0);
    c.gamma_f = c.lambda_p * (r * r * (Lmax - c.m));
  }
}

RecheckReport recheck(const Setup& s, const Certificate& c, const lpv::ConsistentGrid& grid, double eps_feas,
                      int offgrid_samples, unsigned seed) {
  RecheckReport r;
  const double rho = c.sens_rho.value_or(c.rho);
  AugmentedPlant g = build_plant(s, c.theorem, rho, c.lambda_s.size() > 0);
  LmiValues v = values_of(c, g, c.theorem);
  r.grid_worst = -INFINITY;
  for (const auto& nd : grid.nodes)
    for (const auto& d : nd.deltas) r.grid_worst = std::max(r.grid_worst, scaled_top_eig(lmi_matrix(g, c.theorem, rho, v, nd.theta, d)));
  r.grid_ok = r.grid_worst <= eps_feas;
  r.offgrid_worst = -INFINITY;
  if (s.is_static || offgrid_samples <= 0) {
    r.offgrid_ok = true;
    r.offgrid_worst = r.grid_worst;
    return r;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double lo = s.domain.lo(0), hi = s.domain.hi(0);
  for (int k = 0; k < offgrid_samples; ++k) {
    double th = lo + (hi - lo) * U(rng);
    double a = std::max(s.domain.delta_lo(0), lo - th), b = std::min(s.domain.delta_hi(0), hi - th);
    double d = a + (b - a) * U(rng);
    VectorXd T = VectorXd::Constant(1, th), D = VectorXd::Constant(1, d);
    r.offgrid_worst = std::max(r.offgrid_worst, scaled_top_eig(lmi_matrix(g, c.theorem, rho, v, T, D)));
  }
  r.offgrid_ok = r.offgrid_worst <= 10.0 * eps_feas;
  return r;
}

Certificate certify(const CellSpec& cell, const CertifyOptions& opt) {
  if (opt.rho_bits < 1 || opt.rho_bits > 30) throw std::invalid_argument("rho_bits must lie in [1, 30]");
  if (opt.n_nodes < 2) throw std::invalid_argument("need at least 2 grid nodes");
  Setup s = make_setup(cell);
  Certificate c;
  c.algorithm = cell.algorithm;
  c.theorem = opt.theorem;
  c.m = cell.m;
  c.L_nom = s.L_nom;
  c.kappa = cell.kappa;
  c.nu_fraction = cell.nu_fraction;
  c.is_static = s.is_static;
  c.domain = s.domain;
  c.p = s.sys.p;
  c.q = s.sys.q;

  int n = opt.n_nodes;
  lpv::ConsistentGrid grid = s.grid(n);
  s.sched.validate(grid);
  if (cell.algorithm == "nesterov" || cell.algorithm == "tmm") catalog::validate_kappa(s.sched, grid);
  lpv::validate_structure(s.sys, grid);
  lpv::FixedPointReport fp = lpv::check_fixed_point(s.sys, grid);
  if (!fp.ok) throw std::invalid_argument("system '" + s.sys.name + "' violates the fixed-point assumption");
  if (opt.theorem == Theorem::Variational && s.sys.q >= 1)
    throw std::invalid_argument("variational certification is unsupported for systems with normal-cone channels");

  const long scale = 1L << opt.rho_bits;
  const long j_top = scale - 1;
  const int n_eta = opt.theorem == Theorem::Pointwise ? s.sys.n_xi : s.sys.n_xi + 4 * s.sys.p;
  LyapunovParam basis = LyapunovParam::for_domain(s.domain, s.is_static, n_eta);
  std::optional<AugmentedPlant> pw;
  if (opt.theorem == Theorem::Pointwise) pw = build_plant(s, Theorem::Pointwise, 1.0, false);

  Assembly last;
  auto build = [&](long j, const lpv::ConsistentGrid& gr, const std::optional<Weights>& w) {
    const double rho = static_cast<double>(j) / scale;
    if (opt.theorem == Theorem::Pointwise) return assemble(*pw, Theorem::Pointwise, gr, rho, basis, w, opt);
    return assemble(build_plant(s, Theorem::Variational, rho, opt.with_sector), Theorem::Variational, gr, rho,
                    basis, w, opt);
  };
  auto run = [&](const lpv::ConsistentGrid& gr) {
    return [&, gr](long j) {
      Assembly a = build(j, gr, std::nullopt);
      conic::ConicSolution sol = conic::solve(a.problem, opt.solver);
      if (sol.status == conic::Status::Optimal) last = std::move(a);
      return sol;
    };
  };

  // bisection with the assembly of the last feasible point kept alongside
  Assembly best_asm;
  auto bisect_on = [&](const lpv::ConsistentGrid& gr, long lo, long hi) {
    auto f = run(gr);
    BisectResult br;
    conic::ConicSolution top = f(hi);
    ++br.solves;
    if (top.status != conic::Status::Optimal) {
      br.j = hi;
      return br;
    }
    br.feasible = true;
    br.solution = top;
    best_asm = last;
    while (hi - lo > 1) {
      long mid = lo + (hi - lo) / 2;
      conic::ConicSolution sol = f(mid);
      ++br.solves;
      if (sol.status == conic::Status::Optimal) {
        hi = mid;
        br.solution = sol;
        best_asm = last;
      } else {
        lo = mid;
      }
    }
    br.j = hi;
    return br;
  };

  BisectResult br = bisect_on(grid, 0, j_top);
  c.solves = br.solves;
  if (br.feasible && !s.is_static) {
    for (int r = 0; r < opt.max_refinements; ++r) {
      lpv::ConsistentGrid fine = s.grid(2 * n - 1);
      auto f = run(fine);
      conic::ConicSolution chk = f(br.j);
      ++c.solves;
      if (chk.status == conic::Status::Optimal) {
        br.solution = chk;
        best_asm = last;
        n = 2 * n - 1;
        grid = fine;
        break;
      }
      BisectResult up = bisect_on(fine, br.j, j_top);
      c.solves += up.solves;
      n = 2 * n - 1;
      grid = fine;
      ++c.refinements;
      br = up;
      if (!up.feasible) break;
    }
  }
  c.grid_nodes = s.is_static ? 1 : n;
  c.feasible = br.feasible;
  c.rho = static_cast<double>(br.j) / scale;
  if (!c.feasible) {
    c.message = "infeasible at the top of the rate lattice";
    return c;
  }
  store_solution(c, best_asm, br.solution.x);

  if (opt.weights) {
    if (opt.theorem != Theorem::Variational) throw std::invalid_argument("minimize mode applies to the variational theorem");
    long js = std::min(br.j + opt.sens_lattice_offset, j_top);
    Assembly a = build(js, grid, opt.weights);
    conic::ConicSolution sol = conic::solve(a.problem, opt.solver);
    ++c.solves;
    if (sol.status == conic::Status::Optimal) {
      store_solution(c, a, sol.x);
      c.sens_rho = static_cast<double>(js) / scale;
    } else if (sol.x.size() == a.problem.n_vars && sol.max_violation <= opt.solver.feas_tol) {
      // feasible but not proven minimal; the re-check below still guards validity
      store_solution(c, a, sol.x);
      c.sens_rho = static_cast<double>(js) / scale;
      char buf[128];
      std::snprintf(buf, sizeof buf, "trade-off solve stopped early (relative gap %.2g); sensitivities feasible, not proven minimal",
                    sol.rel_gap);
      c.message = buf;
    } else {
      c.message = "minimize-mode solve failed; feasibility certificate kept";
    }
  }

  evaluate_bound_constants(c, 10 * c.grid_nodes);
  RecheckReport rr = recheck(s, c, grid, opt.eps_feas, opt.offgrid_samples, opt.seed);
  c.recheck_ok = rr.grid_ok;
  c.offgrid_ok = rr.offgrid_ok;
  c.recheck_worst = rr.grid_worst;
  c.offgrid_worst = rr.offgrid_worst;
  if (!c.recheck_ok) {
    c.feasible = false;
    c.message = "independent LMI re-check failed";
  }
  return c;
}

}  // namespace tvcert::cert
