#include "tvcert/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace tvcert::conic {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

int svec_dim(int n) { return n * (n + 1) / 2; }

int smat_dim(int len) {
  int n = static_cast<int>(std::lround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  if (svec_dim(n) != len) throw std::invalid_argument("smat: length is not triangular");
  return n;
}

VectorXd svec(const MatrixXd& S, double sym_tol) {
  if (S.rows() != S.cols()) throw std::invalid_argument("svec: matrix not square");
  const int n = static_cast<int>(S.rows());
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
    throw std::invalid_argument("svec: matrix not symmetric");
  VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) v(k++) = (i == j) ? S(i, j) : kSqrt2 * 0.5 * (S(i, j) + S(j, i));
  return v;
}

MatrixXd smat(const VectorXd& v) {
  const int n = smat_dim(static_cast<int>(v.size()));
  MatrixXd S(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) {
      double val = (i == j) ? v(k) : v(k) / kSqrt2;
      S(i, j) = val;
      S(j, i) = val;
      ++k;
    }
  return S;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    default: return "unknown";
  }
}

bool ConicProblem::is_feasibility() const {
  return objective.size() == 0 || objective.cwiseAbs().maxCoeff() == 0.0;
}

void ConicProblem::validate() const {
  if (n_vars < 0) throw std::invalid_argument("negative variable count");
  if (objective.size() != 0 && objective.size() != n_vars)
    throw std::invalid_argument("objective length does not match n_vars");
  for (size_t c = 0; c < constraints.size(); ++c) {
    const auto& con = constraints[c];
    const int len = con.cone.storage();
    if (con.cone.dim <= 0) throw std::invalid_argument("constraint " + std::to_string(c) + ": empty cone");
    if (con.constant.size() != len)
      throw std::invalid_argument("constraint " + std::to_string(c) + ": constant has wrong length");
    for (const auto& [var, coef] : con.terms) {
      if (var < 0 || var >= n_vars)
        throw std::invalid_argument("constraint " + std::to_string(c) + ": variable index out of range");
      if (coef.size() != len)
        throw std::invalid_argument("constraint " + std::to_string(c) + ": coefficient has wrong length");
    }
  }
}

namespace {

// Dense working copy of one cone. Psd blocks keep full matrices, Nonneg
// blocks keep vectors.
struct Block {
  bool psd = true;
  bool strict = true;
  int n = 0;
  MatrixXd F0;
  VectorXd f0;
  std::vector<int> vars;
  std::vector<MatrixXd> F;
  std::vector<VectorXd> f;
};

double block_scale(const Constraint& c) {
  double s = c.constant.cwiseAbs().maxCoeff();
  for (const auto& [v, coef] : c.terms) s = std::max(s, coef.cwiseAbs().maxCoeff());
  return s > 0 ? s : 1.0;
}

Block make_block(const Constraint& c, double scale) {
  Block b;
  b.psd = c.cone.kind == Cone::Kind::Psd;
  b.strict = c.strict;
  b.n = c.cone.dim;
  for (const auto& [v, coef] : c.terms) {
    if (coef.cwiseAbs().maxCoeff() == 0.0) continue;
    b.vars.push_back(v);
    if (b.psd)
      b.F.push_back(smat(coef) / scale);
    else
      b.f.push_back(coef / scale);
  }
  if (b.psd)
    b.F0 = smat(c.constant) / scale;
  else
    b.f0 = c.constant / scale;
  return b;
}

MatrixXd eval_psd(const Block& b, const VectorXd& x) {
  MatrixXd S = b.F0;
  for (size_t k = 0; k < b.vars.size(); ++k) S += x(b.vars[k]) * b.F[k];
  return S;
}

VectorXd eval_lp(const Block& b, const VectorXd& x) {
  VectorXd s = b.f0;
  for (size_t k = 0; k < b.vars.size(); ++k) s += x(b.vars[k]) * b.f[k];
  return s;
}

double min_eig(const MatrixXd& S) {
  if (S.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Largest alpha in (0, inf] keeping X + alpha dX positive semidefinite,
// given the Cholesky factor L of X.
double max_step_psd(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dX) {
  MatrixXd T = llt.matrixL().solve(dX);
  T = llt.matrixL().solve(MatrixXd(T.transpose()));
  T = 0.5 * (T + T.transpose());
  double lmin = min_eig(T);
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const VectorXd& s, const VectorXd& ds) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.size(); ++i)
    if (ds(i) < 0) a = std::min(a, -s(i) / ds(i));
  return a;
}

struct IpmState {
  VectorXd x;
  std::vector<MatrixXd> S, Z;    // psd blocks (empty for lp)
  std::vector<VectorXd> s, z;    // lp blocks
  double pobj = 0, dobj = 0, mu = 0;
  VectorXd rp;                   // c - A^*(Z)
  double rd_norm = 0;
};

enum class Early { Continue, Stop };
using EarlyFn = std::function<Early(const IpmState&)>;

struct IpmResult {
  IpmState state;
  IpmState best;                 // iterate with the smallest max(pinf, dinf, rgap)
  double best_merit = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool failed = false;
  int iters = 0;
};

// Infeasible-start primal-dual path following with the HKM direction and
// Mehrotra predictor-corrector on
//   min c'x  s.t.  F_b(x) in cone_b,
// dual  max -sum <F_b0, Z_b>  s.t.  sum_b <F_bi, Z_b> = c_i, Z_b in cone_b.
IpmResult ipm(const std::vector<Block>& blocks, const VectorXd& c, const VectorXd& x0,
              const SolverOptions& opt, const EarlyFn& early) {
  const int m = static_cast<int>(c.size());
  const size_t nb = blocks.size();
  IpmResult res;
  IpmState& st = res.state;
  st.x = x0;
  st.S.resize(nb);
  st.Z.resize(nb);
  st.s.resize(nb);
  st.z.resize(nb);

  int ntot = 0;
  double f0norm = 0;
  for (size_t b = 0; b < nb; ++b) {
    const Block& B = blocks[b];
    ntot += B.n;
    if (B.psd) {
      MatrixXd Fx = eval_psd(B, st.x);
      double lm = min_eig(Fx);
      st.S[b] = lm > 1e-8 ? Fx : MatrixXd(Fx + (1.0 - lm) * MatrixXd::Identity(B.n, B.n));
      st.Z[b] = MatrixXd::Identity(B.n, B.n);
      f0norm = std::max(f0norm, B.F0.cwiseAbs().maxCoeff());
    } else {
      VectorXd fx = eval_lp(B, st.x);
      double lm = fx.minCoeff();
      st.s[b] = lm > 1e-8 ? fx : VectorXd(fx.array() + (1.0 - lm));
      st.z[b] = VectorXd::Ones(B.n);
      f0norm = std::max(f0norm, B.f0.cwiseAbs().maxCoeff());
    }
  }
  const double cnorm = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;

  std::vector<MatrixXd> Rd(nb), dS(nb), dZ(nb), dSa(nb), dZa(nb);
  std::vector<VectorXd> rd(nb), ds(nb), dz(nb), dsa(nb), dza(nb);
  std::vector<Eigen::LLT<MatrixXd>> lltS(nb), lltZ(nb);
  std::vector<MatrixXd> Sinv(nb);

  for (int it = 0; it <= opt.max_iter; ++it) {
    res.iters = it;
    // residuals and objectives
    st.rp = c;
    st.dobj = 0;
    double gap = 0, rdn = 0;
    for (size_t b = 0; b < nb; ++b) {
      const Block& B = blocks[b];
      if (B.psd) {
        Rd[b] = eval_psd(B, st.x) - st.S[b];
        rdn = std::max(rdn, Rd[b].cwiseAbs().maxCoeff());
        for (size_t k = 0; k < B.vars.size(); ++k)
          st.rp(B.vars[k]) -= B.F[k].cwiseProduct(st.Z[b]).sum();
        st.dobj -= B.F0.cwiseProduct(st.Z[b]).sum();
        gap += st.S[b].cwiseProduct(st.Z[b]).sum();
      } else {
        rd[b] = eval_lp(B, st.x) - st.s[b];
        if (B.n) rdn = std::max(rdn, rd[b].cwiseAbs().maxCoeff());
        for (size_t k = 0; k < B.vars.size(); ++k) st.rp(B.vars[k]) -= B.f[k].dot(st.z[b]);
        st.dobj -= B.f0.dot(st.z[b]);
        gap += st.s[b].dot(st.z[b]);
      }
    }
    st.pobj = c.dot(st.x);
    st.mu = gap / std::max(1, ntot);
    st.rd_norm = rdn;
    const double pinf = rdn / (1.0 + f0norm);
    const double dinf = (m ? st.rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + cnorm);
    const double rgap = std::abs(st.pobj - st.dobj) / (1.0 + std::abs(st.pobj) + std::abs(st.dobj));
    const double rmu = gap / (1.0 + std::abs(st.pobj) + std::abs(st.dobj));
    if (opt.verbose)
      std::cerr << "ipm " << it << " pobj " << st.pobj << " dobj " << st.dobj << " pinf " << pinf
                << " dinf " << dinf << " mu " << st.mu << "\n";
    if (early && early(st) == Early::Stop) return res;
    if (const double merit = std::max({pinf, dinf, rgap}); merit < res.best_merit) {
      res.best_merit = merit;
      res.best = st;
    }
    if (pinf < opt.gap_tol && dinf < opt.gap_tol && rgap < opt.gap_tol && rmu < opt.gap_tol) {
      res.converged = true;
      return res;
    }
    if (it == opt.max_iter) break;

    // factorizations and Schur complement
    MatrixXd M = MatrixXd::Zero(m, m);
    bool ok = true;
    for (size_t b = 0; b < nb && ok; ++b) {
      const Block& B = blocks[b];
      if (B.psd) {
        lltS[b].compute(st.S[b]);
        lltZ[b].compute(st.Z[b]);
        if (lltS[b].info() != Eigen::Success || lltZ[b].info() != Eigen::Success) {
          if (opt.verbose)
            std::cerr << "ipm: block " << b << " min eig S " << min_eig(st.S[b]) << " Z " << min_eig(st.Z[b]) << "\n";
          ok = false;
          break;
        }
        Sinv[b] = lltS[b].solve(MatrixXd::Identity(B.n, B.n));
        const int nv = static_cast<int>(B.vars.size());
        if (nv == 0) continue;
        MatrixXd Lz = lltZ[b].matrixL();
        MatrixXd W(B.n * B.n, nv);
        for (int k = 0; k < nv; ++k) {
          MatrixXd T = lltS[b].matrixL().solve(B.F[k] * Lz);
          W.col(k) = Eigen::Map<VectorXd>(T.data(), T.size());
        }
        MatrixXd G = W.transpose() * W;
        for (int a = 0; a < nv; ++a)
          for (int k = 0; k < nv; ++k) M(B.vars[a], B.vars[k]) += G(a, k);
      } else {
        if (B.n == 0) continue;
        VectorXd w = st.z[b].cwiseQuotient(st.s[b]);
        const int nv = static_cast<int>(B.vars.size());
        for (int a = 0; a < nv; ++a) {
          VectorXd fa = B.f[a].cwiseProduct(w);
          for (int k = a; k < nv; ++k) {
            double v = fa.dot(B.f[k]);
            M(B.vars[a], B.vars[k]) += v;
            if (k != a) M(B.vars[k], B.vars[a]) += v;
          }
        }
      }
    }
    if (!ok) {
      if (opt.verbose) std::cerr << "ipm: lost definiteness of a cone iterate\n";
      res.failed = true;
      return res;
    }
    M = 0.5 * (M + M.transpose());
    Eigen::LLT<MatrixXd> lltM(M);
    Eigen::LDLT<MatrixXd> ldltM;
    bool use_llt = lltM.info() == Eigen::Success;
    if (!use_llt) {
      double reg = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      ldltM.compute(M + reg * MatrixXd::Identity(m, m));
      if (ldltM.info() != Eigen::Success) {
        if (opt.verbose) std::cerr << "ipm: Schur complement factorization failed\n";
        res.failed = true;
        return res;
      }
    }
    auto solveM = [&](const VectorXd& r) -> VectorXd {
      if (use_llt) return lltM.solve(r);
      return ldltM.solve(r);
    };

    // Newton direction for complementarity target S Z = sigma mu I - corr.
    auto direction = [&](double sigma_mu, bool corr, std::vector<MatrixXd>& oS, std::vector<MatrixXd>& oZ,
                         std::vector<VectorXd>& os, std::vector<VectorXd>& oz) {
      VectorXd rhs = -st.rp;
      std::vector<MatrixXd> Rc(nb);
      std::vector<VectorXd> rc(nb);
      for (size_t b = 0; b < nb; ++b) {
        const Block& B = blocks[b];
        if (B.psd) {
          Rc[b] = sigma_mu * MatrixXd::Identity(B.n, B.n) - st.S[b] * st.Z[b];
          if (corr) Rc[b] -= dSa[b] * dZa[b];
          MatrixXd T = Sinv[b] * (Rc[b] - Rd[b] * st.Z[b]);
          for (size_t k = 0; k < B.vars.size(); ++k) rhs(B.vars[k]) += B.F[k].cwiseProduct(T).sum();
        } else {
          rc[b] = VectorXd::Constant(B.n, sigma_mu) - st.s[b].cwiseProduct(st.z[b]);
          if (corr) rc[b] -= dsa[b].cwiseProduct(dza[b]);
          VectorXd T = (rc[b] - rd[b].cwiseProduct(st.z[b])).cwiseQuotient(st.s[b]);
          for (size_t k = 0; k < B.vars.size(); ++k) rhs(B.vars[k]) += B.f[k].dot(T);
        }
      }
      VectorXd dx = solveM(rhs);
      for (size_t b = 0; b < nb; ++b) {
        const Block& B = blocks[b];
        if (B.psd) {
          MatrixXd d = Rd[b];
          for (size_t k = 0; k < B.vars.size(); ++k) d += dx(B.vars[k]) * B.F[k];
          oS[b] = d;
          MatrixXd t = Sinv[b] * (Rc[b] - d * st.Z[b]);
          oZ[b] = 0.5 * (t + t.transpose());
        } else {
          VectorXd d = rd[b];
          for (size_t k = 0; k < B.vars.size(); ++k) d += dx(B.vars[k]) * B.f[k];
          os[b] = d;
          oz[b] = (rc[b] - d.cwiseProduct(st.z[b])).cwiseQuotient(st.s[b]);
        }
      }
      return dx;
    };
    auto steps = [&](const std::vector<MatrixXd>& vS, const std::vector<MatrixXd>& vZ,
                     const std::vector<VectorXd>& vs, const std::vector<VectorXd>& vz) {
      double ap = std::numeric_limits<double>::infinity(), ad = ap;
      for (size_t b = 0; b < nb; ++b) {
        if (blocks[b].psd) {
          ap = std::min(ap, max_step_psd(lltS[b], vS[b]));
          ad = std::min(ad, max_step_psd(lltZ[b], vZ[b]));
        } else if (blocks[b].n) {
          ap = std::min(ap, max_step_lp(st.s[b], vs[b]));
          ad = std::min(ad, max_step_lp(st.z[b], vz[b]));
        }
      }
      return std::pair<double, double>(ap, ad);
    };

    // predictor
    VectorXd dxa = direction(0.0, false, dSa, dZa, dsa, dza);
    auto [apa, ada] = steps(dSa, dZa, dsa, dza);
    apa = std::min(1.0, apa);
    ada = std::min(1.0, ada);
    double gap_aff = 0;
    for (size_t b = 0; b < nb; ++b) {
      if (blocks[b].psd)
        gap_aff += (st.S[b] + apa * dSa[b]).cwiseProduct(st.Z[b] + ada * dZa[b]).sum();
      else
        gap_aff += (st.s[b] + apa * dsa[b]).dot(st.z[b] + ada * dza[b]);
    }
    double sigma = std::pow(std::max(0.0, gap_aff / std::max(gap, 1e-300)), 3);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // corrector
    VectorXd dx = direction(sigma * st.mu, true, dS, dZ, ds, dz);
    auto [ap, ad] = steps(dS, dZ, ds, dz);
    const double tau = 0.95;
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    st.x += ap * dx;
    for (size_t b = 0; b < nb; ++b) {
      if (blocks[b].psd) {
        st.S[b] += ap * dS[b];
        st.Z[b] += ad * dZ[b];
        st.S[b] = 0.5 * (st.S[b] + st.S[b].transpose());
        st.Z[b] = 0.5 * (st.Z[b] + st.Z[b].transpose());
      } else {
        st.s[b] += ap * ds[b];
        st.z[b] += ad * dz[b];
      }
    }
    if (!st.x.allFinite()) {
      res.failed = true;
      return res;
    }
  }
  return res;
}

struct Prepared {
  std::vector<Block> blocks;
  std::vector<double> scales;
};

Prepared prepare(const ConicProblem& p, bool scale) {
  Prepared pr;
  for (const auto& c : p.constraints) {
    double s = scale ? block_scale(c) : 1.0;
    pr.scales.push_back(s);
    pr.blocks.push_back(make_block(c, s));
  }
  return pr;
}

// Phase I: max t s.t. F_b(x) - t I in cone_b (strict b), F_b(x) in cone_b
// (loose b), |x_i| <= box, t <= 1.
// Returns (x, t, decided-infeasible).
struct PhaseOne {
  VectorXd x;
  double t = -std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool infeasible = false;
  int iters = 0;
};

PhaseOne phase_one(const ConicProblem& p, const Prepared& pr, const SolverOptions& opt) {
  const int n = p.n_vars;
  PhaseOne out;
  out.x = VectorXd::Zero(n);

  double lmin0 = std::numeric_limits<double>::infinity();
  for (const auto& B : pr.blocks)
    if (B.strict) lmin0 = std::min(lmin0, B.psd ? min_eig(B.F0) : (B.n ? B.f0.minCoeff() : lmin0));
  if (max_violation(p, out.x) <= 0.0) {
    out.feasible = true;
    out.t = lmin0;
    return out;
  }

  std::vector<Block> blocks = pr.blocks;
  const int tvar = n;
  for (auto& B : blocks) {
    if (!B.strict) continue;
    B.vars.push_back(tvar);
    if (B.psd)
      B.F.push_back(-MatrixXd::Identity(B.n, B.n));
    else
      B.f.push_back(-VectorXd::Ones(B.n));
  }
  Block box;
  box.psd = false;
  box.n = 2 * n + 1;
  box.f0 = VectorXd::Constant(box.n, opt.box);
  box.f0(2 * n) = 1.0;
  for (int i = 0; i < n; ++i) {
    VectorXd f = VectorXd::Zero(box.n);
    f(2 * i) = -1.0;
    f(2 * i + 1) = 1.0;
    box.vars.push_back(i);
    box.f.push_back(f);
  }
  {
    VectorXd f = VectorXd::Zero(box.n);
    f(2 * n) = -1.0;
    box.vars.push_back(tvar);
    box.f.push_back(f);
  }
  blocks.push_back(box);

  VectorXd c = VectorXd::Zero(n + 1);
  c(tvar) = -1.0;
  VectorXd x0 = VectorXd::Zero(n + 1);
  x0(tvar) = std::min(lmin0, 0.0) - 1.0;

  const double infeas_margin = 1e-9;
  auto early = [&](const IpmState& st) {
    const double t = st.x(tvar);
    if (t >= 0.0 && st.rd_norm < 1e-9) {
      VectorXd x = st.x.head(n);
      if (max_violation(p, x) <= opt.feas_tol) {
        out.feasible = true;
        return Early::Stop;
      }
    }
    // Weak-duality upper bound on the optimal margin.
    double ub = -st.dobj;
    for (int i = 0; i < n; ++i) ub += opt.box * std::abs(st.rp(i));
    ub += std::abs(st.rp(tvar)) * std::max(1.0, std::abs(t));
    if (st.rd_norm < 1e-9 && ub < -infeas_margin) {
      out.infeasible = true;
      return Early::Stop;
    }
    return Early::Continue;
  };
  IpmResult r = ipm(blocks, c, x0, opt, early);
  out.iters = r.iters;
  out.x = r.state.x.head(n);
  out.t = r.state.x(tvar);
  if (out.feasible || out.infeasible) return out;
  if (max_violation(p, out.x) <= opt.feas_tol) {
    out.feasible = true;
  } else if (r.converged && out.t < 0) {
    out.infeasible = true;
  }
  return out;
}

}  // namespace

std::vector<double> constraint_min_eigs(const ConicProblem& p, const VectorXd& x) {
  std::vector<double> out;
  out.reserve(p.constraints.size());
  for (const auto& c : p.constraints) {
    VectorXd v = c.constant;
    for (const auto& [var, coef] : c.terms) v += x(var) * coef;
    if (c.cone.kind == Cone::Kind::Psd)
      out.push_back(min_eig(smat(v)));
    else
      out.push_back(v.minCoeff());
  }
  return out;
}

double max_violation(const ConicProblem& p, const VectorXd& x) {
  double viol = 0.0;
  for (double e : constraint_min_eigs(p, x)) viol = std::max(viol, -e);
  return viol;
}

ConicSolution solve(const ConicProblem& p, const SolverOptions& opt) {
  p.validate();
  ConicSolution sol;
  Prepared pr = prepare(p, opt.scale_blocks);

  PhaseOne p1 = phase_one(p, pr, opt);
  sol.iterations = p1.iters;
  sol.margin = p1.t;
  sol.x = p1.x;
  sol.max_violation = max_violation(p, p1.x);
  if (!p1.feasible) {
    sol.status = p1.infeasible ? Status::Infeasible : Status::Unknown;
    return sol;
  }
  if (p.is_feasibility()) {
    sol.status = sol.max_violation <= 10 * opt.feas_tol ? Status::Optimal : Status::Unknown;
    return sol;
  }

  // Phase II from the strictly feasible phase-I point, inside the same box.
  std::vector<Block> blocks = pr.blocks;
  const int n = p.n_vars;
  Block box;
  box.psd = false;
  box.n = 2 * n;
  box.f0 = VectorXd::Constant(box.n, opt.box);
  for (int i = 0; i < n; ++i) {
    VectorXd f = VectorXd::Zero(box.n);
    f(2 * i) = -1.0;
    f(2 * i + 1) = 1.0;
    box.vars.push_back(i);
    box.f.push_back(f);
  }
  if (n > 0) blocks.push_back(box);
  IpmResult r = ipm(blocks, p.objective, p1.x, opt, nullptr);
  sol.iterations += r.iters;
  // near the boundary the Schur complement degrades and late iterates can drift; fall back to the best one
  if (!r.converged && r.best_merit < std::numeric_limits<double>::infinity()) r.state = r.best;
  VectorXd x2 = r.state.x;
  double v2 = max_violation(p, x2);
  // a stalled phase II still leaves a strictly feasible iterate; keep it but never call it optimal
  if (v2 <= 10 * opt.feas_tol) {
    sol.x = x2;
    sol.max_violation = v2;
    sol.objective_value = p.objective.dot(x2);
    sol.rel_gap = std::abs(r.state.pobj - r.state.dobj) /
                  (1.0 + std::abs(r.state.pobj) + std::abs(r.state.dobj));
    sol.status = r.converged && !r.failed ? Status::Optimal : Status::Unknown;
  } else {
    sol.objective_value = p.objective.dot(sol.x);
    sol.status = Status::Unknown;
  }
  return sol;
}

}  // namespace tvcert::conic
