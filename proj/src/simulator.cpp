#include "tvcert/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace tvcert::sim {

PathKind path_from_string(const std::string& s) {
  if (s == "sinusoid") return PathKind::Sinusoid;
  if (s == "random_walk") return PathKind::RandomWalk;
  if (s == "constant") return PathKind::Constant;
  throw std::invalid_argument("unknown path kind '" + s + "' (expected sinusoid, random_walk or constant)");
}

const char* to_string(PathKind k) {
  switch (k) {
    case PathKind::Sinusoid: return "sinusoid";
    case PathKind::RandomWalk: return "random_walk";
    default: return "constant";
  }
}

double TvProblem::f(const VectorXd& x, int k) const {
  VectorXd e = x - b.at(k);
  return 0.5 * e.dot(h.at(k).cwiseProduct(e));
}

VectorXd TvProblem::grad(const VectorXd& x, int k) const { return h.at(k).cwiseProduct(x - b.at(k)); }

VectorXd TvProblem::project(const VectorXd& v) const {
  if (!box) return v;
  return v.cwiseMax(box->first).cwiseMin(box->second);
}

VectorXd TvProblem::x_star(int k) const { return project(b.at(k)); }

double TvProblem::f_star(int k) const { return box ? f(x_star(k), k) : 0.0; }

double TvProblem::sector_gap(int k) const {
  VectorXd th = VectorXd::Constant(1, theta.at(k));
  return sched.L_at(th) - sched.m_at(th);
}

TvProblem make_varying_quadratic(const lpv::ParamDomain& domain, const catalog::SectorSchedule& sched,
                                 const QuadraticSpec& spec) {
  domain.validate();
  if (domain.dim() != 1) throw std::invalid_argument("quadratic generator supports scalar theta only");
  if (spec.d < 1) throw std::invalid_argument("dimension must be positive");
  if (spec.horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (!(spec.rate_scale > 0)) throw std::invalid_argument("rate scale must be positive");
  if (!(spec.center_amp >= 0) || !(spec.center_freq >= 0))
    throw std::invalid_argument("center path amplitude and frequency must be nonnegative");
  if (spec.box && !(spec.box->first < spec.box->second)) throw std::invalid_argument("empty box");
  const double lo = domain.lo(0), hi = domain.hi(0);
  if (spec.theta_const && (*spec.theta_const < lo || *spec.theta_const > hi))
    throw std::invalid_argument("constant theta outside the parameter domain");

  TvProblem P;
  P.d = spec.d;
  P.N = spec.horizon;
  P.domain = domain;
  P.sched = sched;
  P.box = spec.box;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  const int len = spec.horizon + 2;
  const double two_pi = 2.0 * M_PI;

  P.theta.resize(len);
  switch (spec.path) {
    case PathKind::Constant: {
      std::fill(P.theta.begin(), P.theta.end(), spec.theta_const.value_or(hi));
      break;
    }
    case PathKind::Sinusoid: {
      // |A sin(w(k+1)+phi) - A sin(wk+phi)| <= A w <= rate bound
      const double A = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      const double nu = std::min(-domain.delta_lo(0), domain.delta_hi(0));
      const double w = spec.rate_scale * nu / A;
      const double phi = two_pi * U01(rng);
      for (int k = 0; k < len; ++k) P.theta[k] = std::clamp(mid + A * std::sin(w * k + phi), lo, hi);
      break;
    }
    case PathKind::RandomWalk: {
      const double a = spec.rate_scale * domain.delta_lo(0), c = spec.rate_scale * domain.delta_hi(0);
      double th = lo + (hi - lo) * U01(rng);
      for (int k = 0; k < len; ++k) {
        P.theta[k] = th;
        th = std::clamp(th + a + (c - a) * U01(rng), lo, hi);
      }
      break;
    }
  }

  // a constant path is a static problem unless the centre drift is requested
  const double freq = spec.path == PathKind::Constant && !spec.drift_on_constant ? 0.0 : spec.center_freq;
  std::vector<double> phase(spec.d);
  for (auto& ph : phase) ph = two_pi * U01(rng);
  P.b.resize(len);
  P.h.resize(len);
  for (int k = 0; k < len; ++k) {
    VectorXd th = VectorXd::Constant(1, P.theta[k]);
    const double m = sched.m_at(th), L = sched.L_at(th);
    VectorXd hk(spec.d), bk(spec.d);
    for (int j = 0; j < spec.d; ++j) {
      if (j == 0)
        hk(j) = L;
      else if (spec.d == 2 || j == 1)
        hk(j) = m;
      else
        hk(j) = m + (L - m) * (j - 1.0) / (spec.d - 1.0);
      bk(j) = spec.center_amp * std::sin(freq * k + phase[j]);
    }
    P.h[k] = hk;
    P.b[k] = bk;
  }
  return P;
}

Trajectory simulate(const lpv::LpvSystem& sys, const TvProblem& prob, const MatrixXd& xi0, int N) {
  if (N < 0 || N > prob.N) throw std::invalid_argument("simulation horizon exceeds the problem horizon");
  const int nx = sys.n_xi, p = sys.p, q = sys.q, nc = sys.channels(), d = prob.d;
  if (xi0.rows() != nx || xi0.cols() != d) throw std::invalid_argument("initial state has the wrong shape");
  if (q > 0 && !prob.box) throw std::invalid_argument("normal-cone channels need a box feasible set");

  Trajectory tr;
  tr.algorithm = sys.name;
  tr.n_xi = nx;
  tr.p = p;
  tr.q = q;
  tr.d = d;

  lpv::ConsistentGrid nodes;
  for (int k = 0; k <= N + 1; ++k) nodes.nodes.push_back({VectorXd::Constant(1, prob.theta[k]), {}});
  lpv::FixedPointReport fp = lpv::check_fixed_point(sys, nodes);
  if (!fp.ok) throw std::invalid_argument("system violates the fixed-point assumption along the path");
  const VectorXd u_fp = fp.U.col(0);
  tr.U = fp.U;

  auto xi_star = [&](int k) { return MatrixXd(u_fp * prob.x_star(k).transpose()); };

  MatrixXd xi = xi0;
  tr.steps.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    lpv::SystemMatrices M = lpv::eval_system(sys, prob.theta[k]);
    Step& st = tr.steps[k];
    st.theta = prob.theta[k];
    st.xi = xi;
    st.xi_star = xi_star(k);
    st.s.resize(nc);
    st.u.resize(nc);
    // sequential channel resolution along the lower-triangular D
    MatrixXd Uk = MatrixXd::Zero(nc, d);
    for (int i = 0; i < nc; ++i) {
      for (int j = i + 1; j < nc; ++j)
        if (M.D(i, j) != 0.0) throw std::invalid_argument("D is not lower triangular; cannot resolve channels");
      VectorXd v = (M.C.row(i) * xi).transpose();
      for (int j = 0; j < i; ++j) v += M.D(i, j) * Uk.row(j).transpose();
      if (i < p) {
        if (M.D(i, i) != 0.0) throw std::invalid_argument("gradient channel with algebraic self-loop");
        st.s[i] = v;
        st.u[i] = prob.grad(v, k);
      } else {
        // y = v + D_ii u with u in N_X(y): y = proj(v), u = (v - y) / (-D_ii)
        if (!(M.D(i, i) < 0.0)) throw std::invalid_argument("normal-cone channel without a resolvent step");
        st.s[i] = prob.project(v);
        st.u[i] = (v - st.s[i]) / (-M.D(i, i));
      }
      Uk.row(i) = st.u[i].transpose();
    }
    st.x = xi.row(0).transpose();
    st.xstar = prob.x_star(k);
    st.err = (st.x - st.xstar).norm();
    st.err_xi = (xi - st.xi_star).norm();

    // fixed point: xi* = A xi* + B u* with u* = (g*, .., g*, -g*, .., -g*)
    VectorXd g = prob.grad(st.xstar, k);
    MatrixXd Us(nc, d);
    for (int i = 0; i < nc; ++i) Us.row(i) = (i < p ? g : VectorXd(-g)).transpose();
    tr.fixed_point_residual =
        std::max(tr.fixed_point_residual, (st.xi_star - M.A * st.xi_star - M.B * Us).cwiseAbs().maxCoeff());

    st.dxstar = prob.x_star(k) - prob.x_star(k + 1);
    st.dxi_star = st.xi_star - xi_star(k + 1);
    for (int i = 0; i < p; ++i) st.ddelta.push_back(prob.delta_grad(st.s[i], k));
    st.fvar.assign(p, 0.0);
    if (k > 0)
      for (int i = 0; i < p; ++i) {
        const VectorXd& sp = tr.steps[k - 1].s[i];
        st.fvar[i] = prob.sector_gap(k) * prob.f_hat(sp, k) - prob.sector_gap(k - 1) * prob.f_hat(sp, k - 1);
      }
    xi = M.A * xi + M.B * Uk;
  }
  return tr;
}

namespace {

void check_match(const Trajectory& tr, const cert::Certificate& c, cert::Theorem th) {
  if (!c.feasible) throw std::invalid_argument("bound check needs a feasible certificate");
  if (c.theorem != th) throw std::invalid_argument("certificate theorem does not match the bound check");
  if (tr.algorithm != c.algorithm || tr.p != c.p || tr.q != c.q)
    throw std::invalid_argument("trajectory and certificate describe different systems");
}

double bound_rho(const cert::Certificate& c) { return c.sens_rho.value_or(c.rho); }

BoundReport finish(const Trajectory& tr, std::vector<double> rhs, bool in_spec) {
  BoundReport r;
  r.in_spec = in_spec;
  r.pass = true;
  // absolute floor: iterates cannot resolve errors below double round-off of |x*| ~ 1
  constexpr double kFloor = 1e-12;
  for (size_t k = 0; k < rhs.size(); ++k) {
    const double ratio = tr.steps[k].err_xi / (rhs[k] + kFloor);
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst_k = static_cast<int>(k);
    }
    if (ratio > 1.0 + 1e-6) r.pass = false;
  }
  r.rhs = std::move(rhs);
  if (!in_spec) r.note = "parameter path violates the certified domain or rate bound";
  return r;
}

}  // namespace

bool path_in_spec(const TvProblem& prob, const cert::Certificate& c, double tol) {
  const int N = static_cast<int>(prob.theta.size()) - 2;
  for (int k = 0; k <= N; ++k) {
    const double th = prob.theta[k];
    if (c.is_static) {
      if (std::abs(th - c.L_nom) > tol * std::max(1.0, c.L_nom)) return false;
      continue;
    }
    if (th < c.domain.lo(0) - tol || th > c.domain.hi(0) + tol) return false;
    if (k < N) {
      const double dt = prob.theta[k + 1] - th;
      if (dt < c.domain.delta_lo(0) - tol || dt > c.domain.delta_hi(0) + tol) return false;
    }
  }
  return true;
}

BoundReport check_bound_thm1(const Trajectory& tr, const cert::Certificate& c, const TvProblem& prob) {
  check_match(tr, c, cert::Theorem::Pointwise);
  const double rho = bound_rho(c);
  const double e0 = tr.steps.front().err_xi;
  std::vector<double> rhs(tr.steps.size());
  double S = 0.0, rk = 1.0;
  for (size_t k = 0; k < tr.steps.size(); ++k) {
    if (k > 0) {
      S = rho * S + tr.steps[k - 1].dxi_star.norm();
      rk *= rho;
    }
    rhs[k] = c.c * (rk * e0 + S);
  }
  return finish(tr, std::move(rhs), path_in_spec(prob, c));
}

std::vector<double> fvar_sum_lambda_form(const Trajectory& tr, const cert::Certificate& c) {
  // F_K = sum_{t=1}^{K-1} rho^{2(K-t)} sum_i lambda_i fvar_t^i
  const double r2 = std::pow(bound_rho(c), 2);
  std::vector<double> F(tr.steps.size(), 0.0);
  for (size_t K = 2; K < tr.steps.size(); ++K) {
    double h = 0.0;
    for (int i = 0; i < tr.p; ++i) h += c.lambda_p(i) * tr.steps[K - 1].fvar[i];
    F[K] = r2 * (F[K - 1] + h);
  }
  return F;
}

std::vector<double> fvar_sum_gamma_form(const Trajectory& tr, const cert::Certificate& c) {
  // sum_{t=1}^{K-1} rho^{2(K-t-1)} sum_i gamma_f^i (fhat_t(s_{t-1}) - fhat_{t-1}(s_{t-1}))
  const double r2 = std::pow(bound_rho(c), 2);
  const double gap = c.L_nom - c.m;
  std::vector<double> F(tr.steps.size(), 0.0);
  for (size_t K = 2; K < tr.steps.size(); ++K) {
    double acc = 0.0;
    for (size_t t = 1; t < K; ++t) {
      double term = 0.0;
      for (int i = 0; i < tr.p; ++i) term += c.gamma_f(i) * tr.steps[t].fvar[i] / gap;
      acc += std::pow(r2, static_cast<double>(K - t - 1)) * term;
    }
    F[K] = acc;
  }
  return F;
}

BoundReport check_bound_thm2(const Trajectory& tr, const cert::Certificate& c, const TvProblem& prob) {
  check_match(tr, c, cert::Theorem::Variational);
  if (tr.q > 0) throw std::invalid_argument("variational bound applies to unconstrained systems only");
  const double rho = bound_rho(c), r2 = rho * rho;
  const double gx = c.gamma_xi.value_or(0.0), gd = c.gamma_delta.value_or(0.0);
  const double e0 = tr.steps.front().err_xi;
  std::vector<double> F = fvar_sum_lambda_form(tr, c);
  std::vector<double> rhs(tr.steps.size());
  double G = 0.0, rk = 1.0;
  for (size_t K = 0; K < tr.steps.size(); ++K) {
    if (K > 0) {
      const Step& s = tr.steps[K - 1];
      double g = gx * s.dxi_star.squaredNorm();
      for (const auto& dd : s.ddelta) g += gd * dd.squaredNorm();
      G = r2 * G + g;
      rk *= r2;
    }
    const double sq = c.c1 * rk * e0 * e0 + c.c2 * (G + F[K]);
    rhs[K] = std::sqrt(std::max(0.0, sq));
  }
  return finish(tr, std::move(rhs), path_in_spec(prob, c));
}

BoundReport check_bound(const Trajectory& tr, const cert::Certificate& c, const TvProblem& prob) {
  return c.theorem == cert::Theorem::Pointwise ? check_bound_thm1(tr, c, prob) : check_bound_thm2(tr, c, prob);
}

Sigmas empirical_sigmas(const Trajectory& tr, const TvProblem& prob) {
  Sigmas s;
  const int N = static_cast<int>(tr.steps.size()) - 1;
  for (int k = 0; k <= N; ++k) {
    const Step& st = tr.steps[k];
    s.xi = std::max(s.xi, st.dxi_star.norm());
    for (const auto& dd : st.ddelta) s.delta = std::max(s.delta, dd.norm());
    if (k > 0) {
      for (int i = 0; i < tr.p; ++i) {
        const VectorXd& sp = tr.steps[k - 1].s[i];
        s.f = std::max(s.f, std::abs(prob.f(sp, k) - prob.f(sp, k - 1)));
      }
      s.fstar = std::max(s.fstar, std::abs(prob.f_star(k) - prob.f_star(k - 1)));
    }
  }
  return s;
}

double asymptotic_radius(const cert::Certificate& c, const Sigmas& s) {
  if (!c.feasible || c.theorem != cert::Theorem::Variational)
    throw std::invalid_argument("asymptotic radius needs a feasible variational certificate");
  const double rho = bound_rho(c);
  if (!(rho < 1.0)) throw std::invalid_argument("asymptotic radius needs rho < 1");
  if (s.xi < 0 || s.delta < 0 || s.f < 0 || s.fstar < 0) throw std::invalid_argument("sigmas must be nonnegative");
  const double gbar_delta = c.p * c.gamma_delta.value_or(0.0);
  const double gbar_f = c.gamma_f.size() ? c.gamma_f.sum() : 0.0;
  const double num = c.gamma_xi.value_or(0.0) * s.xi * s.xi + gbar_delta * s.delta * s.delta + gbar_f * (s.f + s.fstar);
  return std::sqrt(c.c2 * num / (1.0 - rho * rho));
}

const char* const kTrajectoryHeader = "k,theta,x,xstar,err,err_xi,bound_rhs";

void write_trajectory_csv(const Trajectory& tr, const BoundReport& rep, std::ostream& os) {
  os << kTrajectoryHeader << "\n";
  char buf[256];
  for (size_t k = 0; k < tr.steps.size(); ++k) {
    const Step& s = tr.steps[k];
    const double rhs = k < rep.rhs.size() ? rep.rhs[k] : NAN;
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", k, s.theta, s.x(0), s.xstar(0), s.err,
                  s.err_xi, rhs);
    os << buf;
  }
}

lpv::LpvSystem system_of(const cert::Certificate& c, const catalog::AogdParams& aogd) {
  cert::CellSpec cell;
  cell.algorithm = c.algorithm;
  cell.kappa = c.kappa;
  cell.nu_fraction = c.nu_fraction;
  cell.m = c.m;
  cell.aogd = aogd;
  return cert::make_setup(cell).sys;
}

ValidationResult validate_certificate(const cert::Certificate& c, const ValidationSpec& v) {
  if (!c.feasible) throw std::invalid_argument("validation needs a feasible certificate");
  cert::CellSpec cell;
  cell.algorithm = c.algorithm;
  cell.kappa = c.kappa;
  cell.nu_fraction = c.nu_fraction;
  cell.m = c.m;
  cert::Setup setup = cert::make_setup(cell);
  if (setup.sys.q > 0) throw std::invalid_argument("validation covers unconstrained systems");

  ValidationResult res;
  res.runs = v.runs;
  std::vector<double> ratio(v.runs, 0.0);
  std::vector<char> ok(v.runs, 0);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < v.runs; r = next++) {
      QuadraticSpec qs;
      qs.d = v.d;
      qs.horizon = v.horizon;
      qs.seed = v.seed + static_cast<unsigned>(r);
      qs.path = c.is_static ? PathKind::Constant : v.path;
      if (c.is_static) qs.theta_const = c.L_nom;
      TvProblem prob = make_varying_quadratic(c.domain, setup.sched, qs);
      std::mt19937_64 rng(qs.seed * 7919u + 17u);
      std::normal_distribution<double> nd(0.0, v.init_scale);
      lpv::FixedPointReport fp = lpv::check_fixed_point(setup.sys, lpv::static_grid(VectorXd::Constant(1, c.L_nom)));
      MatrixXd xi0 = fp.U.col(0) * prob.x_star(0).transpose();
      for (int i = 0; i < xi0.rows(); ++i)
        for (int j = 0; j < xi0.cols(); ++j) xi0(i, j) += nd(rng);
      Trajectory tr = simulate(setup.sys, prob, xi0, v.horizon);
      BoundReport rep = check_bound(tr, c, prob);
      ratio[r] = rep.max_ratio;
      ok[r] = rep.pass && rep.in_spec;
    }
  };
  int jobs = v.jobs > 0 ? v.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, v.runs));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (int r = 0; r < v.runs; ++r) {
    res.passed += ok[r];
    res.worst_ratio = std::max(res.worst_ratio, ratio[r]);
  }
  return res;
}

}  // namespace tvcert::sim
