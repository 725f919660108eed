#include "tvcert/iqc.hpp"

#include <cmath>
#include <stdexcept>

namespace tvcert::iqc {

namespace {

MatrixXd col(std::initializer_list<double> v) {
  MatrixXd c(v.size(), 1);
  int i = 0;
  for (double x : v) c(i++, 0) = x;
  return c;
}

MatrixXd unit_row(int n, int i) {
  MatrixXd e = MatrixXd::Zero(1, n);
  e(0, i) = 1.0;
  return e;
}

MatrixFn empty(int r, int c) { return MatrixFn(r, c); }

}  // namespace

const char* to_string(FilterKind k) {
  switch (k) {
    case FilterKind::Sector: return "sector";
    case FilterKind::Passivity: return "passivity";
    default: return "variational";
  }
}

MatrixXd sector_middle() {
  MatrixXd M(2, 2);
  M << 0, 1, 1, 0;
  return M;
}

MatrixXd variational_middle() {
  MatrixXd M = MatrixXd::Zero(6, 6);
  M(0, 1) = M(1, 0) = 0.5;
  M(2, 2) = 1.0;
  M(3, 3) = -1.0;
  M(4, 4) = 0.5;
  M(5, 5) = -0.5;
  return M;
}

double variational_a(double m, double L) { return std::sqrt(std::max(0.0, m * (L - m) / 2.0)); }

namespace {

IqcFilter static_filter(FilterKind kind, MatrixFn Dy, MatrixFn Du) {
  IqcFilter f;
  f.kind = kind;
  f.n_zeta = 0;
  f.n_out = 2;
  f.A_psi = empty(0, 0);
  f.B_y = f.B_u = f.B_dx = f.B_dd = empty(0, 1);
  f.C_psi = empty(2, 0);
  f.D_y = std::move(Dy);
  f.D_u = std::move(Du);
  f.D_dx = f.D_dd = empty(2, 1);
  f.M = sector_middle();
  f.rhs = RhsKind::Zero;
  return f;
}

}  // namespace

IqcFilter make_sector_iqc(const SectorSchedule& sched) {
  // psi = [L y - u; -m y + u]
  MatrixFn Dy = sched.L.embed(2, 1, 0, 0) + (-1.0 * sched.m).embed(2, 1, 1, 0);
  MatrixFn Du = MatrixFn::constant(col({-1.0, 1.0}));
  return static_filter(FilterKind::Sector, Dy, Du);
}

IqcFilter make_passivity_iqc() {
  return static_filter(FilterKind::Passivity, MatrixFn::constant(col({1.0, 0.0})),
                       MatrixFn::constant(col({0.0, 1.0})));
}

IqcFilter make_variational_iqc(const SectorSchedule& sched, double rho) {
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("variational IQC needs 0 < rho < 1");
  const double r2 = rho * rho;
  auto m = [sched](const VectorXd& th) { return sched.m_at(th); };
  auto L = [sched](const VectorXd& th) { return sched.L_at(th); };
  auto a = [sched](const VectorXd& th) { return variational_a(sched.m_at(th), sched.L_at(th)); };
  auto one = [](const VectorXd&) { return 1.0; };

  IqcFilter f;
  f.kind = FilterKind::Variational;
  f.n_zeta = 4;
  f.n_out = 6;
  f.rhs = RhsKind::FunctionVariation;
  f.uses_dx = f.uses_dd = true;
  f.M = variational_middle();
  f.A_psi = MatrixFn::zero(4, 4);

  // zeta+ = (y + dx, u - dd, -m y + u, a y)
  f.B_y = MatrixFn(4, 1);
  f.B_y.add(one, col({1, 0, 0, 0})).add(m, col({0, 0, -1, 0})).add(a, col({0, 0, 0, 1}));
  f.B_u = MatrixFn::constant(col({0, 1, 1, 0}));
  f.B_dx = MatrixFn::constant(col({1, 0, 0, 0}));
  f.B_dd = MatrixFn::constant(col({0, -1, 0, 0}));

  // psi = (-r2 L z1 + r2 z2 + L y - u, -m y + u, rho z4, a rho z1, rho z3, -m rho z1 + rho z2)
  MatrixXd C0 = MatrixXd::Zero(6, 4), CL = MatrixXd::Zero(6, 4), Ca = MatrixXd::Zero(6, 4),
           Cm = MatrixXd::Zero(6, 4);
  C0(0, 1) = r2;
  C0(2, 3) = rho;
  C0(4, 2) = rho;
  C0(5, 1) = rho;
  CL(0, 0) = -r2;
  Ca(3, 0) = rho;
  Cm(5, 0) = -rho;
  f.C_psi = MatrixFn(6, 4);
  f.C_psi.add(one, C0).add(L, CL).add(a, Ca).add(m, Cm);

  f.D_y = MatrixFn(6, 1);
  f.D_y.add(L, col({1, 0, 0, 0, 0, 0})).add(m, col({0, -1, 0, 0, 0, 0}));
  f.D_u = MatrixFn::constant(col({-1, 1, 0, 0, 0, 0}));
  f.D_dx = MatrixFn::zero(6, 1);
  f.D_dd = MatrixFn::zero(6, 1);
  return f;
}

std::vector<VectorXd> run_filter(const IqcFilter& f, const std::vector<VectorXd>& thetas,
                                 const std::vector<FilterInput>& inputs) {
  if (thetas.size() != inputs.size()) throw std::invalid_argument("run_filter: length mismatch");
  std::vector<VectorXd> out;
  VectorXd z = VectorXd::Zero(f.n_zeta);
  for (size_t k = 0; k < inputs.size(); ++k) {
    const auto& th = thetas[k];
    const auto& in = inputs[k];
    VectorXd psi = f.D_y(th).col(0) * in.y + f.D_u(th).col(0) * in.u + f.D_dx(th).col(0) * in.dx +
                   f.D_dd(th).col(0) * in.dd;
    if (f.n_zeta > 0) {
      psi += f.C_psi(th) * z;
      z = f.A_psi(th) * z + f.B_y(th).col(0) * in.y + f.B_u(th).col(0) * in.u + f.B_dx(th).col(0) * in.dx +
          f.B_dd(th).col(0) * in.dd;
    }
    out.push_back(psi);
  }
  return out;
}

AnalyticBlocks filter_outputs_analytic(const AnalyticWindow& w, double rho) {
  const double r2 = rho * rho;
  const double a = variational_a(w.m, w.L), a_prev = variational_a(w.m_prev, w.L_prev);
  const double shifted = w.x_prev + w.dx_prev;     // x_{k-1} - x*_k
  const double grad_shift = w.grad_prev - w.dd_prev;  // grad f_k(x_{k-1})
  AnalyticBlocks b;
  b.psi1 << w.L * w.x - w.grad - r2 * w.L * shifted + r2 * grad_shift, w.grad - w.m * w.x;
  b.psi2 << rho * a_prev * w.x_prev, rho * a * shifted;
  b.psi3 << rho * (w.grad_prev - w.m_prev * w.x_prev), rho * (grad_shift - w.m * shifted);
  return b;
}

PointwiseOutput augment_pointwise(const LpvSystem& sys, const SectorSchedule& sched) {
  std::vector<Attachment> att;
  for (int i = 0; i < sys.p; ++i) att.push_back({make_sector_iqc(sched), i});
  for (int j = 0; j < sys.q; ++j) att.push_back({make_passivity_iqc(), sys.p + j});
  AugmentedPlant plant = augment(sys, att);
  PointwiseOutput out;
  out.C_hat = plant.C_hat;  // static filters: no filter states, n_eta = n_xi
  out.D_hat = plant.D_hat;
  out.rows = plant.rows;
  return out;
}

AugmentedPlant augment(const LpvSystem& sys, const std::vector<Attachment>& attachments) {
  const int nx = sys.n_xi, nc = sys.channels(), p = sys.p;
  AugmentedPlant g;
  g.n_xi = nx;
  g.n_u = nc;
  g.p = p;
  for (const auto& a : attachments) {
    if (a.channel < 0 || a.channel >= nc) throw std::invalid_argument("augment: attachment channel out of range");
    if (a.channel >= p && (a.filter.uses_dd || a.filter.uses_dx))
      throw std::invalid_argument("augment: variational filters on normal-cone channels are unsupported");
    RowBlock rb;
    rb.kind = a.filter.kind;
    rb.channel = a.channel;
    rb.cone = a.channel >= p;
    rb.first_row = g.n_psi;
    rb.rows = a.filter.n_out;
    rb.first_state = nx + g.n_zeta;
    rb.states = a.filter.n_zeta;
    rb.M = a.filter.M;
    g.rows.push_back(rb);
    g.n_psi += a.filter.n_out;
    g.n_zeta += a.filter.n_zeta;
  }
  g.n_eta = nx + g.n_zeta;
  const int ne = g.n_eta, np = g.n_psi;

  g.A_hat = sys.A.embed(ne, ne, 0, 0);
  g.B_hat = sys.B.embed(ne, nc, 0, 0);
  g.B_dxi = MatrixFn::constant(MatrixXd::Identity(nx, nx)).embed(ne, nx, 0, 0);
  g.B_ddelta = MatrixFn::zero(ne, p);
  g.C_hat = MatrixFn::zero(np, ne);
  g.D_hat = MatrixFn::zero(np, nc);
  g.D_dxi = MatrixFn::zero(np, nx);
  g.D_ddelta = MatrixFn::zero(np, p);

  const MatrixFn C1 = MatrixFn::constant(unit_row(nc, 0)) * sys.C;
  for (size_t k = 0; k < attachments.size(); ++k) {
    const IqcFilter& f = attachments[k].filter;
    const RowBlock& rb = g.rows[k];
    const int i = rb.channel;
    const MatrixFn Ei = MatrixFn::constant(unit_row(nc, i));
    const MatrixFn Ci = Ei * sys.C;
    const MatrixFn Di = Ei * sys.D;
    const int s0 = rb.first_state, r0 = rb.first_row;
    if (f.n_zeta > 0) {
      g.A_hat = g.A_hat + (f.B_y * Ci).embed(ne, ne, s0, 0) + f.A_psi.embed(ne, ne, s0, s0);
      g.B_hat = g.B_hat + (f.B_y * Di).embed(ne, nc, s0, 0) + (f.B_u * Ei).embed(ne, nc, s0, 0);
      if (f.uses_dx) g.B_dxi = g.B_dxi + (f.B_dx * C1).embed(ne, nx, s0, 0);
      if (f.uses_dd) {
        MatrixFn ei = MatrixFn::constant(unit_row(p, i));
        g.B_ddelta = g.B_ddelta + (f.B_dd * ei).embed(ne, p, s0, 0);
      }
      g.C_hat = g.C_hat + f.C_psi.embed(np, ne, r0, s0);
    }
    g.C_hat = g.C_hat + (f.D_y * Ci).embed(np, ne, r0, 0);
    g.D_hat = g.D_hat + (f.D_y * Di).embed(np, nc, r0, 0) + (f.D_u * Ei).embed(np, nc, r0, 0);
    if (f.uses_dx) g.D_dxi = g.D_dxi + (f.D_dx * C1).embed(np, nx, r0, 0);
    if (f.uses_dd) {
      MatrixFn ei = MatrixFn::constant(unit_row(p, i));
      g.D_ddelta = g.D_ddelta + (f.D_dd * ei).embed(np, p, r0, 0);
    }
  }
  return g;
}

AugmentedMatrices eval_plant(const AugmentedPlant& g, const VectorXd& th) {
  return {g.A_hat(th), g.B_hat(th), g.B_dxi(th), g.B_ddelta(th),
          g.C_hat(th), g.D_hat(th), g.D_dxi(th), g.D_ddelta(th)};
}

AugmentedPlant augment_variational(const LpvSystem& sys, const SectorSchedule& sched, double rho,
                                   bool with_sector) {
  if (sys.q >= 1)
    throw std::invalid_argument("variational certification is unsupported for systems with normal-cone channels");
  std::vector<Attachment> att;
  for (int i = 0; i < sys.p; ++i) att.push_back({make_variational_iqc(sched, rho), i});
  if (with_sector)
    for (int i = 0; i < sys.p; ++i) att.push_back({make_sector_iqc(sched), i});
  return augment(sys, att);
}

}  // namespace tvcert::iqc
