#include "tvcert/catalog.hpp"

#include <cmath>
#include <regex>
#include <stdexcept>

namespace tvcert::catalog {

using lpv::MatrixXd;

namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

// phi(theta) = g(m(theta), L(theta)) as a basis function.
template <class G>
lpv::BasisFn sched_fn(const SectorSchedule& s, G g) {
  return [s, g](const VectorXd& th) { return g(s.m_at(th), s.L_at(th)); };
}

}  // namespace

SectorSchedule SectorSchedule::smoothness_scheduled(double m) {
  SectorSchedule s;
  s.m = MatrixFn::constant(scalar(m));
  s.L = MatrixFn(1, 1);
  s.L.add([](const VectorXd& th) { return th(0); }, scalar(1.0));
  return s;
}

SectorSchedule SectorSchedule::constant(double m, double L) {
  return {MatrixFn::constant(scalar(m)), MatrixFn::constant(scalar(L))};
}

void SectorSchedule::validate(const lpv::ConsistentGrid& grid) const {
  for (const auto& nd : grid.nodes) {
    double mv = m_at(nd.theta), Lv = L_at(nd.theta);
    if (!(mv > 0 && mv < Lv && std::isfinite(Lv)))
      throw std::invalid_argument("sector schedule violates 0 < m < L < inf on the grid");
  }
}

double StepRule::alpha(double m, double L) const {
  switch (kind) {
    case Kind::TwoOverMPlusL: return 2.0 / (m + L);
    case Kind::OneOverL: return 1.0 / L;
    default: return value;
  }
}

LpvSystem make_gd(const SectorSchedule& sched, StepRule rule) { return make_multistep_gd(sched, 1, rule); }

LpvSystem make_multistep_gd(const SectorSchedule& sched, int m_steps, StepRule rule) {
  if (m_steps < 1) throw std::invalid_argument("multi-step gradient descent needs m_steps >= 1");
  if (rule.kind == StepRule::Kind::Constant && !(rule.value > 0))
    throw std::invalid_argument("constant step size must be positive");
  const int p = m_steps;
  LpvSystem sys;
  sys.name = p == 1 ? "gd" : "gd-m" + std::to_string(p);
  sys.n_xi = 1;
  sys.p = p;
  sys.q = 0;
  auto alpha = sched_fn(sched, [rule](double m, double L) { return rule.alpha(m, L); });
  sys.A = MatrixFn::constant(scalar(1.0));
  sys.B = MatrixFn(1, p);
  sys.B.add(alpha, -MatrixXd::Ones(1, p));
  sys.C = MatrixFn::constant(MatrixXd::Ones(p, 1));
  MatrixXd Dc = MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < i; ++j) Dc(i, j) = -1.0;
  sys.D = MatrixFn(p, p);
  sys.D.add(alpha, Dc);
  return sys;
}

Tuning nesterov_tuning(double m, double L) {
  double k = L / m;
  return {1.0 / L, (std::sqrt(k) - 1.0) / (std::sqrt(k) + 1.0), 0.0};
}

Tuning triple_momentum_tuning(double m, double L) {
  double r = 1.0 - 1.0 / std::sqrt(L / m);
  return {(1.0 + r) / L, r * r / (2.0 - r), r * r / ((1.0 + r) * (2.0 - r))};
}

namespace {

// Two-state momentum template: A = [[1+b, -b],[1, 0]], B = [-a; 0],
// C = [1+c, -c], D = 0, where c = b (Nesterov) or the third TMM gain.
LpvSystem momentum_system(const SectorSchedule& sched, Tuning (*tune)(double, double), bool nesterov,
                          const std::string& name) {
  LpvSystem sys;
  sys.name = name;
  sys.n_xi = 2;
  sys.p = 1;
  sys.q = 0;
  auto a = sched_fn(sched, [tune](double m, double L) { return tune(m, L).alpha; });
  auto b = sched_fn(sched, [tune](double m, double L) { return tune(m, L).beta; });
  auto c = nesterov ? b : sched_fn(sched, [tune](double m, double L) { return tune(m, L).gamma; });
  MatrixXd A0(2, 2), A1(2, 2);
  A0 << 1, 0, 1, 0;
  A1 << 1, -1, 0, 0;
  sys.A = MatrixFn(2, 2);
  sys.A.add_constant(A0).add(b, A1);
  MatrixXd B1(2, 1);
  B1 << -1, 0;
  sys.B = MatrixFn(2, 1);
  sys.B.add(a, B1);
  MatrixXd C0(1, 2), C1(1, 2);
  C0 << 1, 0;
  C1 << 1, -1;
  sys.C = MatrixFn(1, 2);
  sys.C.add_constant(C0).add(c, C1);
  sys.D = MatrixFn::zero(1, 1);
  return sys;
}

}  // namespace

LpvSystem make_nesterov(const SectorSchedule& sched) {
  return momentum_system(sched, &nesterov_tuning, true, "nesterov");
}

LpvSystem make_triple_momentum(const SectorSchedule& sched) {
  return momentum_system(sched, &triple_momentum_tuning, false, "tmm");
}

LpvSystem make_accelerated_ogd(double tau, double alpha, double gamma) {
  if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("aogd: tau must lie in (0, 1]");
  if (!(alpha > 0) || !(gamma > 0)) throw std::invalid_argument("aogd: step sizes must be positive");
  LpvSystem sys;
  sys.name = "aogd";
  sys.n_xi = 2;
  sys.p = 1;
  sys.q = 2;
  MatrixXd A(2, 2), B(2, 3), C(3, 2), D(3, 3);
  A << tau, 1 - tau, 0, 1;
  B << -gamma, -gamma, 0, -alpha, 0, -alpha;
  C << tau, 1 - tau, tau, 1 - tau, 0, 1;
  D << 0, 0, 0, -gamma, -gamma, 0, -alpha, 0, -alpha;
  sys.A = MatrixFn::constant(A);
  sys.B = MatrixFn::constant(B);
  sys.C = MatrixFn::constant(C);
  sys.D = MatrixFn::constant(D);
  return sys;
}

void validate_kappa(const SectorSchedule& sched, const lpv::ConsistentGrid& grid) {
  for (const auto& nd : grid.nodes)
    if (!(sched.kappa(nd.theta) > 1.0)) throw std::invalid_argument("condition number must exceed 1 on the grid");
}

namespace {
const std::regex kMultistep("gd-m([1-9][0-9]*)");
}

bool is_known(const std::string& id) {
  return id == "gd" || id == "nesterov" || id == "tmm" || id == "aogd" || std::regex_match(id, kMultistep);
}

LpvSystem by_name(const std::string& id, const SectorSchedule& sched, double L_nom, const AogdParams& aogd) {
  std::smatch mt;
  if (id == "gd") return make_gd(sched);
  if (std::regex_match(id, mt, kMultistep)) return make_multistep_gd(sched, std::stoi(mt[1]));
  if (id == "nesterov") return make_nesterov(sched);
  if (id == "tmm") return make_triple_momentum(sched);
  if (id == "aogd") {
    double a = aogd.alpha > 0 ? aogd.alpha : 1.0 / L_nom;
    double g = aogd.gamma > 0 ? aogd.gamma : 1.0 / L_nom;
    return make_accelerated_ogd(aogd.tau, a, g);
  }
  throw std::invalid_argument("unknown algorithm id '" + id + "'");
}

}  // namespace tvcert::catalog
