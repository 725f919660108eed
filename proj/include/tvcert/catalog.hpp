#pragma once

#include "tvcert/lpv.hpp"

#include <string>

namespace tvcert::catalog {

using lpv::LpvSystem;
using lpv::MatrixFn;
using lpv::VectorXd;

/// Sector bounds m(theta) <= curvature <= L(theta), scalar-valued.
struct SectorSchedule {
  MatrixFn m, L;

  /// m constant, L(theta) = theta_0 (the smoothness parameter is scheduled).
  static SectorSchedule smoothness_scheduled(double m);
  static SectorSchedule constant(double m, double L);

  double m_at(const VectorXd& theta) const { return m(theta)(0, 0); }
  double L_at(const VectorXd& theta) const { return L(theta)(0, 0); }
  double kappa(const VectorXd& theta) const { return L_at(theta) / m_at(theta); }
  double m_at(double th) const { return m_at(VectorXd::Constant(1, th)); }
  double L_at(double th) const { return L_at(VectorXd::Constant(1, th)); }

  /// Throws unless 0 < m < L < inf at every node.
  void validate(const lpv::ConsistentGrid& grid) const;
};

struct StepRule {
  enum class Kind { TwoOverMPlusL, OneOverL, Constant };
  Kind kind = Kind::TwoOverMPlusL;
  double value = 0.0;

  static StepRule two_over_m_plus_L() { return {Kind::TwoOverMPlusL, 0.0}; }
  static StepRule one_over_L() { return {Kind::OneOverL, 0.0}; }
  static StepRule constant(double c) { return {Kind::Constant, c}; }
  double alpha(double m, double L) const;
};

LpvSystem make_gd(const SectorSchedule& sched, StepRule rule = StepRule::two_over_m_plus_L());
LpvSystem make_multistep_gd(const SectorSchedule& sched, int m_steps,
                            StepRule rule = StepRule::two_over_m_plus_L());
/// kappa(theta) > 1 is required; checked by validate_kappa on a grid.
LpvSystem make_nesterov(const SectorSchedule& sched);
LpvSystem make_triple_momentum(const SectorSchedule& sched);
/// Euclidean accelerated online gradient method (p = 1, q = 2).
LpvSystem make_accelerated_ogd(double tau, double alpha, double gamma);

/// Scheduled tuning values, exposed for tests.
struct Tuning {
  double alpha = 0, beta = 0, gamma = 0;
};
Tuning nesterov_tuning(double m, double L);
Tuning triple_momentum_tuning(double m, double L);

/// Rejects kappa <= 1 at any node (Nesterov / triple momentum precondition).
void validate_kappa(const SectorSchedule& sched, const lpv::ConsistentGrid& grid);

struct AogdParams {
  double tau = 0.5;
  double alpha = 0.0;  // 0 -> 1/L_nom
  double gamma = 0.0;  // 0 -> 1/L_nom
};

/// Catalog lookup by CLI identifier: gd, gd-m<k>, nesterov, tmm, aogd.
/// Throws std::invalid_argument for unknown ids.
LpvSystem by_name(const std::string& id, const SectorSchedule& sched, double L_nom = 1.0,
                  const AogdParams& aogd = {});
bool is_known(const std::string& id);

}  // namespace tvcert::catalog
