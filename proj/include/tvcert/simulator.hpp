#pragma once

#include "tvcert/catalog.hpp"
#include "tvcert/certifier.hpp"
#include "tvcert/lpv.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tvcert::sim {

using lpv::MatrixXd;
using lpv::VectorXd;

enum class PathKind { Sinusoid, RandomWalk, Constant };
PathKind path_from_string(const std::string& s);
const char* to_string(PathKind k);

struct QuadraticSpec {
  int d = 2;
  int horizon = 500;
  unsigned seed = 1;
  PathKind path = PathKind::Sinusoid;
  double center_amp = 1.0;     // |b_k^j| <= center_amp
  double center_freq = 0.05;   // rad per step
  double rate_scale = 1.0;     // > 1 drives theta faster than the rate bound
  std::optional<double> theta_const;      // constant path value (default: domain hi)
  bool drift_on_constant = false;         // constant path keeps b_k moving (constant sectors, moving target)
  std::optional<std::pair<double, double>> box;  // feasible set [lo, hi]^d for cone channels
};

/// f_k(x) = 1/2 (x - b_k)' H_k (x - b_k), H_k = diag(h_k), with
/// h_k(0) = L(theta_k), h_k(1) = m(theta_k), remaining entries interpolated.
/// With a box, x*_k is the projection of b_k and f*_k = f_k(x*_k).
class TvProblem {
 public:
  int d = 1;
  int N = 0;  // steps; theta, b and h are stored for k = 0..N+1
  lpv::ParamDomain domain;
  catalog::SectorSchedule sched;
  std::vector<double> theta;
  std::vector<VectorXd> b, h;
  std::optional<std::pair<double, double>> box;

  double f(const VectorXd& x, int k) const;
  VectorXd grad(const VectorXd& x, int k) const;
  VectorXd x_star(int k) const;
  double f_star(int k) const;
  double f_hat(const VectorXd& x, int k) const { return f(x, k) - f_star(k); }
  VectorXd delta_grad(const VectorXd& x, int k) const { return grad(x, k) - grad(x, k + 1); }
  double sector_gap(int k) const;  // L(theta_k) - m(theta_k)
  VectorXd project(const VectorXd& v) const;
};

TvProblem make_varying_quadratic(const lpv::ParamDomain& domain, const catalog::SectorSchedule& sched,
                                 const QuadraticSpec& spec);

struct Step {
  double theta = 0;
  MatrixXd xi, xi_star;           // n_xi x d
  std::vector<VectorXd> s, u;     // per channel
  VectorXd x, xstar;
  double err = 0, err_xi = 0;
  // variational measures at step k
  VectorXd dxstar;                // x*_k - x*_{k+1}
  MatrixXd dxi_star;              // xi*_k - xi*_{k+1}
  std::vector<VectorXd> ddelta;   // grad_k(s^i_k) - grad_{k+1}(s^i_k), gradient channels
  std::vector<double> fvar;       // (L-m)_k fhat_k(s^i_{k-1}) - (L-m)_{k-1} fhat_{k-1}(s^i_{k-1}); 0 at k = 0
};

struct Trajectory {
  std::string algorithm;
  int n_xi = 0, p = 0, q = 0, d = 0;
  MatrixXd U;
  std::vector<Step> steps;  // k = 0..N
  double fixed_point_residual = 0;  // max ||xi*_k - A(theta_k) xi*_k - B u*_k||
};

/// Steps the interconnection for N steps from xi0 (n_xi x d).
Trajectory simulate(const lpv::LpvSystem& sys, const TvProblem& prob, const MatrixXd& xi0, int N);

struct BoundReport {
  bool pass = false;
  bool in_spec = true;
  double max_ratio = 0;
  int worst_k = 0;
  std::vector<double> rhs;  // norm-valued bound per step
  std::string note;
};

BoundReport check_bound_thm1(const Trajectory& tr, const cert::Certificate& c, const TvProblem& prob);
BoundReport check_bound_thm2(const Trajectory& tr, const cert::Certificate& c, const TvProblem& prob);
BoundReport check_bound(const Trajectory& tr, const cert::Certificate& c, const TvProblem& prob);

/// Function-variation part of the squared variational bound written with
/// gamma_f (constant sectors); equals the lambda-weighted form when L - m is
/// constant along the path.
std::vector<double> fvar_sum_lambda_form(const Trajectory& tr, const cert::Certificate& c);
std::vector<double> fvar_sum_gamma_form(const Trajectory& tr, const cert::Certificate& c);

struct Sigmas {
  double xi = 0, delta = 0, f = 0, fstar = 0;
};
Sigmas empirical_sigmas(const Trajectory& tr, const TvProblem& prob);
double asymptotic_radius(const cert::Certificate& c, const Sigmas& s);

extern const char* const kTrajectoryHeader;
void write_trajectory_csv(const Trajectory& tr, const BoundReport& rep, std::ostream& os);

/// Rebuild the certified system from a certificate.
lpv::LpvSystem system_of(const cert::Certificate& c, const catalog::AogdParams& aogd = {});
/// True when the problem's parameter path is admissible for the certificate.
bool path_in_spec(const TvProblem& prob, const cert::Certificate& c, double tol = 1e-12);

struct ValidationSpec {
  int runs = 100;
  int horizon = 500;
  int d = 2;
  unsigned seed = 1;
  PathKind path = PathKind::Sinusoid;
  double init_scale = 1.0;
  int jobs = 0;
};

struct ValidationResult {
  int runs = 0, passed = 0;
  double worst_ratio = 0;
};

/// Seeded in-spec simulations checked against the certificate's bound.
ValidationResult validate_certificate(const cert::Certificate& c, const ValidationSpec& v);

}  // namespace tvcert::sim
