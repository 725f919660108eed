#pragma once

#include "tvcert/catalog.hpp"
#include "tvcert/conic.hpp"
#include "tvcert/iqc.hpp"
#include "tvcert/lpv.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tvcert::cert {

using lpv::MatrixXd;
using lpv::VectorXd;

enum class Theorem { Pointwise, Variational };
const char* to_string(Theorem t);
Theorem theorem_from_string(const std::string& s);  // "pointwise" | "variational"

/// P(theta) = P_0 + P_1 phi(theta), phi(theta) = 2 (theta - lo)/(hi - lo) - 1
/// (affine kind), or P(theta) = P_0 (constant kind). Scalar theta.
struct LyapunovParam {
  enum class Kind { Constant, Affine };
  Kind kind = Kind::Affine;
  double lo = 0.0, hi = 1.0;
  int n = 0;
  std::vector<MatrixXd> coeffs;

  static LyapunovParam for_domain(const lpv::ParamDomain& dom, bool is_static, int n);
  int terms() const { return kind == Kind::Constant ? 1 : 2; }
  double phi(int i, double theta) const;
  MatrixXd operator()(double theta) const;
};

struct Weights {
  double k1 = 1.0, k2 = 1.0, k3 = 1.0;
};

struct CertifyOptions {
  Theorem theorem = Theorem::Pointwise;
  int n_nodes = 11;
  int max_refinements = 3;
  int rho_bits = 12;      // bisection lattice 2^-rho_bits
  double eps_P = 1e-6;
  double eps_feas = 1e-7;
  bool with_sector = true;  // extra sector slot per gradient channel (variational)
  std::optional<Weights> weights;  // minimize mode after the bisection
  int sens_lattice_offset = 64;    // minimize mode runs at rho* + offset * 2^-rho_bits
  int offgrid_samples = 50;
  unsigned seed = 1;
  conic::SolverOptions solver;
};

/// Decision-variable layout of an assembled problem.
struct VarMap {
  int n = 0;                // Lyapunov matrix side
  std::vector<int> P;       // first svec index of each P_i block
  std::vector<int> block;   // multiplier variable per row block of the plant
  std::vector<int> lambda_p, lambda_q, lambda_s;  // -1 when absent
  int gamma_xi = -1, gamma_delta = -1, t = -1;
};

struct Assembly {
  conic::ConicProblem problem;
  VarMap vars;
  LyapunovParam basis;  // shape only (coeffs empty)
};

/// Theorem 5.1: pointwise sector / passivity multipliers, constant lambda.
Assembly assemble_thm1(const lpv::LpvSystem& sys, const catalog::SectorSchedule& sched,
                       const lpv::ConsistentGrid& grid, double rho, const LyapunovParam& basis,
                       const CertifyOptions& opt);
/// Theorem 5.2 on an augmented plant; objective t + k1 g_xi + k2 g_delta + k3 sum lambda_p
/// when weights are given, feasibility otherwise.
Assembly assemble_thm2(const iqc::AugmentedPlant& plant, const lpv::ConsistentGrid& grid, double rho,
                       const LyapunovParam& basis, const std::optional<Weights>& weights,
                       const CertifyOptions& opt);

/// The LMI matrix (which must be negative definite) for given numeric values.
struct LmiValues {
  LyapunovParam P;
  std::vector<double> block_mult;  // one per plant row block
  double gamma_xi = 0.0, gamma_delta = 0.0;
};
MatrixXd lmi_matrix(const iqc::AugmentedPlant& plant, Theorem th, double rho, const LmiValues& v,
                    const VectorXd& theta, const VectorXd& delta);

struct Certificate {
  std::string algorithm;
  Theorem theorem = Theorem::Pointwise;
  double rho = 1.0;
  bool feasible = false;
  double m = 1.0, L_nom = 1.0, kappa = 1.0, nu_fraction = 0.0;
  bool is_static = false;
  lpv::ParamDomain domain;
  int grid_nodes = 0;
  int refinements = 0;
  int solves = 0;
  int p = 1, q = 0;
  LyapunovParam P;
  VectorXd lambda_p, lambda_q, lambda_s;
  std::optional<double> gamma_xi, gamma_delta, t_cond;
  std::optional<double> sens_rho;  // rho used by the minimize-mode solve
  // Derived constants.
  double lam_max = 0, lam_min = 0, c = 0, c1 = 0, c2 = 0;
  VectorXd gamma_f;
  // Re-verification.
  bool recheck_ok = false, offgrid_ok = false;
  double recheck_worst = 0, offgrid_worst = 0;
  std::string message;
};

/// One certification cell.
struct CellSpec {
  std::string algorithm = "gd";
  double kappa = 10.0;
  double nu_fraction = 0.05;  // fraction of nu_max = L_nom / 5; 0 means the static case
  double m = 1.0;
  catalog::AogdParams aogd;
};

struct Setup {
  CellSpec cell;
  lpv::LpvSystem sys;
  catalog::SectorSchedule sched;
  lpv::ParamDomain domain;
  bool is_static = false;
  double L_nom = 1.0;
  lpv::ConsistentGrid grid(int n_nodes) const;
};

/// Theta = [0.8 L_nom, L_nom], L_nom = kappa * m, nu = fraction * L_nom / 5.
Setup make_setup(const CellSpec& cell);

struct BisectResult {
  bool feasible = false;
  long j = 0;  // lattice index of the smallest feasible rho
  int solves = 0;
  conic::ConicSolution solution;
};

/// Smallest feasible j in (j_lo, j_hi] on the lattice, assuming j_lo infeasible.
BisectResult bisect_lattice(const std::function<conic::ConicSolution(long)>& feasible_at, long j_lo, long j_hi);

/// Full pipeline: structure/fixed-point checks, bisection with grid refinement,
/// optional minimize mode, bound constants and independent re-check.
Certificate certify(const CellSpec& cell, const CertifyOptions& opt);

/// Plant used for either theorem at a given rho (pointwise ignores rho).
iqc::AugmentedPlant build_plant(const Setup& s, Theorem th, double rho, bool with_sector);

void evaluate_bound_constants(Certificate& cert, int fine_nodes);

struct RecheckReport {
  bool grid_ok = false, offgrid_ok = false;
  double grid_worst = 0, offgrid_worst = 0;  // max scaled lambda_max over pairs
};
RecheckReport recheck(const Setup& s, const Certificate& cert, const lpv::ConsistentGrid& grid, double eps_feas,
                      int offgrid_samples, unsigned seed);

// Sweeps.
struct SweepSpec {
  std::string algorithm = "gd";
  Theorem theorem = Theorem::Pointwise;
  std::vector<double> kappas;
  std::vector<double> fractions;
  CertifyOptions options;
  int jobs = 0;  // 0 -> hardware concurrency
};

struct SweepRow {
  std::string algorithm;
  Theorem theorem;
  double kappa, nu_fraction;
  Certificate cert;
};

std::vector<SweepRow> sweep(const SweepSpec& spec);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);
extern const char* const kSweepHeader;

/// kappa abscissas of the figures.
std::vector<double> gd_figure_kappas();
std::vector<double> comparison_kappas();

// Certificate files (JSON, flat keys, svec-encoded P blocks).
void save_certificate(const Certificate& c, std::ostream& os);
Certificate load_certificate(std::istream& is);

}  // namespace tvcert::cert
