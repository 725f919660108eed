#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tvcert::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Scaled lower-triangular half-vectorization (column-major over the lower
/// triangle, off-diagonals times sqrt(2)), so <svec(S), svec(T)> = tr(ST).
VectorXd svec(const MatrixXd& S, double sym_tol = 1e-12);
MatrixXd smat(const VectorXd& v);
int svec_dim(int n);
int smat_dim(int len);

struct Cone {
  enum class Kind { Psd, Nonneg };
  Kind kind = Kind::Psd;
  int dim = 0;  // matrix side for Psd, entry count for Nonneg

  static Cone psd(int n) { return {Kind::Psd, n}; }
  static Cone nonneg(int n) { return {Kind::Nonneg, n}; }
  // Length of the stored coefficient vectors.
  int storage() const { return kind == Kind::Psd ? svec_dim(dim) : dim; }
};

/// constant + sum_i x_i * terms[i] in cone. Psd coefficients are svec-encoded,
/// Nonneg coefficients are plain vectors.
struct Constraint {
  Cone cone;
  VectorXd constant;
  std::map<int, VectorXd> terms;
  std::string label;
  // Strict constraints share the phase-I margin; loose ones (e.g. plain
  // multiplier signs) only need membership.
  bool strict = true;
};

struct ConicProblem {
  int n_vars = 0;
  VectorXd objective;  // minimize objective' x; empty or zero means feasibility
  std::vector<Constraint> constraints;

  int add_vars(int k) {
    int first = n_vars;
    n_vars += k;
    return first;
  }
  bool is_feasibility() const;
  // Throws std::invalid_argument on dimension mismatches.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unknown };
const char* to_string(Status s);

struct ConicSolution {
  Status status = Status::Unknown;
  VectorXd x;
  double objective_value = 0.0;
  double max_violation = 0.0;  // max over cones of max(0, -lambda_min)
  double margin = 0.0;         // phase-I value: largest uniform slack found
  double rel_gap = 0.0;        // phase II: relative primal-dual gap at the returned point
  int iterations = 0;
};

struct SolverOptions {
  double feas_tol = 1e-7;
  double gap_tol = 1e-8;
  int max_iter = 120;
  double box = 1e4;        // |x_i| <= box during solves
  bool scale_blocks = true;
  bool verbose = false;
};

/// Primal-dual interior-point solve. Feasibility is decided by a phase-I
/// max-margin problem over the strict constraints; a phase II runs only for nonzero objectives.
ConicSolution solve(const ConicProblem& p, const SolverOptions& opt = {});

/// Smallest eigenvalue of each constraint at x (independent of the solver).
std::vector<double> constraint_min_eigs(const ConicProblem& p, const VectorXd& x);
double max_violation(const ConicProblem& p, const VectorXd& x);

void dump(const ConicProblem& p, std::ostream& os);
ConicProblem load(std::istream& is);

}  // namespace tvcert::conic
