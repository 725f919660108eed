#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace tvcert::lpv {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Box parameter set with rate bounds on dtheta_k = theta_{k+1} - theta_k.
struct ParamDomain {
  VectorXd lo, hi;
  VectorXd delta_lo, delta_hi;

  static ParamDomain interval(double lo, double hi, double delta_lo, double delta_hi);
  int dim() const { return static_cast<int>(lo.size()); }
  void validate() const;  // throws std::invalid_argument
  bool contains(const VectorXd& theta, double tol = 0.0) const;
  bool admissible(const VectorXd& theta, const VectorXd& delta, double tol = 0.0) const;
};

struct GridNode {
  VectorXd theta;
  std::vector<VectorXd> deltas;
};

struct ConsistentGrid {
  std::vector<GridNode> nodes;
  size_t pair_count() const;
  std::vector<VectorXd> thetas() const;
};

/// Uniform nodes over [lo, hi] with, per node, the clipped vertices of the
/// admissible rate interval (box combinations when dim > 1).
ConsistentGrid build_consistent_grid(const ParamDomain& domain, int n_nodes);
/// A single frozen parameter value with dtheta = 0.
ConsistentGrid static_grid(const VectorXd& theta);

using BasisFn = std::function<double(const VectorXd&)>;

/// F(theta) = sum_i phi_i(theta) F_i.
class MatrixFn {
 public:
  MatrixFn() = default;
  MatrixFn(int rows, int cols) : rows_(rows), cols_(cols) {}

  static MatrixFn constant(const MatrixXd& F);
  static MatrixFn zero(int rows, int cols) { return MatrixFn(rows, cols); }
  /// Polynomial basis {1, theta_1, ..., theta_n} with given coefficients.
  static MatrixFn affine(const std::vector<MatrixXd>& coeffs);

  MatrixFn& add(BasisFn phi, const MatrixXd& F);
  MatrixFn& add_constant(const MatrixXd& F);

  MatrixXd operator()(const VectorXd& theta) const;
  MatrixXd operator()(double theta) const { return (*this)(VectorXd::Constant(1, theta)); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t terms() const { return coeffs_.size(); }
  const std::vector<BasisFn>& basis() const { return basis_; }
  const std::vector<MatrixXd>& coeffs() const { return coeffs_; }

  friend MatrixFn operator+(const MatrixFn& a, const MatrixFn& b);
  /// Product basis {phi_i * psi_j} with coefficients F_i G_j.
  friend MatrixFn operator*(const MatrixFn& a, const MatrixFn& b);
  friend MatrixFn operator*(double s, const MatrixFn& a);
  /// Zero-pad into a rows x cols function with this block at (r0, c0).
  MatrixFn embed(int rows, int cols, int r0, int c0) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<BasisFn> basis_;
  std::vector<MatrixXd> coeffs_;
};

/// xi_{k+1} = A xi_k + B u_k,  y_k = C xi_k + D u_k, with p gradient channels
/// followed by q normal-cone channels, each of dimension d.
struct LpvSystem {
  std::string name;
  MatrixFn A, B, C, D;
  int n_xi = 0;
  int p = 1;
  int q = 0;
  int d = 1;

  int channels() const { return p + q; }
};

struct SystemMatrices {
  MatrixXd A, B, C, D;
};

SystemMatrices eval_system(const LpvSystem& sys, const VectorXd& theta);
SystemMatrices eval_system(const LpvSystem& sys, double theta);
/// Same, rejecting theta outside the domain (beyond tol).
SystemMatrices eval_system(const LpvSystem& sys, const ParamDomain& domain, const VectorXd& theta,
                           double tol = 1e-12);

/// Kronecker lift of nominal (d = 1) matrices to decision dimension d.
SystemMatrices lift(const SystemMatrices& m, int d);

/// Shape and well-posedness checks at every grid node: dimensions, zero
/// first block row of D, D lower block-triangular with zero diagonal blocks
/// on gradient channels (normal-cone channels may carry a resolvent step on
/// the diagonal). Throws std::invalid_argument naming the node.
void validate_structure(const LpvSystem& sys, const ConsistentGrid& grid, double tol = 1e-12);

struct FixedPointReport {
  bool ok = false;
  MatrixXd U;  // n_xi x d
  double residual_A = 0.0;
  double residual_C = 0.0;
  bool kernel_ok = true;
};

FixedPointReport check_fixed_point(const LpvSystem& sys, const ConsistentGrid& grid, double tol = 1e-9);

}  // namespace tvcert::lpv
