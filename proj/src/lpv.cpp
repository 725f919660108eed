#include "tvcert/lpv.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tvcert::lpv {

ParamDomain ParamDomain::interval(double lo, double hi, double delta_lo, double delta_hi) {
  ParamDomain d;
  d.lo = VectorXd::Constant(1, lo);
  d.hi = VectorXd::Constant(1, hi);
  d.delta_lo = VectorXd::Constant(1, delta_lo);
  d.delta_hi = VectorXd::Constant(1, delta_hi);
  return d;
}

void ParamDomain::validate() const {
  const auto n = lo.size();
  if (n == 0) throw std::invalid_argument("parameter domain has no coordinates");
  if (hi.size() != n || delta_lo.size() != n || delta_hi.size() != n)
    throw std::invalid_argument("parameter domain bounds have inconsistent lengths");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(lo(i)) || !std::isfinite(hi(i)) || !std::isfinite(delta_lo(i)) ||
        !std::isfinite(delta_hi(i)))
      throw std::invalid_argument("parameter domain bounds must be finite");
    if (!(lo(i) < hi(i))) throw std::invalid_argument("empty parameter domain (lo >= hi)");
    if (delta_lo(i) > 0 || delta_hi(i) < 0)
      throw std::invalid_argument("rate bounds must satisfy delta_lo <= 0 <= delta_hi");
  }
}

bool ParamDomain::contains(const VectorXd& theta, double tol) const {
  if (theta.size() != lo.size()) return false;
  for (int i = 0; i < theta.size(); ++i)
    if (theta(i) < lo(i) - tol || theta(i) > hi(i) + tol) return false;
  return true;
}

bool ParamDomain::admissible(const VectorXd& theta, const VectorXd& delta, double tol) const {
  if (!contains(theta, tol) || !contains(theta + delta, tol)) return false;
  for (int i = 0; i < delta.size(); ++i)
    if (delta(i) < delta_lo(i) - tol || delta(i) > delta_hi(i) + tol) return false;
  return true;
}

size_t ConsistentGrid::pair_count() const {
  size_t n = 0;
  for (const auto& nd : nodes) n += nd.deltas.size();
  return n;
}

std::vector<VectorXd> ConsistentGrid::thetas() const {
  std::vector<VectorXd> out;
  for (const auto& nd : nodes) out.push_back(nd.theta);
  return out;
}

ConsistentGrid build_consistent_grid(const ParamDomain& domain, int n_nodes) {
  domain.validate();
  if (n_nodes < 2) throw std::invalid_argument("consistent grid needs at least 2 nodes per coordinate");
  const int nt = domain.dim();

  // per-coordinate node values, endpoints exact
  std::vector<std::vector<double>> axis(nt);
  for (int c = 0; c < nt; ++c)
    for (int k = 0; k < n_nodes; ++k) {
      double v = (k == n_nodes - 1) ? domain.hi(c)
                                    : domain.lo(c) + (domain.hi(c) - domain.lo(c)) * k / (n_nodes - 1);
      axis[c].push_back(v);
    }

  ConsistentGrid g;
  std::vector<int> idx(nt, 0);
  while (true) {
    GridNode node;
    node.theta.resize(nt);
    std::vector<std::vector<double>> dv(nt);
    for (int c = 0; c < nt; ++c) {
      const double th = axis[c][idx[c]];
      node.theta(c) = th;
      double a = std::max(domain.delta_lo(c), domain.lo(c) - th);
      double b = std::min(domain.delta_hi(c), domain.hi(c) - th);
      // keep theta + delta inside the box exactly
      while (th + a < domain.lo(c)) a = std::nextafter(a, 0.0);
      while (th + b > domain.hi(c)) b = std::nextafter(b, 0.0);
      dv[c].push_back(a);
      if (b != a) dv[c].push_back(b);
    }
    std::vector<int> j(nt, 0);
    while (true) {
      VectorXd d(nt);
      for (int c = 0; c < nt; ++c) d(c) = dv[c][j[c]];
      node.deltas.push_back(d);
      int c = 0;
      while (c < nt && ++j[c] == static_cast<int>(dv[c].size())) j[c++] = 0;
      if (c == nt) break;
    }
    g.nodes.push_back(node);
    int c = 0;
    while (c < nt && ++idx[c] == n_nodes) idx[c++] = 0;
    if (c == nt) break;
  }
  return g;
}

ConsistentGrid static_grid(const VectorXd& theta) {
  ConsistentGrid g;
  g.nodes.push_back({theta, {VectorXd::Zero(theta.size())}});
  return g;
}

MatrixFn MatrixFn::constant(const MatrixXd& F) {
  MatrixFn f(static_cast<int>(F.rows()), static_cast<int>(F.cols()));
  f.add_constant(F);
  return f;
}

MatrixFn MatrixFn::affine(const std::vector<MatrixXd>& coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("affine MatrixFn needs at least a constant term");
  MatrixFn f(static_cast<int>(coeffs[0].rows()), static_cast<int>(coeffs[0].cols()));
  f.add_constant(coeffs[0]);
  for (size_t i = 1; i < coeffs.size(); ++i) {
    const int c = static_cast<int>(i - 1);
    f.add([c](const VectorXd& th) { return th(c); }, coeffs[i]);
  }
  return f;
}

MatrixFn& MatrixFn::add(BasisFn phi, const MatrixXd& F) {
  if (F.rows() != rows_ || F.cols() != cols_) throw std::invalid_argument("MatrixFn: coefficient shape mismatch");
  basis_.push_back(std::move(phi));
  coeffs_.push_back(F);
  return *this;
}

MatrixFn& MatrixFn::add_constant(const MatrixXd& F) {
  return add([](const VectorXd&) { return 1.0; }, F);
}

MatrixXd MatrixFn::operator()(const VectorXd& theta) const {
  MatrixXd out = MatrixXd::Zero(rows_, cols_);
  for (size_t i = 0; i < coeffs_.size(); ++i) out += basis_[i](theta) * coeffs_[i];
  return out;
}

MatrixFn operator+(const MatrixFn& a, const MatrixFn& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("MatrixFn: sum shape mismatch");
  MatrixFn s = a;
  for (size_t i = 0; i < b.coeffs_.size(); ++i) s.add(b.basis_[i], b.coeffs_[i]);
  return s;
}

MatrixFn operator*(const MatrixFn& a, const MatrixFn& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("MatrixFn: product shape mismatch");
  MatrixFn p(a.rows_, b.cols_);
  for (size_t i = 0; i < a.coeffs_.size(); ++i)
    for (size_t j = 0; j < b.coeffs_.size(); ++j) {
      MatrixXd F = a.coeffs_[i] * b.coeffs_[j];
      if (F.size() && F.cwiseAbs().maxCoeff() == 0.0) continue;
      BasisFn fa = a.basis_[i], fb = b.basis_[j];
      p.add([fa, fb](const VectorXd& th) { return fa(th) * fb(th); }, F);
    }
  return p;
}

MatrixFn operator*(double s, const MatrixFn& a) {
  MatrixFn p = a;
  for (auto& F : p.coeffs_) F *= s;
  return p;
}

MatrixFn MatrixFn::embed(int rows, int cols, int r0, int c0) const {
  if (r0 < 0 || c0 < 0 || r0 + rows_ > rows || c0 + cols_ > cols)
    throw std::invalid_argument("MatrixFn: embedding out of range");
  MatrixFn e(rows, cols);
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    MatrixXd F = MatrixXd::Zero(rows, cols);
    F.block(r0, c0, rows_, cols_) = coeffs_[i];
    e.add(basis_[i], F);
  }
  return e;
}

SystemMatrices eval_system(const LpvSystem& sys, const VectorXd& theta) {
  return {sys.A(theta), sys.B(theta), sys.C(theta), sys.D(theta)};
}

SystemMatrices eval_system(const LpvSystem& sys, double theta) {
  return eval_system(sys, VectorXd::Constant(1, theta));
}

SystemMatrices eval_system(const LpvSystem& sys, const ParamDomain& domain, const VectorXd& theta, double tol) {
  if (!domain.contains(theta, tol)) throw std::invalid_argument("eval_system: theta outside the parameter domain");
  return eval_system(sys, theta);
}

SystemMatrices lift(const SystemMatrices& m, int d) {
  if (d == 1) return m;
  auto kron = [d](const MatrixXd& M) {
    MatrixXd K = MatrixXd::Zero(M.rows() * d, M.cols() * d);
    for (int i = 0; i < M.rows(); ++i)
      for (int j = 0; j < M.cols(); ++j) K.block(i * d, j * d, d, d) = M(i, j) * MatrixXd::Identity(d, d);
    return K;
  };
  return {kron(m.A), kron(m.B), kron(m.C), kron(m.D)};
}

void validate_structure(const LpvSystem& sys, const ConsistentGrid& grid, double tol) {
  if (sys.p < 1 || sys.q < 0 || sys.d < 1 || sys.n_xi < 1)
    throw std::invalid_argument("system '" + sys.name + "': invalid channel signature");
  // matrices are nominal (d = 1); the Kronecker lift happens at evaluation
  const int nc = sys.channels();
  const int nx = sys.n_xi;
  for (size_t k = 0; k < grid.nodes.size(); ++k) {
    const auto& th = grid.nodes[k].theta;
    auto where = [&] {
      std::ostringstream os;
      os << "system '" << sys.name << "' at grid node " << k << " (theta=" << th.transpose() << "): ";
      return os.str();
    };
    SystemMatrices M = eval_system(sys, th);
    if (M.A.rows() != nx || M.A.cols() != nx) throw std::invalid_argument(where() + "A has wrong shape");
    if (M.B.rows() != nx || M.B.cols() != nc) throw std::invalid_argument(where() + "B has wrong shape");
    if (M.C.rows() != nc || M.C.cols() != nx) throw std::invalid_argument(where() + "C has wrong shape");
    if (M.D.rows() != nc || M.D.cols() != nc) throw std::invalid_argument(where() + "D has wrong shape");
    for (int i = 0; i < nc; ++i)
      for (int j = i; j < nc; ++j) {
        double blk = std::abs(M.D(i, j));
        bool diag_allowed = (i == j) && i >= sys.p;
        if (blk > tol && !diag_allowed)
          throw std::invalid_argument(where() + "D is not lower triangular (well-posedness)");
      }
    if (M.D.topRows(1).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument(where() + "first block row of D must vanish");
  }
}

FixedPointReport check_fixed_point(const LpvSystem& sys, const ConsistentGrid& grid, double tol) {
  // Matrices are nominal (d = 1); the lifted fixed point is U = u (x) I_d.
  FixedPointReport rep;
  const int nx = sys.n_xi, d = sys.d, nc = sys.channels();
  const int N = static_cast<int>(grid.nodes.size());
  std::vector<SystemMatrices> mats;
  MatrixXd Kn(N * (nx + nc), nx);
  VectorXd Rn(N * (nx + nc));
  for (int k = 0; k < N; ++k) {
    SystemMatrices M = eval_system(sys, grid.nodes[k].theta);
    if (M.A.rows() != nx || M.C.rows() != nc || M.C.cols() != nx)
      throw std::invalid_argument("check_fixed_point: system shape mismatch");
    Kn.block(k * (nx + nc), 0, nx, nx) = MatrixXd::Identity(nx, nx) - M.A;
    Kn.block(k * (nx + nc) + nx, 0, nc, nx) = M.C;
    Rn.segment(k * (nx + nc), nx).setZero();
    Rn.segment(k * (nx + nc) + nx, nc).setOnes();
    mats.push_back(std::move(M));
  }
  VectorXd u = Kn.colPivHouseholderQr().solve(Rn);
  rep.U = MatrixXd::Zero(nx * d, d);
  for (int i = 0; i < nx; ++i) rep.U.block(i * d, 0, d, d) = u(i) * MatrixXd::Identity(d, d);
  for (int k = 0; k < N; ++k) {
    const auto& M = mats[k];
    rep.residual_A = std::max(rep.residual_A, ((MatrixXd::Identity(nx, nx) - M.A) * u).cwiseAbs().maxCoeff());
    rep.residual_C =
        std::max(rep.residual_C, (M.C * u - VectorXd::Ones(nc)).cwiseAbs().maxCoeff());
  }
  rep.kernel_ok = true;
  if (sys.q >= 1) {
    VectorXd w(nc);
    w.head(sys.p).setOnes();
    w.tail(sys.q).setConstant(-1.0);
    w.normalize();
    for (int k = 0; k < N && rep.kernel_ok; ++k) {
      for (const MatrixXd* X : {&mats[k].B, &mats[k].D}) {
        // ker X must be exactly span{w}: X w = 0 and rank X = nc - 1
        double scale = std::max(1.0, X->cwiseAbs().maxCoeff());
        if ((*X * w).cwiseAbs().maxCoeff() > tol * scale) {
          rep.kernel_ok = false;
          break;
        }
        Eigen::JacobiSVD<MatrixXd> svd(*X);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
          if (sv(i) > 1e-9 * scale) ++rank;
        if (rank != nc - 1) {
          rep.kernel_ok = false;
          break;
        }
      }
    }
  }
  rep.ok = rep.residual_A <= tol && rep.residual_C <= tol && (sys.q == 0 || rep.kernel_ok);
  return rep;
}

}  // namespace tvcert::lpv
