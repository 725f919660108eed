#pragma once

#include "tvcert/catalog.hpp"
#include "tvcert/lpv.hpp"

#include <string>
#include <vector>

namespace tvcert::iqc {

using catalog::SectorSchedule;
using lpv::LpvSystem;
using lpv::MatrixFn;
using lpv::MatrixXd;
using lpv::VectorXd;

enum class RhsKind { Zero, FunctionVariation };
enum class FilterKind { Sector, Passivity, Variational };
const char* to_string(FilterKind k);

/// Per-channel filter (d = 1). Input signal classes: y (channel output error),
/// u (channel input error), dx (minimizer change), dd (gradient variation).
struct IqcFilter {
  FilterKind kind = FilterKind::Sector;
  int n_zeta = 0;
  int n_out = 0;
  MatrixFn A_psi;                      // n_zeta x n_zeta
  MatrixFn B_y, B_u, B_dx, B_dd;       // n_zeta x 1
  MatrixFn C_psi;                      // n_out x n_zeta
  MatrixFn D_y, D_u, D_dx, D_dd;       // n_out x 1
  MatrixXd M;                          // n_out x n_out middle matrix
  RhsKind rhs = RhsKind::Zero;
  bool uses_dx = false, uses_dd = false;
};

MatrixXd sector_middle();      // [[0,1],[1,0]]
MatrixXd variational_middle(); // blkdiag(1/2[[0,1],[1,0]], diag(1,-1), 1/2 diag(1,-1))

IqcFilter make_sector_iqc(const SectorSchedule& sched);
IqcFilter make_passivity_iqc();
IqcFilter make_variational_iqc(const SectorSchedule& sched, double rho);

/// a(theta) = sqrt(m (L - m) / 2).
double variational_a(double m, double L);

struct FilterInput {
  double y = 0, u = 0, dx = 0, dd = 0;
};

/// Run a filter from zeta_0 = 0; returns psi_k for every step.
std::vector<VectorXd> run_filter(const IqcFilter& f, const std::vector<VectorXd>& thetas,
                                 const std::vector<FilterInput>& inputs);

struct AnalyticWindow {
  double x = 0, grad = 0;            // x~_k, grad_k
  double x_prev = 0, grad_prev = 0;  // x~_{k-1}, grad_{k-1}
  double dx_prev = 0, dd_prev = 0;   // dx*_{k-1}, ddelta_{k-1}
  double m = 1, L = 2, m_prev = 1, L_prev = 2;
};

struct AnalyticBlocks {
  Eigen::Vector2d psi1, psi2, psi3;
};

/// The three two-row blocks of the variational filter output written out
/// directly in terms of the signal window.
AnalyticBlocks filter_outputs_analytic(const AnalyticWindow& w, double rho);

/// One multiplier slot: a filter attached to a channel, owning a contiguous
/// range of psi rows and filter states.
struct Attachment {
  IqcFilter filter;
  int channel = 0;  // 0..p-1 gradient, p..p+q-1 normal cone
};

struct RowBlock {
  FilterKind kind;
  int channel;
  bool cone;
  int first_row, rows;
  int first_state, states;
  MatrixXd M;
};

struct PointwiseOutput {
  MatrixFn C_hat, D_hat;
  std::vector<RowBlock> rows;
};

/// Sector rows for gradient channels, passivity rows for cone channels,
/// gradients first then cones, two rows each.
PointwiseOutput augment_pointwise(const LpvSystem& sys, const SectorSchedule& sched);

struct AugmentedPlant {
  MatrixFn A_hat, B_hat, B_dxi, B_ddelta;
  MatrixFn C_hat, D_hat, D_dxi, D_ddelta;
  int n_xi = 0, n_zeta = 0, n_eta = 0, n_u = 0, n_psi = 0, p = 0;
  std::vector<RowBlock> rows;
};

struct AugmentedMatrices {
  MatrixXd A, B, Bx, Bd, C, D, Dx, Dd;
};
AugmentedMatrices eval_plant(const AugmentedPlant& plant, const VectorXd& theta);

/// Generic augmentation with arbitrary attachments (filters in order).
AugmentedPlant augment(const LpvSystem& sys, const std::vector<Attachment>& attachments);

/// One variational filter per gradient channel; optionally one extra sector
/// slot per gradient channel. Rejects q >= 1.
AugmentedPlant augment_variational(const LpvSystem& sys, const SectorSchedule& sched, double rho,
                                   bool with_sector = true);

}  // namespace tvcert::iqc
