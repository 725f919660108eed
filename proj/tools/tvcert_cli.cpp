// tvcert: certify, sweep, simulate, check-fixed-point.
// Exit codes: 0 feasible / pass, 2 infeasible / bound violated, 1 usage or solver error.

#include "tvcert/certifier.hpp"
#include "tvcert/simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace tvcert;

namespace {

constexpr int kOk = 0, kError = 1, kNegative = 2;

struct CellArgs {
  std::string algo = "gd";
  std::string theorem = "pointwise";
  double kappa = 10.0;
  double nu_frac = 0.05;
  double m = 1.0;
  double aogd_tau = 0.5;
};

struct SolveArgs {
  int nodes = 11;
  int max_refinements = 3;
  int rho_bits = 12;
  bool no_sector = false;
  bool minimize = false;
  std::vector<double> weights{1.0, 1.0, 1.0};
  int sens_offset = 64;
  unsigned seed = 1;
  bool verbose = false;
};

void add_cell(CLI::App* c, CellArgs& a) {
  c->add_option("--algo", a.algo, "gd, gd-m<k>, nesterov, tmm, aogd")->capture_default_str();
  c->add_option("--theorem", a.theorem, "pointwise | variational")->capture_default_str();
  c->add_option("--kappa", a.kappa, "L_nom / m")->capture_default_str();
  c->add_option("--nu-frac", a.nu_frac, "rate bound as a fraction of L_nom/5 (0 = static)")->capture_default_str();
  c->add_option("--m", a.m, "strong convexity parameter")->capture_default_str();
  c->add_option("--aogd-tau", a.aogd_tau, "aogd momentum weight")->capture_default_str();
}

void add_solve(CLI::App* c, SolveArgs& a) {
  c->add_option("--nodes", a.nodes, "initial grid nodes over Theta")->capture_default_str();
  c->add_option("--max-refinements", a.max_refinements, "grid refinements after a failed re-check")
      ->capture_default_str();
  c->add_option("--rho-bits", a.rho_bits, "bisection lattice 2^-bits")->capture_default_str();
  c->add_flag("--no-sector", a.no_sector, "drop the sector slot from the variational plant");
  c->add_flag("--minimize", a.minimize, "trade-off solve for sensitivities (variational)");
  c->add_option("--weights", a.weights, "k1 k2 k3 for the trade-off objective")->expected(3)->capture_default_str();
  c->add_option("--sens-offset", a.sens_offset, "trade-off solve runs this many rate-lattice steps above rho*")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c->add_option("--seed", a.seed, "off-grid re-check seed")->capture_default_str();
  c->add_flag("-v,--verbose", a.verbose, "solver progress on stderr");
}

cert::CellSpec cell_of(const CellArgs& a) {
  if (!catalog::is_known(a.algo)) throw std::invalid_argument("unknown algorithm id '" + a.algo + "'");
  cert::CellSpec c;
  c.algorithm = a.algo;
  c.kappa = a.kappa;
  c.nu_fraction = a.nu_frac;
  c.m = a.m;
  c.aogd.tau = a.aogd_tau;
  return c;
}

cert::CertifyOptions options_of(const CellArgs& c, const SolveArgs& a) {
  cert::CertifyOptions o;
  o.theorem = cert::theorem_from_string(c.theorem);
  o.n_nodes = a.nodes;
  o.max_refinements = a.max_refinements;
  o.rho_bits = a.rho_bits;
  o.with_sector = !a.no_sector;
  o.seed = a.seed;
  o.solver.verbose = a.verbose;
  if (a.minimize) o.weights = cert::Weights{a.weights[0], a.weights[1], a.weights[2]};
  o.sens_lattice_offset = a.sens_offset;
  return o;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : "-"; }

void print_certificate(const cert::Certificate& c, std::ostream& os) {
  os << "algorithm   " << c.algorithm << "\n"
     << "theorem     " << cert::to_string(c.theorem) << "\n"
     << "kappa       " << fmt(c.kappa) << "  nu_fraction " << fmt(c.nu_fraction)
     << (c.is_static ? "  (static)" : "") << "\n"
     << "feasible    " << (c.feasible ? "yes" : "no") << "\n";
  if (c.feasible) {
    os << "rho         " << fmt(c.rho) << "\n"
       << "grid        " << c.grid_nodes << " nodes, " << c.refinements << " refinements, " << c.solves
       << " solves\n"
       << "lambda_p    ";
    for (int i = 0; i < c.lambda_p.size(); ++i) os << fmt(c.lambda_p(i)) << ' ';
    os << "\n"
       << "gamma_xi    " << opt_fmt(c.gamma_xi) << "  gamma_delta " << opt_fmt(c.gamma_delta) << "  t "
       << opt_fmt(c.t_cond) << "  at rho " << opt_fmt(c.sens_rho) << "\n"
       << "P spectrum  [" << fmt(c.lam_min) << ", " << fmt(c.lam_max) << "]  c " << fmt(c.c) << "  c1 "
       << fmt(c.c1) << "  c2 " << fmt(c.c2) << "\n"
       << "re-check    grid " << (c.recheck_ok ? "ok" : "FAILED") << " (" << fmt(c.recheck_worst) << "), off-grid "
       << (c.offgrid_ok ? "ok" : "FAILED") << " (" << fmt(c.offgrid_worst) << ")\n";
  }
  if (!c.message.empty()) os << "note        " << c.message << "\n";
}

std::vector<double> parse_kappas(const std::string& s) {
  if (s == "gd") return cert::gd_figure_kappas();
  if (s == "comparison") return cert::comparison_kappas();
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw std::invalid_argument("empty kappa list");
  return out;
}

int cmd_certify(const CellArgs& ca, const SolveArgs& sa, const std::string& out) {
  cert::Certificate c = cert::certify(cell_of(ca), options_of(ca, sa));
  print_certificate(c, std::cout);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    cert::save_certificate(c, f);
  }
  return c.feasible ? kOk : kNegative;
}

int cmd_sweep(const std::vector<std::string>& algos, const std::string& theorem, const std::string& kappas,
              const std::vector<double>& fractions, const SolveArgs& sa, int jobs, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  int cells = 0, failed = 0;
  for (const auto& algo : algos) {
    if (!catalog::is_known(algo)) throw std::invalid_argument("unknown algorithm id '" + algo + "'");
    CellArgs ca;
    ca.algo = algo;
    ca.theorem = theorem;
    cert::SweepSpec spec;
    spec.algorithm = algo;
    spec.theorem = cert::theorem_from_string(theorem);
    spec.kappas = parse_kappas(kappas);
    spec.fractions = fractions;
    spec.options = options_of(ca, sa);
    spec.jobs = jobs;
    std::vector<cert::SweepRow> rows = cert::sweep(spec);
    const std::string path = out_dir + "/" + algo + "_" + theorem + ".csv";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    cert::write_sweep_csv(rows, f);
    for (const auto& r : rows) {
      ++cells;
      if (!r.cert.message.empty() && !r.cert.feasible && r.cert.solves == 0) {
        ++failed;
        std::cerr << "warning: " << algo << " kappa=" << fmt(r.kappa) << " nu_fraction=" << fmt(r.nu_fraction)
                  << ": " << r.cert.message << "\n";
      }
    }
    std::cout << path << "\n";
  }
  return cells > 0 && failed == cells ? kError : kOk;
}

struct SimArgs {
  std::string cert_file;
  std::string path = "sinusoid";
  int horizon = 500;
  int d = 2;
  unsigned seed = 1;
  double rate_scale = 1.0;
  double init_scale = 1.0;
  double center_amp = 1.0;
  double center_freq = 0.05;
  std::string out;
};

int cmd_simulate(const CellArgs& ca, const SolveArgs& sa, const SimArgs& s) {
  cert::Certificate c;
  if (!s.cert_file.empty()) {
    std::ifstream f(s.cert_file);
    if (!f) throw std::invalid_argument("cannot read " + s.cert_file);
    c = cert::load_certificate(f);
  } else {
    c = cert::certify(cell_of(ca), options_of(ca, sa));
  }
  if (!c.feasible) {
    std::cerr << "error: certificate is infeasible; nothing to validate\n";
    return kError;
  }
  catalog::AogdParams ap;
  ap.tau = ca.aogd_tau;
  lpv::LpvSystem sys = sim::system_of(c, ap);
  cert::CellSpec cell;
  cell.algorithm = c.algorithm;
  cell.kappa = c.kappa;
  cell.nu_fraction = c.nu_fraction;
  cell.m = c.m;
  cert::Setup setup = cert::make_setup(cell);

  sim::QuadraticSpec qs;
  qs.d = s.d;
  qs.horizon = s.horizon;
  qs.seed = s.seed;
  qs.path = sim::path_from_string(s.path);
  qs.rate_scale = s.rate_scale;
  qs.center_amp = s.center_amp;
  qs.center_freq = s.center_freq;
  if (qs.path == sim::PathKind::Constant) qs.theta_const = c.L_nom;
  if (sys.q > 0) qs.box = std::make_pair(-0.5 * s.center_amp, 0.5 * s.center_amp);
  sim::TvProblem prob = sim::make_varying_quadratic(c.domain, setup.sched, qs);

  lpv::FixedPointReport fp = lpv::check_fixed_point(sys, lpv::static_grid(lpv::VectorXd::Constant(1, c.L_nom)));
  lpv::MatrixXd xi0 = fp.U.col(0) * prob.x_star(0).transpose();
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> nd(0.0, s.init_scale);
  for (int i = 0; i < xi0.rows(); ++i)
    for (int j = 0; j < xi0.cols(); ++j) xi0(i, j) += nd(rng);

  sim::Trajectory tr = sim::simulate(sys, prob, xi0, s.horizon);
  sim::BoundReport rep;
  const bool bound_applies = sys.q == 0 || c.theorem == cert::Theorem::Pointwise;
  if (bound_applies) rep = sim::check_bound(tr, c, prob);
  if (!s.out.empty()) {
    std::ofstream f(s.out);
    if (!f) throw std::runtime_error("cannot write " + s.out);
    sim::write_trajectory_csv(tr, rep, f);
  }
  const auto& last = tr.steps.back();
  std::cout << "algorithm " << c.algorithm << "  theorem " << cert::to_string(c.theorem) << "  rho "
            << fmt(c.sens_rho.value_or(c.rho)) << "\n"
            << "steps " << s.horizon << "  path " << s.path << "  final err " << fmt(last.err) << "  err_xi "
            << fmt(last.err_xi) << "\n";
  if (!bound_applies) {
    std::cout << "bound check: not available for this system\n";
    return kOk;
  }
  std::cout << "bound check: " << (rep.pass ? "pass" : "VIOLATED") << "  max ratio " << fmt(rep.max_ratio)
            << " at k=" << rep.worst_k << "\n";
  if (!rep.in_spec) std::cout << "warning: " << rep.note << "; the bound is not guaranteed\n";
  return rep.pass ? kOk : kNegative;
}

int cmd_check_fixed_point(const CellArgs& ca, int nodes) {
  cert::Setup s = cert::make_setup(cell_of(ca));
  lpv::ConsistentGrid grid = s.grid(nodes);
  lpv::validate_structure(s.sys, grid);
  lpv::FixedPointReport r = lpv::check_fixed_point(s.sys, grid);
  std::cout << "algorithm " << ca.algo << "  nodes " << grid.nodes.size() << "\n"
            << "U' = [";
  for (int i = 0; i < r.U.rows(); ++i) std::cout << (i ? " " : "") << fmt(r.U(i, 0));
  std::cout << "]\n"
            << "residual (I - A)U " << fmt(r.residual_A) << "  CU - 1 " << fmt(r.residual_C) << "  kernel "
            << (r.kernel_ok ? "ok" : "violated") << "\n"
            << (r.ok ? "fixed point: ok" : "fixed point: VIOLATED") << "\n";
  return r.ok ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence-rate certificates for time-varying first-order algorithms"};
  app.set_config("--config", "", "TOML/INI file; [certify], [sweep], ... sections set subcommand options");
  app.require_subcommand(1);

  CellArgs cert_cell, sim_cell, fp_cell;
  SolveArgs cert_solve, sweep_solve, sim_solve;
  std::string cert_out;

  auto* certify = app.add_subcommand("certify", "certify one (algorithm, kappa, rate bound) cell");
  add_cell(certify, cert_cell);
  add_solve(certify, cert_solve);
  certify->add_option("-o,--out", cert_out, "certificate JSON file");

  std::vector<std::string> sweep_algos{"gd"};
  std::string sweep_theorem = "pointwise", sweep_kappas = "gd", sweep_dir = "sweep_out";
  std::vector<double> sweep_fracs{0.0, 0.05, 0.5, 1.0};
  int jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "rate sweep over kappa and rate-bound fractions; one CSV per algorithm");
  sweep->add_option("--algo", sweep_algos, "algorithm ids")->delimiter(',')->capture_default_str();
  sweep->add_option("--theorem", sweep_theorem)->capture_default_str();
  sweep->add_option("--kappas", sweep_kappas, "comma list, or 'gd' / 'comparison' figure grids")
      ->capture_default_str();
  sweep->add_option("--fractions", sweep_fracs, "rate-bound fractions")->delimiter(',')->capture_default_str();
  sweep->add_option("--jobs", jobs, "worker threads (0 = available parallelism)")->capture_default_str();
  sweep->add_option("--out-dir", sweep_dir)->capture_default_str();
  add_solve(sweep, sweep_solve);

  SimArgs sa;
  auto* simulate = app.add_subcommand("simulate", "simulate on a synthetic time-varying quadratic and check the bound");
  simulate->add_option("--cert", sa.cert_file, "certificate JSON (otherwise certify inline)");
  add_cell(simulate, sim_cell);
  add_solve(simulate, sim_solve);
  simulate->add_option("--path", sa.path, "sinusoid | random_walk | constant")->capture_default_str();
  simulate->add_option("--horizon", sa.horizon)->capture_default_str();
  simulate->add_option("--dim", sa.d)->capture_default_str();
  simulate->add_option("--sim-seed", sa.seed)->capture_default_str();
  simulate->add_option("--rate-scale", sa.rate_scale, "> 1 drives theta beyond the certified rate bound")
      ->capture_default_str();
  simulate->add_option("--init-scale", sa.init_scale)->capture_default_str();
  simulate->add_option("--center-amp", sa.center_amp)->capture_default_str();
  simulate->add_option("--center-freq", sa.center_freq)->capture_default_str();
  simulate->add_option("-o,--out", sa.out, "trajectory CSV");

  int fp_nodes = 11;
  auto* fixed = app.add_subcommand("check-fixed-point", "fixed-point and structure checks on the grid");
  add_cell(fixed, fp_cell);
  fixed->add_option("--nodes", fp_nodes)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*certify) return cmd_certify(cert_cell, cert_solve, cert_out);
    if (*sweep) return cmd_sweep(sweep_algos, sweep_theorem, sweep_kappas, sweep_fracs, sweep_solve, jobs, sweep_dir);
    if (*simulate) return cmd_simulate(sim_cell, sim_solve, sa);
    if (*fixed) return cmd_check_fixed_point(fp_cell, fp_nodes);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
