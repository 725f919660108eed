#include "tvcert/certifier.hpp"

#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

namespace tvcert::cert {

const char* const kSweepHeader =
    "algorithm,theorem,kappa,nu_fraction,rho,feasible,gamma_xi,gamma_delta,lambda_p_sum,t_cond";

std::vector<double> gd_figure_kappas() {
  return {1.251, 2.33925569, 4.37419438, 8.17934379, 15.29462549, 28.59955208, 53.47854904, 100.0};
}

std::vector<double> comparison_kappas() {
  return {1.251, 2.03550964, 3.31199001, 5.38895892, 8.76840756,
          14.2671288, 23.2141313, 37.77185302, 61.4588098, 100.0};
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  for (double f : spec.fractions)
    for (double k : spec.kappas) {
      SweepRow r;
      r.algorithm = spec.algorithm;
      r.theorem = spec.theorem;
      r.kappa = k;
      r.nu_fraction = f;
      rows.push_back(r);
    }
  int jobs = spec.jobs > 0 ? spec.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& r = rows[i];
      CellSpec cell;
      cell.algorithm = r.algorithm;
      cell.kappa = r.kappa;
      cell.nu_fraction = r.nu_fraction;
      CertifyOptions opt = spec.options;
      opt.theorem = spec.theorem;
      try {
        r.cert = certify(cell, opt);
      } catch (const std::exception& e) {
        r.cert = Certificate();
        r.cert.algorithm = r.algorithm;
        r.cert.theorem = r.theorem;
        r.cert.kappa = r.kappa;
        r.cert.nu_fraction = r.nu_fraction;
        r.cert.message = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

namespace {
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }
}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << kSweepHeader << "\n";
  for (const auto& r : rows) {
    const Certificate& c = r.cert;
    os << r.algorithm << ',' << to_string(r.theorem) << ',' << num(r.kappa) << ',' << num(r.nu_fraction) << ','
       << (c.feasible ? num(c.rho) : std::string()) << ',' << (c.feasible ? "true" : "false") << ','
       << (c.feasible ? opt_num(c.gamma_xi) : std::string()) << ','
       << (c.feasible ? opt_num(c.gamma_delta) : std::string()) << ','
       << (c.feasible ? num(c.lambda_p.sum()) : std::string()) << ','
       << (c.feasible ? opt_num(c.t_cond) : std::string()) << "\n";
  }
}

}  // namespace tvcert::cert
