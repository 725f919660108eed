#include "tvcert/certifier.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <stdexcept>

namespace tvcert::cert {

using nlohmann::json;

namespace {

json vec(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd unvec(const json& j) {
  std::vector<double> s = j.get<std::vector<double>>();
  return Eigen::Map<VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> unopt(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return doc.at(key).get<double>();
}

}  // namespace

void save_certificate(const Certificate& c, std::ostream& os) {
  json j;
  j["format"] = "tvcert-certificate-1";
  j["algorithm"] = c.algorithm;
  j["theorem"] = to_string(c.theorem);
  j["rho"] = c.rho;
  j["feasible"] = c.feasible;
  j["m"] = c.m;
  j["L_nom"] = c.L_nom;
  j["kappa"] = c.kappa;
  j["nu_fraction"] = c.nu_fraction;
  j["is_static"] = c.is_static;
  j["theta_lo"] = c.domain.lo.size() ? c.domain.lo(0) : 0.0;
  j["theta_hi"] = c.domain.hi.size() ? c.domain.hi(0) : 0.0;
  j["delta_lo"] = c.domain.delta_lo.size() ? c.domain.delta_lo(0) : 0.0;
  j["delta_hi"] = c.domain.delta_hi.size() ? c.domain.delta_hi(0) : 0.0;
  j["grid_nodes"] = c.grid_nodes;
  j["refinements"] = c.refinements;
  j["solves"] = c.solves;
  j["p"] = c.p;
  j["q"] = c.q;
  j["P_kind"] = c.P.kind == LyapunovParam::Kind::Constant ? "constant" : "affine";
  j["P_n"] = c.P.n;
  j["P_lo"] = c.P.lo;
  j["P_hi"] = c.P.hi;
  j["P_terms"] = c.P.coeffs.size();
  for (size_t i = 0; i < c.P.coeffs.size(); ++i) j["P" + std::to_string(i) + "_svec"] = vec(conic::svec(c.P.coeffs[i], 1e-9));
  j["lambda_p"] = vec(c.lambda_p);
  j["lambda_q"] = vec(c.lambda_q);
  j["lambda_s"] = vec(c.lambda_s);
  j["gamma_xi"] = opt(c.gamma_xi);
  j["gamma_delta"] = opt(c.gamma_delta);
  j["t_cond"] = opt(c.t_cond);
  j["sens_rho"] = opt(c.sens_rho);
  j["lambda_max"] = c.lam_max;
  j["lambda_min"] = c.lam_min;
  j["c"] = c.c;
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["gamma_f"] = vec(c.gamma_f);
  j["recheck_ok"] = c.recheck_ok;
  j["offgrid_ok"] = c.offgrid_ok;
  j["recheck_worst"] = c.recheck_worst;
  j["offgrid_worst"] = c.offgrid_worst;
  j["message"] = c.message;
  os << j.dump(2) << "\n";
}

Certificate load_certificate(std::istream& is) {
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("certificate parse error: ") + e.what());
  }
  if (j.value("format", "") != "tvcert-certificate-1") throw std::invalid_argument("not a certificate document");
  try {
    Certificate c;
    c.algorithm = j.at("algorithm").get<std::string>();
    c.theorem = theorem_from_string(j.at("theorem").get<std::string>());
    c.rho = j.at("rho").get<double>();
    c.feasible = j.at("feasible").get<bool>();
    c.m = j.at("m").get<double>();
    c.L_nom = j.at("L_nom").get<double>();
    c.kappa = j.at("kappa").get<double>();
    c.nu_fraction = j.at("nu_fraction").get<double>();
    c.is_static = j.at("is_static").get<bool>();
    c.domain = lpv::ParamDomain::interval(j.at("theta_lo").get<double>(), j.at("theta_hi").get<double>(),
                                          j.at("delta_lo").get<double>(), j.at("delta_hi").get<double>());
    c.grid_nodes = j.at("grid_nodes").get<int>();
    c.refinements = j.value("refinements", 0);
    c.solves = j.value("solves", 0);
    c.p = j.at("p").get<int>();
    c.q = j.at("q").get<int>();
    c.P.kind = j.at("P_kind").get<std::string>() == "constant" ? LyapunovParam::Kind::Constant
                                                                : LyapunovParam::Kind::Affine;
    c.P.n = j.at("P_n").get<int>();
    c.P.lo = j.at("P_lo").get<double>();
    c.P.hi = j.at("P_hi").get<double>();
    const int terms = j.at("P_terms").get<int>();
    for (int i = 0; i < terms; ++i) {
      MatrixXd Pi = conic::smat(unvec(j.at("P" + std::to_string(i) + "_svec")));
      if (Pi.rows() != c.P.n) throw std::invalid_argument("certificate P block has the wrong size");
      c.P.coeffs.push_back(Pi);
    }
    c.lambda_p = unvec(j.at("lambda_p"));
    c.lambda_q = unvec(j.at("lambda_q"));
    c.lambda_s = unvec(j.at("lambda_s"));
    c.gamma_xi = unopt(j, "gamma_xi");
    c.gamma_delta = unopt(j, "gamma_delta");
    c.t_cond = unopt(j, "t_cond");
    c.sens_rho = unopt(j, "sens_rho");
    c.lam_max = j.at("lambda_max").get<double>();
    c.lam_min = j.at("lambda_min").get<double>();
    c.c = j.at("c").get<double>();
    c.c1 = j.at("c1").get<double>();
    c.c2 = j.at("c2").get<double>();
    c.gamma_f = unvec(j.at("gamma_f"));
    c.recheck_ok = j.value("recheck_ok", false);
    c.offgrid_ok = j.value("offgrid_ok", false);
    c.recheck_worst = j.value("recheck_worst", 0.0);
    c.offgrid_worst = j.value("offgrid_worst", 0.0);
    c.message = j.value("message", "");
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("certificate field error: ") + e.what());
  }
}

}  // namespace tvcert::cert
