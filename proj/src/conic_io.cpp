// Line-oriented sparse text format:
//   conic 1
//   vars <n>
//   obj <var> <value>                      (nonzero objective entries)
//   cone <index> psd <dim> | nonneg <count> [loose]
//   <constraint> <var|-1> <row> <col> <value>
// Matrix entries are lower-triangular (row >= col) in natural, unscaled units;
// nonneg cones use row = col = entry index.
#include "tvcert/conic.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tvcert::conic {

namespace {

void write_entries(std::ostream& os, int ci, int var, const Cone& cone, const VectorXd& v) {
  if (cone.kind == Cone::Kind::Nonneg) {
    for (int i = 0; i < v.size(); ++i)
      if (v(i) != 0.0) os << ci << ' ' << var << ' ' << i << ' ' << i << ' ' << v(i) << '\n';
    return;
  }
  MatrixXd S = smat(v);
  for (int j = 0; j < S.cols(); ++j)
    for (int i = j; i < S.rows(); ++i)
      if (S(i, j) != 0.0) os << ci << ' ' << var << ' ' << i << ' ' << j << ' ' << S(i, j) << '\n';
}

}  // namespace

void dump(const ConicProblem& p, std::ostream& os) {
  p.validate();
  os << std::setprecision(17);
  os << "conic 1\n";
  os << "vars " << p.n_vars << '\n';
  for (int i = 0; i < p.objective.size(); ++i)
    if (p.objective(i) != 0.0) os << "obj " << i << ' ' << p.objective(i) << '\n';
  for (size_t c = 0; c < p.constraints.size(); ++c) {
    const auto& con = p.constraints[c];
    os << "cone " << c << ' ' << (con.cone.kind == Cone::Kind::Psd ? "psd " : "nonneg ") << con.cone.dim
       << (con.strict ? "" : " loose") << '\n';
  }
  for (size_t c = 0; c < p.constraints.size(); ++c) {
    const auto& con = p.constraints[c];
    write_entries(os, static_cast<int>(c), -1, con.cone, con.constant);
    for (const auto& [var, coef] : con.terms) write_entries(os, static_cast<int>(c), var, con.cone, coef);
  }
}

ConicProblem load(std::istream& is) {
  ConicProblem p;
  std::string line;
  std::vector<std::map<int, MatrixXd>> mats;  // per constraint: var -> dense (psd) or diag column
  auto fail = [](const std::string& msg) { throw std::invalid_argument("conic load: " + msg); };

  if (!std::getline(is, line) || line.rfind("conic", 0) != 0) fail("missing header");
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "vars") {
      ls >> p.n_vars;
      p.objective = VectorXd::Zero(p.n_vars);
    } else if (head == "obj") {
      int i;
      double v;
      if (!(ls >> i >> v) || i < 0 || i >= p.n_vars) fail("bad objective record");
      p.objective(i) = v;
    } else if (head == "cone") {
      int idx, dim;
      std::string kind;
      if (!(ls >> idx >> kind >> dim) || idx != static_cast<int>(p.constraints.size())) fail("bad cone record");
      Constraint c;
      if (kind == "psd")
        c.cone = Cone::psd(dim);
      else if (kind == "nonneg")
        c.cone = Cone::nonneg(dim);
      else
        fail("unknown cone kind " + kind);
      std::string flag;
      if (ls >> flag) {
        if (flag != "loose") fail("unknown cone flag " + flag);
        c.strict = false;
      }
      p.constraints.push_back(c);
      mats.emplace_back();
    } else {
      std::istringstream es(line);
      int ci, var, r, col;
      double v;
      if (!(es >> ci >> var >> r >> col >> v)) fail("bad entry: " + line);
      if (ci < 0 || ci >= static_cast<int>(p.constraints.size())) fail("entry for undeclared cone");
      const Cone& cone = p.constraints[ci].cone;
      if (r < 0 || col < 0 || r >= cone.dim || col >= cone.dim) fail("entry out of range");
      auto& m = mats[ci];
      auto it = m.find(var);
      if (it == m.end()) {
        it = m.emplace(var, cone.kind == Cone::Kind::Psd ? MatrixXd::Zero(cone.dim, cone.dim)
                                                          : MatrixXd::Zero(cone.dim, 1))
                 .first;
      }
      if (cone.kind == Cone::Kind::Psd) {
        it->second(r, col) = v;
        it->second(col, r) = v;
      } else {
        it->second(r, 0) = v;
      }
    }
  }
  for (size_t c = 0; c < p.constraints.size(); ++c) {
    auto& con = p.constraints[c];
    auto to_vec = [&](const MatrixXd& M) -> VectorXd {
      return con.cone.kind == Cone::Kind::Psd ? svec(M) : VectorXd(M.col(0));
    };
    con.constant = VectorXd::Zero(con.cone.storage());
    for (const auto& [var, M] : mats[c]) {
      if (var == -1)
        con.constant = to_vec(M);
      else
        con.terms[var] = to_vec(M);
    }
  }
  p.validate();
  return p;
}

}  // namespace tvcert::conic
