#pragma once

// JSON problem and solution documents (schema_version "1"). Matrices are
// row-major arrays of rows; constraint and column indices are 1-based.

#include "invopt/model.hpp"
#include "invopt/verify.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace invopt::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

struct PriorSection {
  std::optional<json> estimates;  // matrix for nlo-sd, vector for rlo-ccu-sd
  std::optional<Vector> xi;
  std::optional<NormKind> norm;

  bool operator==(const PriorSection&) const = default;
};

struct OmegaSection {
  Matrix G;
  Vector h;
  std::vector<std::string> variable_order;
};

/// A parsed problem document.
struct ProblemFile {
  std::string schema_version = kSchemaVersion;
  ModelKind model = ModelKind::NloDg;
  ForwardProblem problem;
  Vector x_hat;
  std::optional<std::vector<ColumnSet>> uncertain_columns;  // 0-based
  std::optional<Matrix> alpha;                              // m x n, zero outside J_i
  std::optional<OmegaSection> omega;
  std::optional<PriorSection> prior;

  UncertaintyStructure structure() const;
  SideConstraints side_constraints() const;
  Prior make_prior() const;
};

inline bool operator==(const OmegaSection& l, const OmegaSection& r) {
  return l.G == r.G && l.h == r.h && l.variable_order == r.variable_order;
}

inline bool operator==(const ProblemFile& l, const ProblemFile& r) {
  auto same_alpha = [&] {
    if (l.alpha.has_value() != r.alpha.has_value()) return false;
    if (!l.alpha) return true;
    if (l.alpha->rows() != r.alpha->rows() || l.alpha->cols() != r.alpha->cols()) return false;
    for (std::size_t i = 0; i < l.uncertain_columns->size(); ++i)
      for (Index j : (*l.uncertain_columns)[i])
        if ((*l.alpha)(static_cast<Index>(i), j) != (*r.alpha)(static_cast<Index>(i), j)) return false;
    return true;
  };
  return l.schema_version == r.schema_version && l.model == r.model && l.problem.A == r.problem.A &&
         l.problem.b == r.problem.b && l.x_hat == r.x_hat && l.uncertain_columns == r.uncertain_columns &&
         same_alpha() && l.omega == r.omega && l.prior == r.prior;
}

namespace detail {

[[noreturn]] inline void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

inline void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
}

inline const json& member(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing");
  return *it;
}

inline double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

inline Vector vector(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Index>(k)) = number(v[k], field + "[" + std::to_string(k + 1) + "]");
  return out;
}

inline Matrix matrix(const json& v, const std::string& field, Index cols = -1) {
  if (!v.is_array()) fail(field, "expected an array of rows");
  Matrix out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vector row = vector(v[i], field + "[" + std::to_string(i + 1) + "]");
    if (i == 0) {
      if (cols < 0) cols = row.size();
      out.resize(static_cast<Index>(v.size()), cols);
    }
    if (row.size() != cols)
      fail(field + "[" + std::to_string(i + 1) + "]", "expected " + std::to_string(cols) + " entries, got " +
                                                          std::to_string(row.size()));
    out.row(static_cast<Index>(i)) = row.transpose();
  }
  if (v.empty()) out.resize(0, std::max<Index>(cols, 0));
  return out;
}

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) {
    if (std::isfinite(v(k))) out.push_back(v(k));
    else out.push_back(nullptr);
  }
  return out;
}

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

inline Vector nullable_vector(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k)
    out(static_cast<Index>(k)) = v[k].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                : number(v[k], field + "[" + std::to_string(k + 1) + "]");
  return out;
}

inline std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col > 1 ? col - 1 : 1);
}

}  // namespace detail

/// Parse text into JSON, reporting syntax errors as "line:col".
inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "syntax error at " + detail::position(text, e.byte) + ": " + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProblemFile problem_from_json(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) fail("(root)", "expected an object");
  only_keys(doc, "", {"schema_version", "model", "A", "b", "x_hat", "uncertain_columns", "alpha", "omega", "prior"});
  ProblemFile pf;
  const json& version = member(doc, "schema_version", "schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion)
    fail("schema_version", std::string("expected \"") + kSchemaVersion + "\"");
  pf.schema_version = version.get<std::string>();
  const json& model = member(doc, "model", "model");
  if (!model.is_string() || !parse_model_kind(model.get<std::string>()))
    fail("model", "expected one of nlo-dg, nlo-sd, rlo-iu-dg, rlo-iu-sd, rlo-ccu-dg, rlo-ccu-sd");
  pf.model = *parse_model_kind(model.get<std::string>());

  pf.problem.A = matrix(member(doc, "A", "A"), "A");
  const Index m = pf.problem.A.rows();
  const Index n = pf.problem.A.cols();
  if (m == 0 || n == 0) fail("A", "must have at least one row and one column");
  pf.problem.b = vector(member(doc, "b", "b"), "b");
  if (pf.problem.b.size() != m) fail("b", "expected " + std::to_string(m) + " entries");
  pf.x_hat = vector(member(doc, "x_hat", "x_hat"), "x_hat");
  if (pf.x_hat.size() != n) fail("x_hat", "expected " + std::to_string(n) + " entries");

  const bool robust = pf.model != ModelKind::NloDg && pf.model != ModelKind::NloSd;
  const bool card = pf.model == ModelKind::RloCcuDg || pf.model == ModelKind::RloCcuSd;
  if (doc.contains("uncertain_columns")) {
    const json& uc = doc["uncertain_columns"];
    if (!uc.is_array() || static_cast<Index>(uc.size()) != m) fail("uncertain_columns", "expected one array per constraint");
    std::vector<ColumnSet> cols(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < uc.size(); ++i) {
      const std::string field = "uncertain_columns[" + std::to_string(i + 1) + "]";
      if (!uc[i].is_array()) fail(field, "expected an array of column indices");
      for (const auto& c : uc[i]) {
        if (!c.is_number_integer()) fail(field, "expected integer column indices");
        const auto j = c.get<long long>();
        if (j < 1 || j > n) fail(field, "column " + std::to_string(j) + " out of range 1.." + std::to_string(n));
        if (!cols[i].empty() && j - 1 <= cols[i].back()) fail(field, "columns must be strictly increasing");
        cols[i].push_back(static_cast<Index>(j - 1));
      }
    }
    pf.uncertain_columns = std::move(cols);
  } else if (robust) {
    fail("uncertain_columns", "required for robust models");
  }

  if (doc.contains("alpha")) {
    if (!pf.uncertain_columns) fail("alpha", "requires uncertain_columns");
    const json& al = doc["alpha"];
    if (!al.is_array() || static_cast<Index>(al.size()) != m) fail("alpha", "expected one array per constraint");
    Matrix alpha = Matrix::Zero(m, n);
    for (std::size_t i = 0; i < al.size(); ++i) {
      const std::string field = "alpha[" + std::to_string(i + 1) + "]";
      const Vector row = vector(al[i], field);
      const auto& cols = (*pf.uncertain_columns)[i];
      if (row.size() != static_cast<Index>(cols.size())) fail(field, "expected one value per uncertain column");
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (row(static_cast<Index>(k)) < 0.0) fail(field, "entries must be nonnegative");
        alpha(static_cast<Index>(i), cols[k]) = row(static_cast<Index>(k));
      }
    }
    pf.alpha = std::move(alpha);
  } else if (card) {
    fail("alpha", "required for cardinality models");
  } else if (pf.model == ModelKind::RloIuSd) {
    fail("alpha", "prior deviations are required for rlo-iu-sd");
  }

  if (doc.contains("omega")) {
    const json& om = doc["omega"];
    if (!om.is_object()) fail("omega", "expected an object");
    if (!is_gap_model(pf.model)) fail("omega", "side constraints apply to the gap models only");
    only_keys(om, "omega", {"G", "h", "variable_order"});
    OmegaSection sec;
    const auto names = parameter_names(pf.model, pf.problem, pf.structure());
    sec.G = matrix(member(om, "G", "omega.G"), "omega.G", static_cast<Index>(names.size()));
    sec.h = vector(member(om, "h", "omega.h"), "omega.h");
    if (sec.h.size() != sec.G.rows()) fail("omega.h", "expected one entry per row of omega.G");
    if (om.contains("variable_order")) {
      const json& vo = om["variable_order"];
      if (!vo.is_array() || vo.size() != names.size())
        fail("omega.variable_order", "expected " + std::to_string(names.size()) + " parameter names");
      std::set<std::string> seen;
      for (const auto& v : vo) {
        if (!v.is_string()) fail("omega.variable_order", "expected parameter names");
        const auto s = v.get<std::string>();
        if (std::find(names.begin(), names.end(), s) == names.end())
          fail("omega.variable_order", "unknown parameter '" + s + "'");
        if (!seen.insert(s).second) fail("omega.variable_order", "duplicate parameter '" + s + "'");
        sec.variable_order.push_back(s);
      }
    }
    pf.omega = std::move(sec);
  }

  if (doc.contains("prior")) {
    const json& pr = doc["prior"];
    if (!pr.is_object()) fail("prior", "expected an object");
    if (is_gap_model(pf.model)) fail("prior", "priors apply to the strong-duality models only");
    only_keys(pr, "prior", {"estimates", "xi", "norm"});
    PriorSection sec;
    if (pr.contains("estimates")) {
      if (pf.model == ModelKind::NloSd) (void)matrix(pr["estimates"], "prior.estimates", n);
      else if (pf.model == ModelKind::RloCcuSd) (void)vector(pr["estimates"], "prior.estimates");
      else fail("prior.estimates", "rlo-iu-sd takes its prior deviations from alpha");
      sec.estimates = pr["estimates"];
    }
    if (pr.contains("xi")) {
      sec.xi = vector(pr["xi"], "prior.xi");
      if (sec.xi->size() != m) fail("prior.xi", "expected one weight per constraint");
      if ((sec.xi->array() < 0.0).any()) fail("prior.xi", "weights must be nonnegative");
    }
    if (pr.contains("norm")) {
      if (!pr["norm"].is_string() || !parse_norm_kind(pr["norm"].get<std::string>()))
        fail("prior.norm", "expected one of L1, L2, Linf");
      sec.norm = parse_norm_kind(pr["norm"].get<std::string>());
    }
    pf.prior = std::move(sec);
  }
  if (pf.model == ModelKind::RloCcuSd && !(pf.prior && pf.prior->estimates))
    fail("prior.estimates", "budget prior required for rlo-ccu-sd");
  if (pf.model == ModelKind::RloCcuSd && pf.prior->estimates->size() != static_cast<std::size_t>(m))
    fail("prior.estimates", "expected one budget per constraint");
  if (pf.model == ModelKind::NloSd && pf.prior && pf.prior->estimates &&
      pf.prior->estimates->size() != static_cast<std::size_t>(m))
    fail("prior.estimates", "expected " + std::to_string(m) + " rows");
  return pf;
}

inline ProblemFile parse_problem(const std::string& text) { return problem_from_json(parse_json(text)); }

inline ProblemFile load_problem(const std::string& path) { return parse_problem(read_text(path)); }

inline UncertaintyStructure ProblemFile::structure() const {
  const Index m = problem.num_constraints();
  if (!uncertain_columns) return UncertaintyStructure::nominal(m);
  if (model == ModelKind::RloCcuDg || model == ModelKind::RloCcuSd)
    return UncertaintyStructure::cardinality(*uncertain_columns, alpha.value_or(Matrix::Zero(m, problem.num_vars())));
  if (model == ModelKind::NloDg || model == ModelKind::NloSd) {
    auto s = UncertaintyStructure::nominal(m);
    s.columns = *uncertain_columns;
    return s;
  }
  return UncertaintyStructure::interval(*uncertain_columns);
}

inline SideConstraints ProblemFile::side_constraints() const {
  SideConstraints sc;
  const Index p = parameter_count(model, problem, structure());
  if (!omega) {
    sc.G = Matrix(0, p);
    sc.h = Vector(0);
    return sc;
  }
  sc.G = omega->G;
  sc.h = omega->h;
  if (!omega->variable_order.empty()) {
    const auto names = parameter_names(model, problem, structure());
    for (const auto& s : omega->variable_order)
      sc.variable_map.push_back(static_cast<Index>(std::find(names.begin(), names.end(), s) - names.begin()));
  }
  return sc;
}

inline Prior ProblemFile::make_prior() const {
  Prior p;
  const Index m = problem.num_constraints();
  p.norm = prior && prior->norm ? *prior->norm : NormKind::L2;
  if (prior && prior->xi) p.weights = *prior->xi;
  switch (model) {
    case ModelKind::NloSd:
      p.matrix = prior && prior->estimates ? detail::matrix(*prior->estimates, "prior.estimates", problem.num_vars())
                                           : problem.A;
      break;
    case ModelKind::RloIuSd:
      p.matrix = alpha.value_or(Matrix::Zero(m, problem.num_vars()));
      break;
    case ModelKind::RloCcuSd:
      p.gamma = detail::vector(*prior->estimates, "prior.estimates");
      break;
    default:
      break;
  }
  return p;
}

inline json problem_to_json(const ProblemFile& pf) {
  json doc;
  doc["schema_version"] = pf.schema_version;
  doc["model"] = std::string(to_string(pf.model));
  doc["A"] = detail::to_json(pf.problem.A);
  doc["b"] = detail::to_json(pf.problem.b);
  doc["x_hat"] = detail::to_json(pf.x_hat);
  if (pf.uncertain_columns) {
    json uc = json::array();
    for (const auto& cols : *pf.uncertain_columns) {
      json row = json::array();
      for (Index j : cols) row.push_back(j + 1);
      uc.push_back(row);
    }
    doc["uncertain_columns"] = uc;
    if (pf.alpha) {
      json al = json::array();
      for (std::size_t i = 0; i < pf.uncertain_columns->size(); ++i) {
        json row = json::array();
        for (Index j : (*pf.uncertain_columns)[i]) row.push_back((*pf.alpha)(static_cast<Index>(i), j));
        al.push_back(row);
      }
      doc["alpha"] = al;
    }
  }
  if (pf.omega) {
    json om;
    om["G"] = detail::to_json(pf.omega->G);
    om["h"] = detail::to_json(pf.omega->h);
    if (!pf.omega->variable_order.empty()) om["variable_order"] = pf.omega->variable_order;
    doc["omega"] = om;
  }
  if (pf.prior) {
    json pr = json::object();
    if (pf.prior->estimates) pr["estimates"] = *pf.prior->estimates;
    if (pf.prior->xi) pr["xi"] = detail::to_json(*pf.prior->xi);
    if (pf.prior->norm) pr["norm"] = std::string(to_string(*pf.prior->norm));
    doc["prior"] = pr;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Solutions

inline json solution_to_json(const InverseSolution& sol, const CertificateReport* report = nullptr) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["model"] = std::string(to_string(sol.model));
  doc["status"] = std::string(to_string(sol.status));
  if (!sol.reason.empty()) doc["reason"] = sol.reason;
  doc["active_index"] = sol.active_index();
  doc["cost"] = detail::to_json(sol.cost);
  doc["dual_pi"] = detail::to_json(sol.dual_pi);
  doc["duality_gap"] = sol.duality_gap;
  doc["objective_value"] = sol.objective_value;
  if (sol.A.size() > 0) doc["A"] = detail::to_json(sol.A);
  if (sol.alpha.size() > 0) doc["alpha"] = detail::to_json(sol.alpha);
  if (sol.gamma.size() > 0) doc["gamma"] = detail::to_json(sol.gamma);
  if (sol.t.size() > 0) doc["t"] = detail::to_json(sol.t);
  if (sol.f.size() > 0) doc["f"] = detail::to_json(sol.f);
  if (sol.g.size() > 0) doc["g"] = detail::to_json(sol.g);
  if (!sol.i_hat.empty() || sol.gamma_bar.size() > 0) {
    json ih = json::array();
    for (Index i : sol.i_hat) ih.push_back(i + 1);
    doc["i_hat"] = ih;
  }
  if (sol.gamma_bar.size() > 0) doc["gamma_bar"] = detail::to_json(sol.gamma_bar);
  if (sol.gamma_over.size() > 0) doc["gamma_over"] = detail::to_json(sol.gamma_over);
  if (sol.phi.size() > 0) doc["phi"] = detail::to_json(sol.phi);
  json rem = json::array();
  for (const auto& r : sol.remediations) {
    json e;
    e["kind"] = std::string(to_string(r.kind));
    e["row"] = r.row + 1;
    if (r.kind == RemediationKind::PriorEpsilon) e["column"] = r.column + 1;
    e["magnitude"] = r.magnitude;
    e["heuristic"] = r.heuristic;
    if (!r.note.empty()) e["note"] = r.note;
    rem.push_back(e);
  }
  doc["remediations"] = rem;
  doc["stats"] = {{"lp_solves", sol.stats.lp_solves}, {"gamma_bar_evaluations", sol.stats.gamma_bar_evaluations}};
  if (report != nullptr) {
    json cert;
    cert["verdict"] = report->valid ? "Valid" : "Invalid";
    if (!report->reason.empty()) cert["reason"] = report->reason;
    json res = json::object();
    for (const auto& [k, v] : report->certificate.residuals) res[k] = v;
    cert["residuals"] = res;
    cert["cost_zero"] = report->cost_zero;
    json rows = json::array();
    for (Index i : report->vanishing_rows) rows.push_back(i + 1);
    cert["vanishing_rows"] = rows;
    doc["certificate"] = cert;
  }
  return doc;
}

inline InverseSolution solution_from_json(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) fail("(root)", "expected an object");
  InverseSolution sol;
  const json& model = member(doc, "model", "model");
  if (!model.is_string() || !parse_model_kind(model.get<std::string>())) fail("model", "unknown model");
  sol.model = *parse_model_kind(model.get<std::string>());
  const json& status = member(doc, "status", "status");
  if (!status.is_string() || !parse_solve_status(status.get<std::string>())) fail("status", "unknown status");
  sol.status = *parse_solve_status(status.get<std::string>());
  if (doc.contains("reason")) sol.reason = doc["reason"].get<std::string>();
  if (doc.contains("active_index")) sol.active_row = doc["active_index"].get<Index>() - 1;
  if (doc.contains("cost")) sol.cost = vector(doc["cost"], "cost");
  if (doc.contains("dual_pi")) sol.dual_pi = vector(doc["dual_pi"], "dual_pi");
  if (doc.contains("duality_gap")) sol.duality_gap = number(doc["duality_gap"], "duality_gap");
  if (doc.contains("objective_value")) sol.objective_value = number(doc["objective_value"], "objective_value");
  if (doc.contains("A")) sol.A = matrix(doc["A"], "A");
  if (doc.contains("alpha")) sol.alpha = matrix(doc["alpha"], "alpha");
  if (doc.contains("gamma")) sol.gamma = vector(doc["gamma"], "gamma");
  if (doc.contains("t")) sol.t = nullable_vector(doc["t"], "t");
  if (doc.contains("f")) sol.f = vector(doc["f"], "f");
  if (doc.contains("g")) sol.g = vector(doc["g"], "g");
  if (doc.contains("i_hat"))
    for (const auto& i : doc["i_hat"]) sol.i_hat.push_back(i.get<Index>() - 1);
  if (doc.contains("gamma_bar")) sol.gamma_bar = nullable_vector(doc["gamma_bar"], "gamma_bar");
  if (doc.contains("gamma_over")) sol.gamma_over = nullable_vector(doc["gamma_over"], "gamma_over");
  if (doc.contains("phi")) sol.phi = vector(doc["phi"], "phi");
  if (doc.contains("remediations")) {
    for (const auto& e : doc["remediations"]) {
      Remediation r;
      const auto kind = e.at("kind").get<std::string>();
      for (auto k : {RemediationKind::RhsEpsilon, RemediationKind::PriorEpsilon, RemediationKind::WeightBoost})
        if (to_string(k) == kind) r.kind = k;
      r.row = e.at("row").get<Index>() - 1;
      if (e.contains("column")) r.column = e["column"].get<Index>() - 1;
      r.magnitude = e.at("magnitude").get<double>();
      r.heuristic = e.value("heuristic", false);
      r.note = e.value("note", "");
      sol.remediations.push_back(r);
    }
  }
  if (doc.contains("stats")) {
    sol.stats.lp_solves = doc["stats"].value("lp_solves", 0);
    sol.stats.gamma_bar_evaluations = doc["stats"].value("gamma_bar_evaluations", 0);
  }
  return sol;
}

inline InverseSolution parse_solution(const std::string& text) { return solution_from_json(parse_json(text)); }

}  // namespace invopt::io
