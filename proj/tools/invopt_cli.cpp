// Command-line front end: solve, verify, demo and regions.

#include "invopt/invopt.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace invopt;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTrivial = 3;
constexpr int kExitInvalidCertificate = 4;

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return kExitOk;
    case SolveStatus::Infeasible:
    case SolveStatus::UnboundedGap: return kExitInfeasible;
    case SolveStatus::TrivialDetected: return kExitTrivial;
  }
  return kExitInput;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

void report_validation(const ValidationReport& report) {
  for (const auto& c : report.checks) {
    if (c.verdict != Verdict::Warn && c.verdict != Verdict::Fail) continue;
    std::cerr << to_string(c.verdict) << ": assumption " << c.assumption;
    if (!c.rows.empty()) {
      std::cerr << " rows";
      for (Index i : c.rows) std::cerr << ' ' << i + 1;
    }
    std::cerr << ": " << c.detail << '\n';
  }
}

int run_solve(const std::string& input, const std::string& output) {
  const auto pf = io::load_problem(input);
  const auto result = solve_problem(pf);
  report_validation(result.validation);
  const auto& sol = result.solution;
  std::optional<CertificateReport> cert;
  if (sol.has_solution()) cert = certify(pf, sol);
  write_text(output, io::solution_to_json(sol, cert ? &*cert : nullptr).dump(2) + "\n");
  std::cerr << "status: " << to_string(sol.status);
  if (!sol.reason.empty()) std::cerr << " (" << sol.reason << ")";
  std::cerr << '\n';
  for (const auto& r : sol.remediations)
    std::cerr << "remediation: " << to_string(r.kind) << " row " << r.row + 1 << " magnitude " << r.magnitude
              << (r.heuristic ? " (heuristic)" : "") << '\n';
  return exit_code(sol.status);
}

int run_verify(const std::string& input, const std::string& solution) {
  const auto pf = io::load_problem(input);
  const auto sol = io::parse_solution(io::read_text(solution));
  detail::require(sol.model == pf.model, ErrorCode::InvalidArgument, "solution model does not match the problem");
  const auto report = certify(pf, sol);
  std::cout << "verdict: " << (report.valid ? "Valid" : "Invalid") << '\n';
  for (const auto& g : certificate_groups()) std::cout << "  " << g << ": " << report.residual(g) << '\n';
  if (report.cost_zero) std::cout << "  cost vector is zero\n";
  for (Index i : report.vanishing_rows) std::cout << "  row " << i + 1 << " can vanish\n";
  if (!report.valid) std::cerr << "invalid certificate: " << report.reason << '\n';
  return report.valid ? kExitOk : kExitInvalidCertificate;
}

regions::BoundingBox parse_bbox(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bbox: '" + part + "' is not a number");
    }
  }
  if (v.size() != 4) throw Error(ErrorCode::InvalidArgument, "bbox: expected x0,y0,x1,y1");
  return {v[0], v[1], v[2], v[3]};
}

int run_regions(const std::string& input, const std::string& solution, const std::string& bbox,
                const std::string& output) {
  const auto pf = io::load_problem(input);
  const auto sol = io::parse_solution(io::read_text(solution));
  const auto lines = regions::region_polylines(pf, sol, parse_bbox(bbox));
  write_text(output, regions::regions_to_json(lines).dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// demo

class Report {
 public:
  void value(const std::string& name, const Vector& got, const Vector& want, double tol) {
    bool ok = got.size() == want.size();
    for (Index k = 0; ok && k < got.size(); ++k)
      ok = std::isnan(want(k)) ? std::isnan(got(k)) : std::abs(got(k) - want(k)) <= tol;
    line(name, fmt(got), fmt(want), ok);
  }
  void value(const std::string& name, double got, double want, double tol) {
    value(name, Vector::Constant(1, got), Vector::Constant(1, want), tol);
  }
  void index(const std::string& name, Index got, Index want) {
    line(name, std::to_string(got), std::to_string(want), got == want);
  }
  void text(const std::string& name, const std::string& got, const std::string& want) {
    line(name, got, want, got == want);
  }
  void note(const std::string& text) { std::cout << "  note: " << text << '\n'; }
  int finish() const {
    if (failures_.empty()) {
      std::cout << "all values agree\n";
      return kExitOk;
    }
    for (const auto& f : failures_) std::cerr << "mismatch: " << f << '\n';
    return 5;
  }

  static std::string fmt(const Vector& v) {
    std::ostringstream os;
    os << '(';
    for (Index k = 0; k < v.size(); ++k) {
      if (k) os << ", ";
      if (std::isnan(v(k))) os << '.';
      else os << v(k);
    }
    os << ')';
    return os.str();
  }

 private:
  void line(const std::string& name, const std::string& got, const std::string& want, bool ok) {
    std::printf("  %-22s %-34s expected %-28s %s\n", name.c_str(), got.c_str(), want.c_str(), ok ? "ok" : "MISMATCH");
    if (!ok) failures_.push_back(name);
  }
  std::vector<std::string> failures_;
};

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double d : v) out(k++) = d;
  return out;
}

constexpr double kDerivedTol = 1e-6;
constexpr double kPrintedTol = 0.005 + 1e-12;

int run_demo(int id) {
  const auto& fx = fixtures::get(id);
  const auto pf = fixtures::load(id);
  std::cout << "example " << id << ": " << fx.title << " [" << to_string(pf.model) << "]\n";
  const auto sol = solve_problem(pf).solution;
  Report r;
  r.text("status", std::string(to_string(sol.status)),
         id >= 7 ? "TrivialDetected" : (id == 9 ? "Infeasible" : "Optimal"));
  switch (id) {
    case 1:
      r.value("t", sol.t, vec({3, 18, 2}), kDerivedTol);
      r.index("i*", sol.active_index(), 3);
      r.value("gap", sol.duality_gap, 2, kDerivedTol);
      r.value("c", sol.cost, vec({-2, -2}), kDerivedTol);
      for (Index i = 0; i < 3; ++i)
        r.value("A row " + std::to_string(i + 1), sol.A.row(i).transpose(),
                std::vector<Vector>{vec({1, 0}), vec({0, 2}), vec({-2, -2})}[static_cast<std::size_t>(i)], kDerivedTol);
      break;
    case 2:
      r.value("f (printed)", sol.f, vec({0.63, 1.90, 1.26}), kPrintedTol);
      r.value("f", sol.f, vec({std::sqrt(0.4), 12 / std::sqrt(40.0), 8 / std::sqrt(40.0)}), kDerivedTol);
      r.index("i*", sol.active_index(), 1);
      r.value("a1", sol.A.row(0).transpose(), vec({1.2, -0.6}), kDerivedTol);
      r.note("the printed a1 = (1.2, -6) is not active at x_hat; (1.2, -0.6) is the projection");
      break;
    case 3:
      r.value("t", sol.t, vec({2, 6, 1}), kDerivedTol);
      r.index("i*", sol.active_index(), 3);
      r.value("alpha row 3", sol.alpha.row(2).transpose(), vec({0.5, 1}), kDerivedTol);
      r.value("c", sol.cost, vec({-1.5, -2}), kDerivedTol);
      break;
    case 4:
      r.value("t", sol.t, vec({1.5, 1.5, 1}), kDerivedTol);
      r.index("i*", sol.active_index(), 3);
      r.value("alpha row 3", sol.alpha.row(2).transpose(), vec({1, 1}), kDerivedTol);
      r.value("c", sol.cost, vec({-1, -2}), kDerivedTol);
      break;
    case 5:
      r.value("t", sol.t, vec({1, 10.2, 4.4}), kDerivedTol);
      r.index("i*", sol.active_index(), 1);
      r.value("Gamma", sol.gamma, vec({0.6, 0.2, 0.2}), kDerivedTol);
      r.value("c", sol.cost, vec({2.5, 0}), kDerivedTol);
      break;
    case 6: {
      std::string ih;
      for (Index i : sol.i_hat) ih += (ih.empty() ? "" : ",") + std::to_string(i + 1);
      r.text("I-hat", "{" + ih + "}", "{1,3}");
      r.value("Gamma-bar", sol.gamma_bar, vec({0.8, std::nan(""), 1.5}), kDerivedTol);
      r.index("i*", sol.active_index(), 3);
      r.value("f3", sol.f(2), 0.5, kDerivedTol);
      r.value("objective", sol.objective_value, 0.5, kDerivedTol);
      r.value("c", sol.cost, vec({-1, -2}), kDerivedTol);
      break;
    }
    case 7: {
      r.value("f (printed)", sol.f, vec({1.77, 1.77, 1.41, 2.12}), kPrintedTol);
      r.index("i*", sol.active_index(), 3);
      r.value("a3", sol.A.row(2).transpose(), vec({0, 0}), kDerivedTol);
      r.value("c", sol.cost, vec({0, 0}), kDerivedTol);
      const auto prior = pf.make_prior();
      for (const auto& rem : sol.remediations) {
        const auto next = perturb_and_resolve(pf.problem, pf.x_hat, prior, rem).solution;
        std::cout << "  circumvention " << to_string(rem.kind) << " row " << rem.row + 1 << " magnitude "
                  << rem.magnitude << " -> status " << to_string(next.status) << '\n';
        if (rem.kind == RemediationKind::RhsEpsilon) {
          r.value("  a3", next.A.row(2).transpose(), vec({0.025, 0.025}), kDerivedTol);
          r.value("  c", next.cost, vec({0.025, 0.025}), kDerivedTol);
        } else if (rem.kind == RemediationKind::PriorEpsilon) {
          r.value("  a3", next.A.row(2).transpose(), vec({0.05, -0.05}), kDerivedTol);
          r.note("the printed adjustment (0.005, -0.005) corresponds to a perturbation of 0.01; 0.1 gives (0.05, -0.05)");
        } else {
          r.value("  a1", next.A.row(0).transpose(), vec({-0.25, -1.25}), kDerivedTol);
        }
      }
      break;
    }
    case 8: {
      r.index("i*", sol.active_index(), 1);
      r.value("c", sol.cost, vec({1, 0}), kDerivedTol);
      r.value("a3", sol.A.row(2).transpose(), vec({0, 0}), kDerivedTol);
      const auto prior = pf.make_prior();
      bool weight_boost = false;
      for (const auto& rem : sol.remediations) {
        weight_boost = weight_boost || rem.kind == RemediationKind::WeightBoost;
        const auto next = perturb_and_resolve(pf.problem, pf.x_hat, prior, rem).solution;
        std::cout << "  circumvention " << to_string(rem.kind) << " row " << rem.row + 1 << " magnitude "
                  << rem.magnitude << " -> status " << to_string(next.status) << '\n';
        const Vector want = rem.kind == RemediationKind::RhsEpsilon ? vec({-0.025, -0.025}) : vec({0.05, -0.05});
        r.value("  a3", next.A.row(2).transpose(), want, kDerivedTol);
      }
      r.text("WeightBoost offered", weight_boost ? "yes" : "no", "no");
      break;
    }
    default:
      break;
  }
  return r.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impute constraint and uncertainty-set parameters from an observed decision"};
  app.require_subcommand(1);

  std::string input, output, solution, bbox;
  int example = 0;

  auto* solve = app.add_subcommand("solve", "Solve the inverse problem in a problem document");
  solve->add_option("--input", input, "Problem document (JSON)")->required();
  solve->add_option("--output", output, "Solution document, '-' for stdout")->required();

  auto* demo = app.add_subcommand("demo", "Run an embedded worked example and compare with the expected values");
  demo->add_option("--example", example, "Example number")->required()->check(CLI::Range(1, 8));

  auto* verify = app.add_subcommand("verify", "Check the optimality certificate of a solution");
  verify->add_option("--input", input, "Problem document (JSON)")->required();
  verify->add_option("--solution", solution, "Solution document (JSON)")->required();

  auto* reg = app.add_subcommand("regions", "Boundary segments of the constraints of a two-variable problem");
  reg->add_option("--input", input, "Problem document (JSON)")->required();
  reg->add_option("--solution", solution, "Solution document (JSON)")->required();
  reg->add_option("--bbox", bbox, "x0,y0,x1,y1")->required();
  reg->add_option("--output", output, "Polyline document, '-' for stdout")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*solve) return run_solve(input, output);
    if (*demo) return run_demo(example);
    if (*verify) return run_verify(input, solution);
    if (*reg) return run_regions(input, solution, bbox, output);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
