// Acceptance report: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include "faults.hpp"
#include "geometry_checks.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace invopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double d : v) out(k++) = d;
  return out;
}

std::string fmt(const Vector& v) {
  std::ostringstream os;
  os << '(';
  for (Index k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v(k);
  os << ')';
  return os.str();
}

// Collects the failed checks of one criterion.
class Checks {
 public:
  void near(const std::string& what, const Vector& got, const Vector& want, double tol) {
    bool ok = got.size() == want.size();
    for (Index k = 0; ok && k < got.size(); ++k) ok = std::abs(got(k) - want(k)) <= tol;
    if (!ok) fail(what + " = " + fmt(got) + ", expected " + fmt(want));
  }
  void near(const std::string& what, double got, double want, double tol) {
    near(what, Vector::Constant(1, got), Vector::Constant(1, want), tol);
  }
  void equal(const std::string& what, long long got, long long want) {
    if (got != want) fail(what + " = " + std::to_string(got) + ", expected " + std::to_string(want));
  }
  void truth(const std::string& what, bool ok) {
    if (!ok) fail(what);
  }
  void fail(const std::string& what) { failures_.push_back(what); }

  bool ok() const { return failures_.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
};

double median_ms(const std::function<void()>& run, int repeats = 5) {
  std::vector<double> ms;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    run();
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

InverseSolution solve_fixture(int id) { return solve_problem(fixtures::load(id)).solution; }

constexpr double kTol = 1e-6;

Checks criterion1() {
  Checks c;
  const auto sol = solve_fixture(1);
  c.truth("status Optimal", sol.status == SolveStatus::Optimal);
  c.near("t", sol.t, vec({3, 18, 2}), kTol);
  c.equal("i*", sol.active_index(), 3);
  c.near("gap", sol.duality_gap, 2, kTol);
  c.near("c", sol.cost, vec({-2, -2}), kTol);
  c.near("A row 1", sol.A.row(0).transpose(), vec({1, 0}), kTol);
  c.near("A row 2", sol.A.row(1).transpose(), vec({0, 2}), kTol);
  c.near("A row 3", sol.A.row(2).transpose(), vec({-2, -2}), kTol);
  const auto pf = fixtures::load(1);
  const double ms = median_ms([&] { solve_nlo_dg(pf.problem, pf.x_hat, pf.side_constraints()); });
  c.truth("runtime " + std::to_string(ms) + " ms >= 50 ms", ms < 50.0);
  return c;
}

Checks criterion2() {
  Checks c;
  const auto pf = fixtures::load(2);
  const auto sol = solve_fixture(2);
  c.near("f", sol.f, vec({0.6325, 1.8974, 1.2649}), 5e-5);
  c.near("f (two decimals)", sol.f, vec({0.63, 1.90, 1.26}), 0.005 + 1e-12);
  c.equal("i*", sol.active_index(), 1);
  c.near("a1", sol.A.row(0).transpose(), vec({1.2, -0.6}), kTol);
  c.near("a1'x_hat", sol.A.row(0).dot(pf.x_hat), -6.0, 1e-9);
  const auto prior = pf.make_prior();
  const double ms = median_ms([&] { solve_nlo_sd(pf.problem, pf.x_hat, prior); });
  c.truth("runtime " + std::to_string(ms) + " ms >= 10 ms", ms < 10.0);
  return c;
}

Checks criterion3() {
  Checks c;
  const auto sol = solve_fixture(3);
  c.near("t", sol.t, vec({2, 6, 1}), kTol);
  c.equal("i*", sol.active_index(), 3);
  c.near("alpha row 3", sol.alpha.row(2).transpose(), vec({0.5, 1}), kTol);
  c.near("c", sol.cost, vec({-1.5, -2}), kTol);
  return c;
}

Checks criterion4() {
  Checks c;
  const auto sol = solve_fixture(4);
  c.near("t", sol.t, vec({1.5, 1.5, 1}), kTol);
  c.equal("i*", sol.active_index(), 3);
  c.near("alpha row 3", sol.alpha.row(2).transpose(), vec({1, 1}), kTol);
  c.near("c", sol.cost, vec({-1, -2}), kTol);
  return c;
}

Checks criterion5() {
  Checks c;
  const auto sol = solve_fixture(5);
  c.near("t", sol.t, vec({1, 10.2, 4.4}), kTol);
  c.equal("i*", sol.active_index(), 1);
  c.near("Gamma", sol.gamma, vec({0.6, 0.2, 0.2}), kTol);
  c.near("c", sol.cost, vec({2.5, 0}), kTol);
  return c;
}

Checks criterion6() {
  Checks c;
  const auto sol = solve_fixture(6);
  c.truth("I-hat = {1,3}", sol.i_hat == std::vector<Index>{0, 2});
  c.near("Gamma-bar 1", sol.gamma_bar(0), 0.8, kTol);
  c.near("Gamma-bar 3", sol.gamma_bar(2), 1.5, kTol);
  c.equal("i*", sol.active_index(), 3);
  c.near("objective", sol.objective_value, 0.5, kTol);
  c.near("Gamma 3", sol.gamma(2), 1.5, kTol);
  c.near("c", sol.cost, vec({-1, -2}), kTol);
  return c;
}

Remediation remediation(RemediationKind kind, Index row, Index column, double magnitude) {
  Remediation r;
  r.kind = kind;
  r.row = row;
  r.column = column;
  r.magnitude = magnitude;
  return r;
}

Checks criterion7() {
  Checks c;
  const auto pf = fixtures::load(7);
  const auto prior = pf.make_prior();
  const auto sol = solve_fixture(7);
  c.truth("status TrivialDetected", sol.status == SolveStatus::TrivialDetected);
  c.near("a3", sol.A.row(2).transpose(), vec({0, 0}), kTol);
  c.near("c", sol.cost, vec({0, 0}), kTol);
  const auto rhs = perturb_and_resolve(pf.problem, pf.x_hat, prior, remediation(RemediationKind::RhsEpsilon, 2, 0, 0.1));
  c.near("RhsEpsilon a3", rhs.solution.A.row(2).transpose(), vec({0.025, 0.025}), kTol);
  c.near("RhsEpsilon c", rhs.solution.cost, vec({0.025, 0.025}), kTol);
  const auto pe = perturb_and_resolve(pf.problem, pf.x_hat, prior, remediation(RemediationKind::PriorEpsilon, 2, 0, 0.1));
  c.near("PriorEpsilon a3", pe.solution.A.row(2).transpose(), vec({0.005, -0.005}), kTol);
  const auto wb = perturb_and_resolve(pf.problem, pf.x_hat, prior, remediation(RemediationKind::WeightBoost, 2, 0, 10));
  c.near("WeightBoost row 1", wb.solution.A.row(0).transpose(), vec({-0.25, -1.25}), kTol);
  return c;
}

Checks criterion8() {
  Checks c;
  const auto pf = fixtures::load(8);
  const auto prior = pf.make_prior();
  const auto sol = solve_fixture(8);
  c.near("c", sol.cost, vec({1, 0}), kTol);
  c.truth("c nontrivial", sol.cost.lpNorm<Eigen::Infinity>() > kTrivialTol);
  c.near("a3", sol.A.row(2).transpose(), vec({0, 0}), kTol);
  c.truth("status TrivialDetected", sol.status == SolveStatus::TrivialDetected);
  const auto rhs = perturb_and_resolve(pf.problem, pf.x_hat, prior, remediation(RemediationKind::RhsEpsilon, 2, 0, -0.1));
  c.near("RhsEpsilon a3", rhs.solution.A.row(2).transpose(), vec({-0.025, -0.025}), kTol);
  const auto pe = perturb_and_resolve(pf.problem, pf.x_hat, prior, remediation(RemediationKind::PriorEpsilon, 2, 0, 0.1));
  c.near("PriorEpsilon a3", pe.solution.A.row(2).transpose(), vec({0.05, -0.05}), kTol);
  for (const auto& r : sol.remediations)
    c.truth("WeightBoost must not be offered", r.kind != RemediationKind::WeightBoost);
  return c;
}

Checks criterion9() {
  Checks c;
  testkit::Generator g(90);
  for (ModelKind model : testkit::all_models()) {
    const bool lp_model = model != ModelKind::NloSd && model != ModelKind::RloCcuSd;
    const bool card = model == ModelKind::RloCcuDg || model == ModelKind::RloCcuSd;
    for (int trial = 0; trial < 50; ++trial) {
      const auto in = testkit::random_instance(model, g);
      const Index m = in.problem.num_constraints();
      const auto before = lp::invocation_count();
      const auto sol = testkit::solve(in);
      const auto lps = static_cast<long long>(lp::invocation_count() - before);
      const std::string tag = std::string(to_string(model)) + " trial " + std::to_string(trial);
      c.equal(tag + " LP invocations", lps, lp_model ? m : 0);
      c.equal(tag + " reported LP solves", sol.stats.lp_solves, lps);
      if (card) c.truth(tag + " gamma_bar evaluations <= m", sol.stats.gamma_bar_evaluations <= m);
      else c.equal(tag + " gamma_bar evaluations", sol.stats.gamma_bar_evaluations, 0);
    }
  }
  return c;
}

Checks criterion10() {
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  testkit::Generator g(100);
  for (ModelKind model : testkit::all_models()) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto in = testkit::random_instance(model, g);
      const auto a = testkit::agree(in);
      if (!a.ok) c.fail(std::string(to_string(model)) + " trial " + std::to_string(trial) + ": " + a.detail);
    }
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.truth("runtime " + std::to_string(s) + " s >= 300 s", s < 300.0);
  return c;
}

Checks criterion11() {
  Checks c;
  for (const auto& fx : fixtures::kAll) {
    const auto pf = fixtures::load(fx.id);
    const auto sol = solve_problem(pf).solution;
    if (sol.status != SolveStatus::Optimal) continue;
    const auto report = certify(pf, sol);
    c.truth(std::string(fx.file) + " certificate: " + report.reason, report.valid);
    const auto fc = testkit::fault_case(pf, sol);
    for (const auto& group : testkit::fault_groups(pf.model))
      c.truth(std::string(fx.file) + " fault in " + group + " not detected", !testkit::inject_fault(fc, group).valid);
  }
  return c;
}

Checks criterion12() {
  Checks c;
  const std::vector<std::pair<std::string, testkit::PropertyResult>> results = {
      {"Holder", testkit::check_holder(1000, 121)},
      {"projection", testkit::check_projection(1000, 122)},
      {"protection", testkit::check_protection(1000, 123)},
      {"Gamma-bar", testkit::check_gamma_bar(1000, 124)},
      {"full budget", testkit::check_full_budget(1000, 125)},
  };
  for (const auto& [name, r] : results) {
    c.equal(name + " trials", r.trials, 1000);
    c.truth(name + ": " + std::to_string(r.failures) + " failures, " + r.first, r.ok());
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Checks()>>> criteria = {
      {"Example 1 (nlo-dg)", criterion1},
      {"Example 2 (nlo-sd, L2)", criterion2},
      {"Example 3 (rlo-iu-dg)", criterion3},
      {"Example 4 (rlo-iu-sd, L1)", criterion4},
      {"Example 5 (rlo-ccu-dg)", criterion5},
      {"Example 6 (rlo-ccu-sd, L1)", criterion6},
      {"Example 7 (trivial solution and circumventions)", criterion7},
      {"Example 8 (trivial row, nontrivial cost)", criterion8},
      {"subproblem counts", criterion9},
      {"grid oracle agreement", criterion10},
      {"certificates and fault injection", criterion11},
      {"geometry properties", criterion12},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Checks c;
    try {
      c = criteria[k].second();
    } catch (const std::exception& e) {
      c.fail(std::string("exception: ") + e.what());
    }
    std::printf("criterion %zu: %s  %s", k + 1, c.ok() ? "PASS" : "FAIL", criteria[k].first.c_str());
    if (!c.ok()) std::printf("  [%s]", c.summary().c_str());
    std::printf("\n");
    std::fflush(stdout);
    failed += c.ok() ? 0 : 1;
  }
  return failed;
}
