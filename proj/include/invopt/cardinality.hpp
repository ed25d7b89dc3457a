#pragma once

// Inverse solvers imputing the budgets Gamma of cardinality-constrained
// uncertainty: activating budgets (Gamma-bar, I-hat, Theta), RLO-CCU-DG and
// the closed-form RLO-CCU-SD.

#include "invopt/geometry.hpp"
#include "invopt/lp.hpp"
#include "invopt/model.hpp"
#include "invopt/nominal.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace invopt {

/// Per-row activating budgets at x_hat. `gamma_bar`/`gamma_over` are NaN for
/// rows outside I-hat; `theta_upper` bounds Theta (Gamma-bar-over on I-hat,
/// |J_i| elsewhere). `violated_row` >= 0 means x_hat is nominal-infeasible
/// there and nothing else is filled.
struct GammaBounds {
  std::vector<Index> i_hat;
  Vector gamma_bar;
  Vector gamma_over;
  Vector theta_upper;
  std::vector<bool> interval;  // Gamma-bar not unique on this row
  Index violated_row = -1;
  int evaluations = 0;

  bool in_i_hat(Index i) const { return std::isfinite(gamma_bar(i)); }
};

namespace detail {

inline void require_cardinality(const ForwardProblem& problem, const UncertaintyStructure& structure) {
  check_structure(problem, structure);
  require(structure.kind == UncertaintyKind::Cardinality, ErrorCode::InvalidArgument,
          "alpha: cardinality models need fixed deviations");
}

inline Vector alpha_row(const UncertaintyStructure& structure, Index i) {
  return structure.alpha.row(i).transpose();
}

}  // namespace detail

inline GammaBounds compute_gamma_bounds(const ForwardProblem& problem, const UncertaintyStructure& structure,
                                        const Vector& x_hat) {
  check_dimensions(problem, x_hat);
  detail::require_cardinality(problem, structure);
  const Index m = problem.num_constraints();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  GammaBounds out;
  out.gamma_bar = Vector::Constant(m, nan);
  out.gamma_over = Vector::Constant(m, nan);
  out.theta_upper.resize(m);
  out.interval.assign(static_cast<std::size_t>(m), false);
  const Vector surplus = problem.surplus(x_hat);
  for (Index i = 0; i < m; ++i) {
    if (surplus(i) < -kFeasTol) {
      out.violated_row = i;
      return out;
    }
  }
  for (Index i = 0; i < m; ++i) {
    const auto& cols = structure.row_columns(i);
    const auto r = geometry::gamma_bar(problem, detail::alpha_row(structure, i), cols, x_hat, i);
    ++out.evaluations;
    out.theta_upper(i) = static_cast<double>(cols.size());
    if (r.kind == geometry::GammaBarKind::NotApplicable) continue;
    out.i_hat.push_back(i);
    out.gamma_bar(i) = r.lower;
    out.gamma_over(i) = r.upper;
    out.theta_upper(i) = r.upper;
    out.interval[static_cast<std::size_t>(i)] = r.kind == geometry::GammaBarKind::Interval;
  }
  return out;
}

/// Subproblem i of RLO-CCU-DG over (Gamma, phi_i):
///   minimize -sum_{j in J_i} alpha_ij |x_j| phi_j
///   s.t. sum phi <= Gamma_i, 0 <= phi <= 1, 0 <= Gamma <= theta, G Gamma <= h.
/// t_i is the value plus the nominal surplus of row i.
inline lp::LinearProgram build_ccu_dg_subproblem(const ForwardProblem& problem, const Vector& x_hat,
                                                 const UncertaintyStructure& structure, const Vector& theta_upper,
                                                 const Matrix& G_canonical, const Vector& h, Index i) {
  const Index m = problem.num_constraints();
  const auto& cols = structure.row_columns(i);
  const Index k = static_cast<Index>(cols.size());
  lp::LinearProgram prog(m + k);
  for (Index r = 0; r < m; ++r) prog.set_bounds(r, 0.0, theta_upper(r));
  Vector budget = Vector::Zero(m + k);
  budget(i) = 1.0;
  for (Index q = 0; q < k; ++q) {
    const Index j = cols[static_cast<std::size_t>(q)];
    prog.set_bounds(m + q, 0.0, 1.0);
    prog.objective(m + q) = -structure.alpha(i, j) * std::abs(x_hat(j));
    budget(m + q) = -1.0;
  }
  prog.add_row(std::move(budget), lp::Sense::GreaterEqual, 0.0);
  prog.add_upper_rows(G_canonical, h);
  return prog;
}

inline InverseSolution solve_rlo_ccu_dg(const ForwardProblem& problem, const Vector& x_hat,
                                        const UncertaintyStructure& structure, const SideConstraints& omega) {
  const Index m = problem.num_constraints();
  InverseSolution sol;
  sol.model = ModelKind::RloCcuDg;
  const auto bounds = compute_gamma_bounds(problem, structure, x_hat);
  sol.A = problem.A;
  sol.alpha = structure.alpha;
  sol.stats.gamma_bar_evaluations = bounds.evaluations;
  if (bounds.violated_row >= 0) {
    sol.status = SolveStatus::Infeasible;
    sol.reason = "NominalInfeasible: x_hat violates nominal row " + std::to_string(bounds.violated_row + 1);
    return sol;
  }
  sol.i_hat = bounds.i_hat;
  sol.gamma_bar = bounds.gamma_bar;
  sol.gamma_over = bounds.gamma_over;

  const Matrix G = omega.G.rows() > 0 ? omega.canonical_matrix(m) : Matrix(0, m);
  detail::require(omega.h.size() == G.rows(), ErrorCode::DimensionMismatch, "omega.h: length must equal rows of omega.G");
  std::vector<lp::LinearProgram> lps;
  for (Index i = 0; i < m; ++i)
    lps.push_back(build_ccu_dg_subproblem(problem, x_hat, structure, bounds.theta_upper, G, omega.h, i));
  const auto items = lp::solve_lp_batch(lps);
  const auto summary = detail::summarize_batch(items, problem.surplus(x_hat));
  sol.stats.lp_solves = static_cast<int>(m);
  sol.t = summary.t;
  sol.status = summary.status;
  if (summary.status == SolveStatus::Infeasible) {
    sol.reason = "EmptyThetaOmega: no budget in omega keeps x_hat robust feasible";
    return sol;
  }
  if (summary.status == SolveStatus::UnboundedGap) {
    sol.reason = summary.reason;
    return sol;
  }
  const Index best = summary.best;
  const Vector& z = items[static_cast<std::size_t>(best)].outcome->solution;
  sol.active_row = best;
  sol.gamma = z.head(m);
  const auto& cols = structure.row_columns(best);
  for (Index r = 0; r < m; ++r)
    sol.gamma(r) = std::clamp(sol.gamma(r), 0.0, static_cast<double>(structure.row_columns(r).size()));
  sol.phi = z.tail(static_cast<Index>(cols.size()));
  sol.cost = geometry::realized_row_cardinality(problem.A.row(best).transpose(), detail::alpha_row(structure, best),
                                                sol.gamma(best), cols, x_hat);
  sol.dual_pi = unit_vector(m, best);
  sol.duality_gap = summary.t(best);
  sol.objective_value = sol.duality_gap;
  if (sol.cost.lpNorm<Eigen::Infinity>() <= kTrivialTol) {
    sol.status = SolveStatus::TrivialDetected;
    sol.reason = "imputed cost vector is zero";
  }
  return sol;
}

/// RLO-CCU-SD in closed form. The prior is clamped into [0, |J_i|]. The
/// active row's target budget is the point of [Gamma-bar, Gamma-bar-over]
/// nearest its prior; other rows of I-hat are capped at Gamma-bar-over.
inline InverseSolution solve_rlo_ccu_sd(const ForwardProblem& problem, const Vector& x_hat,
                                        const UncertaintyStructure& structure, const Prior& prior) {
  const Index m = problem.num_constraints();
  detail::require(prior.gamma.size() == m, ErrorCode::DimensionMismatch,
                  "prior.estimates: expected one budget per constraint");
  InverseSolution sol;
  sol.model = ModelKind::RloCcuSd;
  const auto bounds = compute_gamma_bounds(problem, structure, x_hat);
  sol.A = problem.A;
  sol.alpha = structure.alpha;
  sol.stats.gamma_bar_evaluations = bounds.evaluations;
  if (bounds.violated_row >= 0) {
    sol.status = SolveStatus::Infeasible;
    sol.reason = "NominalInfeasible: x_hat violates nominal row " + std::to_string(bounds.violated_row + 1);
    return sol;
  }
  sol.i_hat = bounds.i_hat;
  sol.gamma_bar = bounds.gamma_bar;
  sol.gamma_over = bounds.gamma_over;
  if (bounds.i_hat.empty()) {
    sol.status = SolveStatus::Infeasible;
    sol.reason = "EmptyIhat: no budget can make any row active";
    return sol;
  }

  const Vector gamma_hat = clamp_gamma_prior(prior.gamma, structure);
  sol.f = Vector::Zero(m);
  sol.g = Vector::Zero(m);
  for (Index i : bounds.i_hat) {
    const double target = std::clamp(gamma_hat(i), bounds.gamma_bar(i), bounds.gamma_over(i));
    sol.f(i) = target - gamma_hat(i);
    sol.g(i) = std::min(bounds.gamma_over(i) - gamma_hat(i), 0.0);
  }
  std::vector<double> score(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
  for (Index i : bounds.i_hat) {
    Vector d = sol.g;
    d(i) = sol.f(i);
    score[static_cast<std::size_t>(i)] = norm_of(d, prior.norm);
  }
  const Index best = argmin_lowest(score);
  sol.active_row = best;
  sol.gamma = gamma_hat + sol.g;
  sol.gamma(best) = gamma_hat(best) + sol.f(best);
  sol.cost = geometry::realized_row_cardinality(problem.A.row(best).transpose(), detail::alpha_row(structure, best),
                                                sol.gamma(best), structure.row_columns(best), x_hat);
  sol.dual_pi = unit_vector(m, best);
  sol.duality_gap = 0.0;
  sol.objective_value = score[static_cast<std::size_t>(best)];
  sol.status = SolveStatus::Optimal;
  if (sol.cost.lpNorm<Eigen::Infinity>() <= kTrivialTol) {
    sol.status = SolveStatus::TrivialDetected;
    sol.reason = "imputed cost vector is zero";
  }
  return sol;
}

}  // namespace invopt
