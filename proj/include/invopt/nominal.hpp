#pragma once

// Inverse solvers for the nominal forward problem: NLO-DG (one LP per row over
// the flattened matrix) and NLO-SD (closed form from the row projections).

#include "invopt/diagnose.hpp"
#include "invopt/geometry.hpp"
#include "invopt/lp.hpp"
#include "invopt/model.hpp"

#include <limits>
#include <string>
#include <vector>

namespace invopt {

/// Subproblem i of NLO-DG over z = vec(A) (row-major, free):
///   minimize a_i' x_hat  s.t.  A x_hat >= b,  G z <= h.
/// Its value minus b_i is t_i.
inline lp::LinearProgram build_nlo_dg_subproblem(const ForwardProblem& problem, const Vector& x_hat,
                                                 const Matrix& G_canonical, const Vector& h, Index i) {
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  lp::LinearProgram prog(m * n);
  prog.objective.segment(i * n, n) = x_hat;
  for (Index k = 0; k < m; ++k) {
    Vector row = Vector::Zero(m * n);
    row.segment(k * n, n) = x_hat;
    prog.add_row(std::move(row), lp::Sense::GreaterEqual, problem.b(k));
  }
  prog.add_upper_rows(G_canonical, h);
  return prog;
}

namespace detail {

inline Matrix unflatten_rows(const Vector& z, Index m, Index n) {
  Matrix A(m, n);
  for (Index i = 0; i < m; ++i) A.row(i) = z.segment(i * n, n).transpose();
  return A;
}

// Shared aggregation for the "one LP per row" solvers: picks the lowest t_i and
// classifies the batch. `offset[i]` is added to subproblem i's LP value.
struct BatchSummary {
  SolveStatus status = SolveStatus::Infeasible;
  Index best = -1;
  Vector t;
  std::string reason;
};

inline BatchSummary summarize_batch(const std::vector<lp::BatchItem>& items, const Vector& offset) {
  BatchSummary s;
  const Index m = static_cast<Index>(items.size());
  s.t = Vector::Constant(m, std::numeric_limits<double>::infinity());
  std::vector<double> values(items.size(), std::numeric_limits<double>::infinity());
  bool unbounded = false;
  for (Index i = 0; i < m; ++i) {
    const auto& item = items[static_cast<std::size_t>(i)];
    if (!item.outcome) throw Error(ErrorCode::NumericalFailure, "subproblem " + std::to_string(i + 1) + ": " + item.error);
    if (item.outcome->status == lp::Status::Unbounded) {
      unbounded = true;
      s.t(i) = -std::numeric_limits<double>::infinity();
    } else if (item.outcome->status == lp::Status::Optimal) {
      s.t(i) = item.outcome->value + offset(i);
      values[static_cast<std::size_t>(i)] = s.t(i);
    }
  }
  if (unbounded) {
    s.status = SolveStatus::UnboundedGap;
    s.reason = "a subproblem is unbounded below";
    return s;
  }
  s.best = argmin_lowest(values);
  s.status = s.best < 0 ? SolveStatus::Infeasible : SolveStatus::Optimal;
  return s;
}

}  // namespace detail

/// NLO-DG: impute A in omega making x_hat feasible with the smallest duality gap.
inline InverseSolution solve_nlo_dg(const ForwardProblem& problem, const Vector& x_hat, const SideConstraints& omega) {
  check_dimensions(problem, x_hat);
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  const Matrix G = omega.G.rows() > 0 ? omega.canonical_matrix(m * n) : Matrix(0, m * n);
  detail::require(omega.h.size() == G.rows(), ErrorCode::DimensionMismatch, "omega.h: length must equal rows of omega.G");

  std::vector<lp::LinearProgram> lps;
  for (Index i = 0; i < m; ++i) lps.push_back(build_nlo_dg_subproblem(problem, x_hat, G, omega.h, i));
  const auto items = lp::solve_lp_batch(lps);
  const auto summary = detail::summarize_batch(items, -problem.b);

  InverseSolution sol;
  sol.model = ModelKind::NloDg;
  sol.stats.lp_solves = static_cast<int>(m);
  sol.t = summary.t;
  sol.status = summary.status;
  if (summary.status == SolveStatus::Infeasible) {
    sol.reason = "no A in omega makes x_hat feasible";
    return sol;
  }
  if (summary.status == SolveStatus::UnboundedGap) {
    sol.reason = summary.reason;
    return sol;
  }
  const Index best = summary.best;
  sol.active_row = best;
  sol.A = detail::unflatten_rows(items[static_cast<std::size_t>(best)].outcome->solution, m, n);
  sol.cost = sol.A.row(best).transpose();
  sol.dual_pi = unit_vector(m, best);
  sol.duality_gap = summary.t(best);
  sol.objective_value = sol.duality_gap;
  if (sol.cost.lpNorm<Eigen::Infinity>() <= kTrivialTol) {
    sol.status = SolveStatus::TrivialDetected;
    sol.reason = "imputed cost vector is zero";
  }
  return sol;
}

/// NLO-SD: impute A closest to the prior (weighted row norms) making x_hat optimal.
inline InverseSolution solve_nlo_sd(const ForwardProblem& problem, const Vector& x_hat, const Prior& prior) {
  check_dimensions(problem, x_hat);
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  detail::require(prior.matrix.rows() == m && prior.matrix.cols() == n, ErrorCode::DimensionMismatch,
                  "prior.estimates: must be m x n");
  if (x_hat.isZero(0.0)) throw Error(ErrorCode::ZeroObservation, "x_hat is the zero vector");
  const Vector xi = prior.weights_or_ones(m);
  detail::require(xi.size() == m, ErrorCode::DimensionMismatch, "prior.xi: expected one weight per constraint");

  InverseSolution sol;
  sol.model = ModelKind::NloSd;
  sol.f.resize(m);
  sol.g.resize(m);
  Matrix A_f(m, n), A_g(m, n);
  std::vector<double> score(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const Vector a_hat = prior.matrix.row(i).transpose();
    const auto pf = geometry::project_hyperplane(a_hat, x_hat, problem.b(i), prior.norm);
    const auto pg = geometry::project_halfspace(a_hat, x_hat, problem.b(i), prior.norm);
    // Rounding noise of a projection onto a hyperplane through the origin.
    const double noise = 1e-12 * (1.0 + a_hat.lpNorm<Eigen::Infinity>());
    auto snap = [noise](double v) { return std::abs(v) <= noise ? 0.0 : v; };
    A_f.row(i) = pf.point.unaryExpr(snap).transpose();
    A_g.row(i) = pg.point.unaryExpr(snap).transpose();
    sol.f(i) = xi(i) * pf.distance;
    sol.g(i) = xi(i) * pg.distance;
    score[static_cast<std::size_t>(i)] = sol.f(i) - sol.g(i);
  }
  const Index best = argmin_lowest(score);
  sol.active_row = best;
  sol.A = A_g;
  sol.A.row(best) = A_f.row(best);
  sol.cost = sol.A.row(best).transpose();
  sol.dual_pi = unit_vector(m, best);
  sol.duality_gap = 0.0;
  sol.objective_value = sol.f(best) + (sol.g.sum() - sol.g(best));
  sol.status = SolveStatus::Optimal;

  const auto zeros = zero_rows(sol.A);
  if (!zeros.empty()) {
    sol.status = SolveStatus::TrivialDetected;
    sol.reason = sol.cost.lpNorm<Eigen::Infinity>() <= kTrivialTol ? "imputed cost vector is zero"
                                                                    : "an imputed constraint row is zero";
    sol.remediations = diagnose_trivial(sol, problem, x_hat, prior);
  }
  return sol;
}

/// Data after a remediation together with the re-solved imputation.
struct PerturbedSolve {
  ForwardProblem problem;
  Prior prior;
  InverseSolution solution;
};

inline PerturbedSolve apply_remediation(const ForwardProblem& problem, const Prior& prior, const Remediation& r) {
  PerturbedSolve out{problem, prior, {}};
  const Index m = problem.num_constraints();
  detail::require(r.row >= 0 && r.row < m, ErrorCode::InvalidArgument, "remediation row out of range");
  switch (r.kind) {
    case RemediationKind::RhsEpsilon:
      out.problem.b(r.row) += r.magnitude;
      break;
    case RemediationKind::PriorEpsilon:
      detail::require(r.column >= 0 && r.column < problem.num_vars(), ErrorCode::InvalidArgument,
                      "remediation column out of range");
      out.prior.matrix(r.row, r.column) += r.magnitude;
      break;
    case RemediationKind::WeightBoost:
      detail::require(r.magnitude >= 0.0, ErrorCode::InvalidArgument, "weights must be nonnegative");
      out.prior.weights = prior.weights_or_ones(m);
      out.prior.weights(r.row) = r.magnitude;
      break;
  }
  return out;
}

/// Apply one remediation and re-run NLO-SD on the perturbed data.
inline PerturbedSolve perturb_and_resolve(const ForwardProblem& problem, const Vector& x_hat, const Prior& prior,
                                          const Remediation& strategy) {
  auto out = apply_remediation(problem, prior, strategy);
  out.solution = solve_nlo_sd(out.problem, x_hat, out.prior);
  return out;
}

}  // namespace invopt
