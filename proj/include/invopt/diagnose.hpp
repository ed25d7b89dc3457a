#pragma once

// Trivial-imputation diagnostics for NLO-SD: which rows collapsed to zero and
// which data perturbations are likely to avoid it.

#include "invopt/geometry.hpp"
#include "invopt/model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace invopt {

inline constexpr double kTrivialTol = 1e-9;

/// Rows of `A` whose norm is at most kTrivialTol.
inline std::vector<Index> zero_rows(const Matrix& A, double tol = kTrivialTol) {
  std::vector<Index> rows;
  for (Index i = 0; i < A.rows(); ++i)
    if (A.row(i).lpNorm<Eigen::Infinity>() <= tol) rows.push_back(i);
  return rows;
}

/// Suggested perturbations for a TrivialDetected NLO-SD solution. Empty for
/// any other solution.
///
/// For every zero row k:
///   RhsEpsilon   b_k += 0.1 max(1, |b_k|), signed like a-hat_k' x_hat so the
///                imputed row keeps the orientation of the prior;
///   PriorEpsilon a-hat_k[j] += 0.1 max(1, ||a-hat_k||_inf) on the first column
///                that is not parallel to x_hat (heuristic);
///   WeightBoost  xi_k raised until another row is set active; offered only
///                when k is the active row and its prior is already feasible,
///                since a row that must move to restore feasibility moves
///                whatever the weights.
inline std::vector<Remediation> diagnose_trivial(const InverseSolution& solution, const ForwardProblem& problem,
                                                 const Vector& x_hat, const Prior& prior) {
  std::vector<Remediation> out;
  if (solution.model != ModelKind::NloSd || solution.status != SolveStatus::TrivialDetected) return out;
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  const Vector xi = prior.weights_or_ones(m);

  for (Index k : zero_rows(solution.A)) {
    const Vector a_hat = prior.matrix.row(k).transpose();
    const double direction = sgn(a_hat.dot(x_hat));

    Remediation rhs;
    rhs.kind = RemediationKind::RhsEpsilon;
    rhs.row = k;
    rhs.magnitude = direction * 0.1 * std::max(1.0, std::abs(problem.b(k)));
    rhs.note = "perturb b so the imputed row keeps the prior's orientation";
    out.push_back(rhs);

    Index column = 0;
    if (n > 1) {
      bool parallel_to_first = true;
      for (Index j = 1; j < n; ++j)
        if (x_hat(j) != 0.0) parallel_to_first = false;
      if (parallel_to_first) column = 1;
    }
    Remediation pe;
    pe.kind = RemediationKind::PriorEpsilon;
    pe.row = k;
    pe.column = column;
    pe.magnitude = 0.1 * std::max(1.0, a_hat.lpNorm<Eigen::Infinity>());
    pe.heuristic = true;
    pe.note = "no sufficient perturbation size is known";
    out.push_back(pe);

    const bool prior_feasible = solution.g.size() == m && solution.g(k) <= kFeasTol;
    if (k == solution.active_row && prior_feasible && m >= 2) {
      const double own = geometry::project_hyperplane(a_hat, x_hat, problem.b(k), prior.norm).distance;
      double rival = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i)
        if (i != k) rival = std::min(rival, solution.f(i) - solution.g(i));
      const double needed = own > 0.0 ? rival / own : 0.0;
      Remediation wb;
      wb.kind = RemediationKind::WeightBoost;
      wb.row = k;
      wb.magnitude = std::max(10.0 * xi(k), 2.0 * needed);
      wb.note = "raise the weight so another row is set active";
      out.push_back(wb);
    }
  }
  return out;
}

}  // namespace invopt
