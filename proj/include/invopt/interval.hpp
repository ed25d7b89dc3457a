#pragma once

// Inverse solvers imputing the interval half-widths alpha: RLO-IU-DG (gap
// minimization under side constraints) and RLO-IU-SD (closest alpha to a prior
// that makes x_hat optimal, L1 or Linf).

#include "invopt/geometry.hpp"
#include "invopt/lp.hpp"
#include "invopt/model.hpp"
#include "invopt/nominal.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace invopt {

namespace detail {

// Canonical position of alpha_ij for j in J_i.
struct AlphaLayout {
  std::vector<std::pair<Index, Index>> entries;  // (i, j) in canonical order
  std::vector<Index> row_start;

  explicit AlphaLayout(const UncertaintyStructure& s) {
    for (std::size_t i = 0; i < s.columns.size(); ++i) {
      row_start.push_back(static_cast<Index>(entries.size()));
      for (Index j : s.columns[i]) entries.emplace_back(static_cast<Index>(i), j);
    }
    row_start.push_back(static_cast<Index>(entries.size()));
  }
  Index size() const { return static_cast<Index>(entries.size()); }

  Matrix to_matrix(const Vector& z, Index m, Index n) const {
    Matrix out = Matrix::Zero(m, n);
    for (Index k = 0; k < size(); ++k) out(entries[k].first, entries[k].second) = z(k);
    return out;
  }
  Vector to_canonical(const Matrix& alpha) const {
    Vector z(size());
    for (Index k = 0; k < size(); ++k) z(k) = alpha(entries[k].first, entries[k].second);
    return z;
  }
};

inline void require_interval(const ForwardProblem& problem, const UncertaintyStructure& structure) {
  check_structure(problem, structure);
  require(static_cast<Index>(structure.columns.size()) == problem.num_constraints(), ErrorCode::InvalidArgument,
          "uncertain_columns: required for interval models");
  for (Index i = 0; i < problem.num_constraints(); ++i)
    require(!structure.row_columns(i).empty(), ErrorCode::InvalidArgument,
            "uncertain_columns[" + std::to_string(i + 1) + "]: J_i must be nonempty");
}

// Robust feasibility rows  -sum_j |x_j| alpha_kj >= b_k - a_k' x_hat  for every k
// except `equality_row`, which is imposed with equality.
inline void add_robust_rows(lp::LinearProgram& prog, const AlphaLayout& layout, const ForwardProblem& problem,
                            const Vector& x_hat, Index equality_row) {
  const Index m = problem.num_constraints();
  for (Index k = 0; k < m; ++k) {
    Vector row = Vector::Zero(prog.num_vars());
    for (Index q = layout.row_start[k]; q < layout.row_start[k + 1]; ++q)
      row(q) = -std::abs(x_hat(layout.entries[q].second));
    const double rhs = problem.b(k) - problem.A.row(k).dot(x_hat);
    prog.add_row(std::move(row), k == equality_row ? lp::Sense::Equal : lp::Sense::GreaterEqual, rhs);
  }
}

}  // namespace detail

/// Subproblem i of RLO-IU-DG over the canonical alpha (nonnegative):
///   minimize -sum_{j in J_i} |x_j| alpha_ij  s.t. robust feasibility, G alpha <= h.
/// t_i is the value plus the nominal surplus of row i.
inline lp::LinearProgram build_iu_dg_subproblem(const ForwardProblem& problem, const Vector& x_hat,
                                                const UncertaintyStructure& structure, const Matrix& G_canonical,
                                                const Vector& h, Index i) {
  const detail::AlphaLayout layout(structure);
  lp::LinearProgram prog(layout.size());
  for (Index q = 0; q < layout.size(); ++q) prog.set_nonnegative(q);
  for (Index q = layout.row_start[i]; q < layout.row_start[i + 1]; ++q)
    prog.objective(q) = -std::abs(x_hat(layout.entries[q].second));
  detail::add_robust_rows(prog, layout, problem, x_hat, -1);
  prog.add_upper_rows(G_canonical, h);
  return prog;
}

inline InverseSolution solve_rlo_iu_dg(const ForwardProblem& problem, const Vector& x_hat,
                                       const UncertaintyStructure& structure, const SideConstraints& omega) {
  check_dimensions(problem, x_hat);
  detail::require_interval(problem, structure);
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  const detail::AlphaLayout layout(structure);
  const Matrix G = omega.G.rows() > 0 ? omega.canonical_matrix(layout.size()) : Matrix(0, layout.size());
  detail::require(omega.h.size() == G.rows(), ErrorCode::DimensionMismatch, "omega.h: length must equal rows of omega.G");

  std::vector<lp::LinearProgram> lps;
  for (Index i = 0; i < m; ++i) lps.push_back(build_iu_dg_subproblem(problem, x_hat, structure, G, omega.h, i));
  const auto items = lp::solve_lp_batch(lps);
  const auto summary = detail::summarize_batch(items, problem.surplus(x_hat));

  InverseSolution sol;
  sol.model = ModelKind::RloIuDg;
  sol.stats.lp_solves = static_cast<int>(m);
  sol.t = summary.t;
  sol.status = summary.status;
  sol.A = problem.A;
  if (summary.status == SolveStatus::Infeasible) {
    sol.reason = "no nonnegative alpha in omega keeps x_hat robust feasible";
    return sol;
  }
  if (summary.status == SolveStatus::UnboundedGap) {
    sol.reason = summary.reason;
    return sol;
  }
  const Index best = summary.best;
  sol.active_row = best;
  sol.alpha = layout.to_matrix(items[static_cast<std::size_t>(best)].outcome->solution, m, n);
  sol.cost = geometry::realized_row_interval(problem.A.row(best).transpose(), sol.alpha.row(best).transpose(),
                                             structure.row_columns(best), x_hat);
  sol.dual_pi = unit_vector(m, best);
  sol.duality_gap = summary.t(best);
  sol.objective_value = sol.duality_gap;
  if (sol.cost.lpNorm<Eigen::Infinity>() <= kTrivialTol) {
    sol.status = SolveStatus::TrivialDetected;
    sol.reason = "imputed cost vector is zero";
  }
  return sol;
}

/// Subproblem i of RLO-IU-SD: the epigraph LP of
///   minimize sum_k xi_k ||alpha_k - alpha-hat_k||  s.t. row i active, all rows
///   robust feasible, alpha >= 0.
/// L1 uses one deviation variable per alpha entry, Linf one per row.
inline lp::LinearProgram build_iu_sd_subproblem(const ForwardProblem& problem, const Vector& x_hat,
                                                const UncertaintyStructure& structure, const Prior& prior, Index i) {
  if (prior.norm == NormKind::L2)
    throw Error(ErrorCode::UnsupportedNorm, "rlo-iu-sd supports the L1 and Linf norms only");
  const detail::AlphaLayout layout(structure);
  const Index m = problem.num_constraints();
  const Index p = layout.size();
  const Vector xi = prior.weights_or_ones(m);
  const bool l1 = prior.norm == NormKind::L1;
  const Index extra = l1 ? p : m;
  lp::LinearProgram prog(p + extra);
  for (Index q = 0; q < p; ++q) prog.set_nonnegative(q);
  for (Index e = 0; e < extra; ++e) prog.set_nonnegative(p + e);
  detail::add_robust_rows(prog, layout, problem, x_hat, i);
  for (Index q = 0; q < p; ++q) {
    const auto [row, col] = layout.entries[q];
    const Index d = l1 ? p + q : p + row;
    const double hat = prior.matrix(row, col);
    Vector up = Vector::Zero(p + extra), down = Vector::Zero(p + extra);
    up(d) = 1.0;
    up(q) = -1.0;  // d - alpha >= -hat
    down(d) = 1.0;
    down(q) = 1.0;  // d + alpha >= hat
    prog.add_row(std::move(up), lp::Sense::GreaterEqual, -hat);
    prog.add_row(std::move(down), lp::Sense::GreaterEqual, hat);
  }
  for (Index e = 0; e < extra; ++e) prog.objective(p + e) = xi(l1 ? layout.entries[e].first : e);
  return prog;
}

inline InverseSolution solve_rlo_iu_sd(const ForwardProblem& problem, const Vector& x_hat,
                                       const UncertaintyStructure& structure, const Prior& prior) {
  check_dimensions(problem, x_hat);
  detail::require_interval(problem, structure);
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  detail::require(prior.matrix.rows() == m && prior.matrix.cols() == n, ErrorCode::DimensionMismatch,
                  "alpha: prior deviations must be given for rlo-iu-sd");
  if (prior.norm == NormKind::L2)
    throw Error(ErrorCode::UnsupportedNorm, "rlo-iu-sd supports the L1 and Linf norms only");

  InverseSolution sol;
  sol.model = ModelKind::RloIuSd;
  sol.A = problem.A;
  const Vector surplus = problem.surplus(x_hat);
  for (Index i = 0; i < m; ++i) {
    if (surplus(i) < -kFeasTol) {
      sol.status = SolveStatus::Infeasible;
      sol.reason = "x_hat violates nominal row " + std::to_string(i + 1);
      return sol;
    }
  }

  const detail::AlphaLayout layout(structure);
  std::vector<lp::LinearProgram> lps;
  for (Index i = 0; i < m; ++i) lps.push_back(build_iu_sd_subproblem(problem, x_hat, structure, prior, i));
  const auto items = lp::solve_lp_batch(lps);
  const auto summary = detail::summarize_batch(items, Vector::Zero(m));
  sol.stats.lp_solves = static_cast<int>(m);
  sol.t = summary.t;
  sol.status = summary.status;
  if (summary.status != SolveStatus::Optimal) {
    sol.reason = summary.status == SolveStatus::Infeasible ? "no row can be made active" : summary.reason;
    return sol;
  }
  const Index best = summary.best;
  sol.active_row = best;
  sol.alpha = layout.to_matrix(items[static_cast<std::size_t>(best)].outcome->solution.head(layout.size()), m, n);
  sol.cost = geometry::realized_row_interval(problem.A.row(best).transpose(), sol.alpha.row(best).transpose(),
                                             structure.row_columns(best), x_hat);
  sol.dual_pi = unit_vector(m, best);
  sol.duality_gap = 0.0;
  sol.objective_value = summary.t(best);
  if (sol.cost.lpNorm<Eigen::Infinity>() <= kTrivialTol) {
    sol.status = SolveStatus::TrivialDetected;
    sol.reason = "imputed cost vector is zero";
  }
  return sol;
}

/// sum_k xi_k ||alpha_k - alpha-hat_k|| over the uncertain entries.
inline double interval_prior_deviation(const Matrix& alpha, const UncertaintyStructure& structure, const Prior& prior) {
  const Index m = static_cast<Index>(structure.columns.size());
  const Vector xi = prior.weights_or_ones(m);
  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    const auto& cols = structure.row_columns(i);
    Vector d(static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
      d(static_cast<Index>(k)) = alpha(i, cols[k]) - prior.matrix(i, cols[k]);
    total += xi(i) * norm_of(d, prior.norm);
  }
  return total;
}

}  // namespace invopt
