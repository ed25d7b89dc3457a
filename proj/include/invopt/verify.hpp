#pragma once

// Independent checks of inverse solutions: certificate reconstruction with
// named residual groups, and brute-force grid minimization of each model's
// objective built only on the geometry evaluators.

#include "invopt/diagnose.hpp"
#include "invopt/geometry.hpp"
#include "invopt/lp.hpp"
#include "invopt/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace invopt {

// ---------------------------------------------------------------------------
// Certificates

/// Residual groups reported by check_certificate, in report order.
inline const std::vector<std::string>& certificate_groups() {
  static const std::vector<std::string> groups = {"primal",        "side",      "auxiliary", "dual_feasibility",
                                                  "normalization", "duality",   "objective"};
  return groups;
}

struct CertificateReport {
  Certificate certificate;
  bool valid = false;
  std::string reason;
  bool cost_zero = false;
  std::vector<Index> vanishing_rows;  // rows whose realized coefficients can all be zero

  double residual(const std::string& group) const {
    auto it = certificate.residuals.find(group);
    return it == certificate.residuals.end() ? 0.0 : it->second;
  }
};

namespace detail {

inline bool is_interval_model(ModelKind m) { return m == ModelKind::RloIuDg || m == ModelKind::RloIuSd; }
inline bool is_cardinality_model(ModelKind m) { return m == ModelKind::RloCcuDg || m == ModelKind::RloCcuSd; }

// Imputed parameters of a solution in canonical order.
inline Vector canonical_parameters(ModelKind model, const InverseSolution& sol, const UncertaintyStructure& structure) {
  if (model == ModelKind::NloDg || model == ModelKind::NloSd) {
    Vector z(sol.A.size());
    for (Index i = 0; i < sol.A.rows(); ++i) z.segment(i * sol.A.cols(), sol.A.cols()) = sol.A.row(i).transpose();
    return z;
  }
  if (is_interval_model(model)) {
    std::vector<double> z;
    for (std::size_t i = 0; i < structure.columns.size(); ++i)
      for (Index j : structure.columns[i]) z.push_back(sol.alpha(static_cast<Index>(i), j));
    return Eigen::Map<Vector>(z.data(), static_cast<Index>(z.size()));
  }
  return sol.gamma;
}

// Greedy deviation weight of each column of row i at budget gamma.
inline Vector greedy_weights(const Vector& alpha_i, double gamma, const ColumnSet& cols, const Vector& x, Index n) {
  Vector w = Vector::Zero(n);
  const auto sorted = geometry::sort_uncertainty(alpha_i, cols, x);
  const double g = std::clamp(gamma, 0.0, static_cast<double>(cols.size()));
  const auto whole = static_cast<std::size_t>(std::floor(g));
  for (std::size_t k = 0; k < sorted.order.size(); ++k) {
    if (k < whole) w(sorted.order[k]) = 1.0;
    else if (k == whole) w(sorted.order[k]) = g - std::floor(g);
  }
  return w;
}

}  // namespace detail

/// Auxiliary primal and dual blocks of the robust counterpart implied by a
/// solution. The dual multiplier lambda pairs with u + alpha x >= 0 and mu with
/// u - alpha x >= 0, so lambda - mu = -sgn(x_hat_j) on the deviated entries.
inline Certificate build_certificate(ModelKind model, const ForwardProblem& problem, const Vector& x_hat,
                                     const UncertaintyStructure& structure, const InverseSolution& sol) {
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  Certificate cert;
  cert.u = Matrix::Zero(m, n);
  cert.y = Matrix::Zero(m, n);
  cert.z = Vector::Zero(m);
  cert.lambda = Matrix::Zero(m, n);
  cert.mu = Matrix::Zero(m, n);
  cert.phi = Matrix::Zero(m, n);
  if (model == ModelKind::NloDg || model == ModelKind::NloSd) return cert;

  const bool card = detail::is_cardinality_model(model);
  const Matrix& alpha = card ? structure.alpha : sol.alpha;
  for (Index i = 0; i < m; ++i) {
    const auto& cols = structure.row_columns(i);
    const double pi = sol.dual_pi.size() == m ? sol.dual_pi(i) : 0.0;
    Vector weights = Vector::Ones(n);
    if (card) {
      const auto aux = geometry::aux_optimum(alpha.row(i).transpose(), sol.gamma(i), cols, x_hat);
      cert.z(i) = aux.z;
      for (std::size_t k = 0; k < cols.size(); ++k) cert.y(i, cols[k]) = aux.y[k];
      weights = detail::greedy_weights(alpha.row(i).transpose(), sol.gamma(i), cols, x_hat, n);
    }
    for (Index j : cols) {
      cert.u(i, j) = alpha(i, j) * std::abs(x_hat(j));
      const double share = pi * weights(j);
      if (card) cert.phi(i, j) = share;
      if (x_hat(j) < 0.0) cert.lambda(i, j) = share;
      else cert.mu(i, j) = share;
    }
  }
  return cert;
}

/// Residuals of `cert` against the optimality system of `model`. `omega` is
/// used by the gap models, `prior` by the objective check of the
/// strong-duality models; either may be null.
inline CertificateReport evaluate_certificate(ModelKind model, const ForwardProblem& problem, const Vector& x_hat,
                                              const UncertaintyStructure& structure, const InverseSolution& sol,
                                              Certificate cert, const SideConstraints* omega = nullptr,
                                              const Prior* prior = nullptr) {
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  CertificateReport report;
  auto& res = cert.residuals;
  for (const auto& g : certificate_groups()) res[g] = 0.0;
  auto bump = [&](const char* group, double v) { res[group] = std::max(res[group], std::isnan(v) ? 1e300 : v); };

  const bool nominal = model == ModelKind::NloDg || model == ModelKind::NloSd;
  const bool card = detail::is_cardinality_model(model);
  const Matrix& A = nominal ? sol.A : problem.A;
  const Matrix alpha = nominal ? Matrix::Zero(m, n) : (card ? structure.alpha : sol.alpha);
  const Vector pi = sol.dual_pi.size() == m ? sol.dual_pi : Vector::Zero(m);
  const Vector& c = sol.cost;
  if (A.rows() != m || A.cols() != n || c.size() != n || alpha.rows() != m || alpha.cols() != n ||
      (card && sol.gamma.size() != m)) {
    report.reason = "solution blocks have the wrong shape";
    report.certificate = std::move(cert);
    return report;
  }

  // Primal feasibility of x_hat in the (robust) forward problem.
  for (Index i = 0; i < m; ++i) {
    double lhs = A.row(i).dot(x_hat);
    if (!nominal) {
      for (Index j : structure.row_columns(i)) lhs -= card ? cert.y(i, j) : cert.u(i, j);
      if (card) lhs -= sol.gamma(i) * cert.z(i);
    }
    bump("primal", problem.b(i) - lhs);
  }

  // Auxiliary variable constraints.
  if (!nominal) {
    for (Index i = 0; i < m; ++i) {
      const auto& cols = structure.row_columns(i);
      for (Index j : cols) {
        bump("auxiliary", -alpha(i, j));
        bump("auxiliary", alpha(i, j) * x_hat(j) - cert.u(i, j));
        bump("auxiliary", -alpha(i, j) * x_hat(j) - cert.u(i, j));
        if (card) {
          bump("auxiliary", cert.u(i, j) - cert.y(i, j) - cert.z(i));
          bump("auxiliary", -cert.y(i, j));
        }
      }
      if (card) {
        bump("auxiliary", -cert.z(i));
        bump("auxiliary", -sol.gamma(i));
        bump("auxiliary", sol.gamma(i) - static_cast<double>(cols.size()));
      }
    }
  }

  // Side constraints on the imputed parameters.
  if (omega != nullptr && is_gap_model(model) && omega->G.rows() > 0)
    bump("side", omega->violation(detail::canonical_parameters(model, sol, structure)));

  // Dual feasibility.
  Vector recon = A.transpose() * pi;
  for (Index i = 0; i < m; ++i) {
    bump("dual_feasibility", -pi(i));
    if (nominal) continue;
    const auto& cols = structure.row_columns(i);
    double phi_sum = 0.0;
    for (Index j : cols) {
      recon(j) += alpha(i, j) * (cert.lambda(i, j) - cert.mu(i, j));
      bump("dual_feasibility", -cert.lambda(i, j));
      bump("dual_feasibility", -cert.mu(i, j));
      const double target = card ? cert.phi(i, j) : pi(i);
      bump("dual_feasibility", std::abs(cert.lambda(i, j) + cert.mu(i, j) - target));
      if (card) {
        bump("dual_feasibility", -cert.phi(i, j));
        bump("dual_feasibility", cert.phi(i, j) - pi(i));
        phi_sum += cert.phi(i, j);
      }
    }
    if (card) bump("dual_feasibility", phi_sum - sol.gamma(i) * pi(i));
  }
  bump("dual_feasibility", (recon - c).lpNorm<Eigen::Infinity>());

  bump("normalization", std::abs(pi.sum() - 1.0));

  const double gap = c.dot(x_hat) - problem.b.dot(pi);
  if (is_gap_model(model)) {
    bump("duality", std::abs(gap - sol.duality_gap));
    bump("duality", -sol.duality_gap);
    bump("objective", std::abs(sol.objective_value - sol.duality_gap));
  } else {
    bump("duality", std::abs(gap));
    if (prior != nullptr) {
      double deviation = 0.0;
      const Vector xi = prior->weights_or_ones(m);
      if (model == ModelKind::NloSd) {
        for (Index i = 0; i < m; ++i) deviation += xi(i) * norm_of((A.row(i) - prior->matrix.row(i)).transpose(), prior->norm);
      } else if (model == ModelKind::RloIuSd) {
        for (Index i = 0; i < m; ++i) {
          const auto& cols = structure.row_columns(i);
          Vector d(static_cast<Index>(cols.size()));
          for (std::size_t k = 0; k < cols.size(); ++k)
            d(static_cast<Index>(k)) = alpha(i, cols[k]) - prior->matrix(i, cols[k]);
          deviation += xi(i) * norm_of(d, prior->norm);
        }
      } else {
        deviation = norm_of(sol.gamma - clamp_gamma_prior(prior->gamma, structure), prior->norm);
      }
      bump("objective", std::abs(sol.objective_value - deviation));
    }
  }

  // Nontriviality flags.
  report.cost_zero = c.lpNorm<Eigen::Infinity>() <= kTrivialTol;
  for (Index i = 0; i < m; ++i) {
    const Vector a_i = A.row(i).transpose();
    bool vanish = false;
    if (nominal) vanish = a_i.lpNorm<Eigen::Infinity>() <= kTrivialTol;
    else if (card) vanish = geometry::cardinality_row_can_vanish(a_i, alpha.row(i).transpose(), sol.gamma(i), structure.row_columns(i));
    else vanish = geometry::interval_row_can_vanish(a_i, alpha.row(i).transpose(), structure.row_columns(i));
    if (vanish) report.vanishing_rows.push_back(i);
  }

  report.valid = true;
  for (const auto& g : certificate_groups()) {
    if (res[g] > kReportTol) {
      report.valid = false;
      report.reason += (report.reason.empty() ? "" : ", ") + g;
    }
  }
  report.certificate = std::move(cert);
  return report;
}

/// Reconstructs the certificate of `sol` and checks every residual group.
inline CertificateReport check_certificate(ModelKind model, const ForwardProblem& problem, const Vector& x_hat,
                                           const UncertaintyStructure& structure, const InverseSolution& sol,
                                           const SideConstraints* omega = nullptr, const Prior* prior = nullptr) {
  if (!sol.has_solution()) {
    CertificateReport report;
    report.reason = "no solution to certify (status " + std::string(to_string(sol.status)) + ")";
    return report;
  }
  return evaluate_certificate(model, problem, x_hat, structure, sol, build_certificate(model, problem, x_hat, structure, sol),
                              omega, prior);
}

// ---------------------------------------------------------------------------
// Grid oracle

/// Box and step of the exhaustive search, over the canonical parameters.
struct GridOracleSpec {
  ModelKind model = ModelKind::NloDg;
  Vector lower;
  Vector upper;
  double step = 0.05;
};

struct OracleResult {
  double value = std::numeric_limits<double>::infinity();
  Vector argmin;
  Index active_row = -1;
  std::uint64_t points = 0;
};

inline constexpr std::uint64_t kMaxGridPoints = 10'000'000;

namespace detail {

inline std::vector<double> grid_axis(double lo, double hi, double step) {
  std::vector<double> axis;
  if (hi < lo) return axis;
  const auto count = static_cast<std::uint64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::uint64_t k = 0; k < count; ++k) axis.push_back(lo + static_cast<double>(k) * step);
  if (hi - axis.back() > 1e-9) axis.push_back(hi);
  return axis;
}

inline std::uint64_t grid_size(const std::vector<std::vector<double>>& axes) {
  std::uint64_t total = 1;
  for (const auto& a : axes) {
    if (a.empty()) return 0;
    if (total > kMaxGridPoints / a.size() + 1) return kMaxGridPoints + 1;
    total *= a.size();
  }
  return total;
}

inline void decode(std::uint64_t index, const std::vector<std::vector<double>>& axes, Vector& point) {
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::uint64_t size = axes[k].size();
    point(static_cast<Index>(k)) = axes[k][index % size];
    index /= size;
  }
}

// Minimum of `eval` over the product grid; `eval` returns +inf for excluded
// points. Chunked across threads; ties go to the lowest grid index.
template <class Eval>
OracleResult minimize_grid(const std::vector<std::vector<double>>& axes, Eval eval) {
  const std::uint64_t total = grid_size(axes);
  if (total > kMaxGridPoints)
    throw Error(ErrorCode::GridTooLarge, "grid has more than " + std::to_string(kMaxGridPoints) + " points");
  OracleResult out;
  out.points = total;
  if (total == 0) return out;
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(lp::thread_cap(), (total + 4095) / 4096));
  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::uint64_t index = 0;
    Index row = -1;
  };
  std::vector<Best> best(std::max(1u, workers));
  auto run = [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    Vector point(static_cast<Index>(axes.size()));
    for (std::uint64_t k = begin; k < end; ++k) {
      decode(k, axes, point);
      Index row = -1;
      const double v = eval(point, row);
      if (v < best[w].value) best[w] = {v, k, row};
    }
  };
  if (workers <= 1) {
    run(0, 0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(run, w, std::min(total, w * chunk), std::min(total, (w + 1) * chunk));
  }
  Best winner;
  for (const auto& b : best)
    if (b.value < winner.value || (b.value == winner.value && b.index < winner.index)) winner = b;
  if (std::isfinite(winner.value)) {
    out.value = winner.value;
    out.active_row = winner.row;
    out.argmin.resize(static_cast<Index>(axes.size()));
    decode(winner.index, axes, out.argmin);
  }
  return out;
}

inline double min_with_row(const Vector& surplus, Index& row) {
  row = 0;
  for (Index i = 1; i < surplus.size(); ++i)
    if (surplus(i) < surplus(row)) row = i;
  return surplus(row);
}

// Robust surplus of every row under interval half-widths.
inline Vector interval_surplus(const ForwardProblem& problem, const Matrix& alpha, const UncertaintyStructure& s,
                               const Vector& x) {
  Vector out(problem.num_constraints());
  for (Index i = 0; i < out.size(); ++i)
    out(i) = geometry::realized_row_interval(problem.A.row(i).transpose(), alpha.row(i).transpose(), s.row_columns(i), x)
                 .dot(x) -
             problem.b(i);
  return out;
}

}  // namespace detail

/// Exhaustive minimum of the model objective over the grid (times the active
/// row choice for the strong-duality models). The gap models enumerate the
/// full product grid. The strong-duality models are row separable: each row
/// is minimized on its own grid, either kept feasible or made active by
/// solving the activeness equation for one parameter (the coefficient of the
/// largest |x_hat_j|, or the budget found by bisection on the protection).
inline OracleResult brute_force_min(const ForwardProblem& problem, const Vector& x_hat,
                                    const UncertaintyStructure& structure, const SideConstraints* omega,
                                    const Prior* prior, const GridOracleSpec& spec) {
  check_dimensions(problem, x_hat);
  const ModelKind model = spec.model;
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  const Index p = parameter_count(model, problem, structure);
  detail::require(spec.step > 0.0, ErrorCode::InvalidArgument, "grid step must be positive");
  detail::require(spec.lower.size() == p && spec.upper.size() == p, ErrorCode::DimensionMismatch,
                  "grid box must cover every imputed parameter");
  detail::require(spec.lower.allFinite() && spec.upper.allFinite(), ErrorCode::NonFinite, "grid box must be finite");

  std::vector<std::vector<double>> axes;
  for (Index k = 0; k < p; ++k) axes.push_back(detail::grid_axis(spec.lower(k), spec.upper(k), spec.step));
  constexpr double tol = 1e-9;
  const double inf = std::numeric_limits<double>::infinity();

  // Per-row column lists for the canonical layout of interval parameters.
  std::vector<Index> row_start(static_cast<std::size_t>(m) + 1, 0);
  for (Index i = 0; i < m; ++i)
    row_start[static_cast<std::size_t>(i) + 1] =
        row_start[static_cast<std::size_t>(i)] +
        (model == ModelKind::NloDg || model == ModelKind::NloSd ? n : (detail::is_interval_model(model)
                                                                           ? static_cast<Index>(structure.row_columns(i).size())
                                                                           : 1));
  const Matrix G = omega != nullptr && omega->G.rows() > 0 ? omega->canonical_matrix(p) : Matrix(0, p);
  auto in_omega = [&](const Vector& z) {
    if (G.rows() == 0) return true;
    return ((G * z - omega->h).array() <= tol).all();
  };

  if (model == ModelKind::NloDg) {
    return detail::minimize_grid(axes, [&](const Vector& z, Index& row) {
      if (!in_omega(z)) return inf;
      Vector surplus(m);
      for (Index i = 0; i < m; ++i) surplus(i) = z.segment(i * n, n).dot(x_hat) - problem.b(i);
      if ((surplus.array() < -tol).any()) return inf;
      return detail::min_with_row(surplus, row);
    });
  }
  if (model == ModelKind::RloIuDg) {
    return detail::minimize_grid(axes, [&](const Vector& z, Index& row) {
      if ((z.array() < 0.0).any() || !in_omega(z)) return inf;
      Matrix alpha = Matrix::Zero(m, n);
      for (Index i = 0; i < m; ++i) {
        const auto& cols = structure.row_columns(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
          alpha(i, cols[k]) = z(row_start[static_cast<std::size_t>(i)] + static_cast<Index>(k));
      }
      const Vector surplus = detail::interval_surplus(problem, alpha, structure, x_hat);
      if ((surplus.array() < -tol).any()) return inf;
      return detail::min_with_row(surplus, row);
    });
  }
  if (model == ModelKind::RloCcuDg) {
    return detail::minimize_grid(axes, [&](const Vector& z, Index& row) {
      if (!in_omega(z)) return inf;
      Vector surplus(m);
      for (Index i = 0; i < m; ++i) {
        const auto& cols = structure.row_columns(i);
        if (z(i) < 0.0 || z(i) > static_cast<double>(cols.size()) + tol) return inf;
        const double g = std::min(z(i), static_cast<double>(cols.size()));
        surplus(i) = problem.A.row(i).dot(x_hat) - problem.b(i) -
                     geometry::protection_value(structure.alpha.row(i).transpose(), g, cols, x_hat);
      }
      if ((surplus.array() < -tol).any()) return inf;
      return detail::min_with_row(surplus, row);
    });
  }

  // Strong-duality models: per-row minima, kept feasible or made active.
  detail::require(prior != nullptr, ErrorCode::InvalidArgument, "strong-duality oracles need a prior");
  const Vector xi = prior->weights_or_ones(m);
  std::vector<double> keep(static_cast<std::size_t>(m), inf), make(static_cast<std::size_t>(m), inf);
  std::vector<Vector> keep_arg(static_cast<std::size_t>(m)), make_arg(static_cast<std::size_t>(m));
  OracleResult out;

  auto row_axes = [&](Index i) {
    return std::vector<std::vector<double>>(axes.begin() + row_start[static_cast<std::size_t>(i)],
                                            axes.begin() + row_start[static_cast<std::size_t>(i) + 1]);
  };

  if (model == ModelKind::NloSd || model == ModelKind::RloIuSd) {
    const bool interval = model == ModelKind::RloIuSd;
    for (Index i = 0; i < m; ++i) {
      const auto ra = row_axes(i);
      const Index q = static_cast<Index>(ra.size());
      // Column of the row's parameter k, and the prior value.
      auto column = [&](Index k) { return interval ? structure.row_columns(i)[static_cast<std::size_t>(k)] : k; };
      Vector hat(q);
      for (Index k = 0; k < q; ++k) hat(k) = prior->matrix(i, column(k));
      auto surplus_of = [&](const Vector& params) {
        if (!interval) return params.dot(x_hat) - problem.b(i);
        Vector alpha_i = Vector::Zero(n);
        for (Index k = 0; k < q; ++k) alpha_i(column(k)) = params(k);
        return geometry::realized_row_interval(problem.A.row(i).transpose(), alpha_i, structure.row_columns(i), x_hat)
                   .dot(x_hat) -
               problem.b(i);
      };
      auto cost = [&](const Vector& params) { return xi(i) * norm_of(params - hat, prior->norm); };

      auto kept = detail::minimize_grid(ra, [&](const Vector& params, Index&) {
        if (interval && (params.array() < 0.0).any()) return inf;
        return surplus_of(params) >= -tol ? cost(params) : inf;
      });
      out.points += kept.points;
      keep[static_cast<std::size_t>(i)] = kept.value;
      keep_arg[static_cast<std::size_t>(i)] = kept.argmin;

      // Eliminate the parameter multiplying the largest |x_hat_j|.
      Index e = 0;
      for (Index k = 1; k < q; ++k)
        if (std::abs(x_hat(column(k))) > std::abs(x_hat(column(e)))) e = k;
      const double weight = interval ? -std::abs(x_hat(column(e))) : x_hat(column(e));
      if (q == 0 || weight == 0.0) {
        // Activeness cannot be adjusted; the row is active or never.
        auto fixed = detail::minimize_grid(ra, [&](const Vector& params, Index&) {
          if (interval && (params.array() < 0.0).any()) return inf;
          return std::abs(surplus_of(params)) <= tol ? cost(params) : inf;
        });
        out.points += fixed.points;
        make[static_cast<std::size_t>(i)] = fixed.value;
        make_arg[static_cast<std::size_t>(i)] = fixed.argmin;
        continue;
      }
      auto reduced = ra;
      reduced[static_cast<std::size_t>(e)] = {0.0};
      const double lo = spec.lower(row_start[static_cast<std::size_t>(i)] + e);
      const double hi = spec.upper(row_start[static_cast<std::size_t>(i)] + e);
      auto made = detail::minimize_grid(reduced, [&](const Vector& params, Index&) {
        Vector full = params;
        full(e) = 0.0;
        const double rest = surplus_of(full);
        full(e) = -rest / weight;
        if (full(e) < lo - tol || full(e) > hi + tol) return inf;
        if (interval && (full.array() < -tol).any()) return inf;
        return cost(full);
      });
      out.points += made.points;
      make[static_cast<std::size_t>(i)] = made.value;
      if (std::isfinite(made.value)) {
        Vector full = made.argmin;
        full(e) = 0.0;
        full(e) = -surplus_of(full) / weight;
        make_arg[static_cast<std::size_t>(i)] = full;
      }
    }
    std::vector<double> totals(static_cast<std::size_t>(m), inf);
    for (Index a = 0; a < m; ++a) {
      double total = make[static_cast<std::size_t>(a)];
      for (Index i = 0; i < m; ++i)
        if (i != a) total += keep[static_cast<std::size_t>(i)];
      totals[static_cast<std::size_t>(a)] = total;
    }
    const Index a = argmin_lowest(totals, 0.0);
    if (a < 0) return out;
    out.value = totals[static_cast<std::size_t>(a)];
    out.active_row = a;
    out.argmin.resize(p);
    for (Index i = 0; i < m; ++i)
      out.argmin.segment(row_start[static_cast<std::size_t>(i)], row_start[static_cast<std::size_t>(i) + 1] - row_start[static_cast<std::size_t>(i)]) =
          i == a ? make_arg[static_cast<std::size_t>(i)] : keep_arg[static_cast<std::size_t>(i)];
    return out;
  }

  // RLO-CCU-SD. The objective is a monotone norm of |Gamma_i - Gamma-hat_i|, so
  // each row's smallest admissible deviation can be found independently.
  detail::require(prior->gamma.size() == m, ErrorCode::DimensionMismatch, "prior.estimates: one budget per row");
  const Vector gamma_hat = clamp_gamma_prior(prior->gamma, structure);
  for (Index i = 0; i < m; ++i) {
    const auto& cols = structure.row_columns(i);
    const double full = static_cast<double>(cols.size());
    const Vector alpha_i = structure.alpha.row(i).transpose();
    const double surplus = problem.A.row(i).dot(x_hat) - problem.b(i);
    const double lo = std::max(0.0, spec.lower(i));
    const double hi = std::min(full, spec.upper(i));
    auto prot = [&](double g) { return geometry::protection_value(alpha_i, g, cols, x_hat); };

    for (double g : axes[static_cast<std::size_t>(i)]) {
      ++out.points;
      if (g < 0.0 || g > full + tol) continue;
      g = std::min(g, full);
      if (prot(g) <= surplus + tol && std::abs(g - gamma_hat(i)) < keep[static_cast<std::size_t>(i)]) {
        keep[static_cast<std::size_t>(i)] = std::abs(g - gamma_hat(i));
        keep_arg[static_cast<std::size_t>(i)] = Vector::Constant(1, g);
      }
    }
    if (hi < lo || surplus < -tol || prot(hi) < surplus - tol || prot(lo) > surplus + tol) continue;
    // Smallest and largest budget in [lo, hi] whose protection equals the surplus.
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      (prot(mid) >= surplus - tol ? b : a) = mid;
    }
    const double first = b;
    a = lo;
    b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      (prot(mid) <= surplus + tol ? a : b) = mid;
    }
    const double last = a;
    const double g = std::clamp(gamma_hat(i), first, std::max(first, last));
    make[static_cast<std::size_t>(i)] = std::abs(g - gamma_hat(i));
    make_arg[static_cast<std::size_t>(i)] = Vector::Constant(1, g);
  }
  std::vector<double> totals(static_cast<std::size_t>(m), inf);
  for (Index a = 0; a < m; ++a) {
    Vector d(m);
    bool ok = std::isfinite(make[static_cast<std::size_t>(a)]);
    for (Index i = 0; i < m; ++i) {
      d(i) = i == a ? make[static_cast<std::size_t>(i)] : keep[static_cast<std::size_t>(i)];
      ok = ok && std::isfinite(d(i));
    }
    if (ok) totals[static_cast<std::size_t>(a)] = norm_of(d, prior->norm);
  }
  const Index a = argmin_lowest(totals, 0.0);
  if (a < 0) return out;
  out.value = totals[static_cast<std::size_t>(a)];
  out.active_row = a;
  out.argmin.resize(m);
  for (Index i = 0; i < m; ++i)
    out.argmin(i) = (i == a ? make_arg[static_cast<std::size_t>(i)] : keep_arg[static_cast<std::size_t>(i)])(0);
  return out;
}

}  // namespace invopt
