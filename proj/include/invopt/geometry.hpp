#pragma once

// Closed-form kernel shared by the inverse solvers: dual norms and their
// maximizers, projections of a prior row onto { a : a'x = b } and
// { a : a'x >= b }, robust row realizations, the cardinality protection
// function, the continuous knapsack and the activating budget Gamma-bar.

#include "invopt/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace invopt::geometry {

/// ||x||_* = max { x'v : ||v|| = 1 }.
inline double dual_norm(const Vector& x, NormKind norm) {
  switch (norm) {
    case NormKind::L1: return norm_of(x, NormKind::Linf);
    case NormKind::L2: return norm_of(x, NormKind::L2);
    case NormKind::Linf: return norm_of(x, NormKind::L1);
  }
  return 0.0;
}

/// A unit vector v (in `norm`) with x'v = ||x||_*. Ties in the L1 case go to
/// the lowest index; zero components get sign +1 in the Linf case.
inline Vector dual_norm_maximizer(const Vector& x, NormKind norm) {
  if (x.size() == 0 || x.isZero(0.0)) throw Error(ErrorCode::ZeroVector, "dual norm maximizer of the zero vector");
  switch (norm) {
    case NormKind::L2: return x / x.norm();
    case NormKind::L1: {
      Index k = 0;
      for (Index j = 1; j < x.size(); ++j)
        if (std::abs(x(j)) > std::abs(x(k))) k = j;
      Vector v = Vector::Zero(x.size());
      v(k) = sgn(x(k));
      return v;
    }
    case NormKind::Linf: {
      Vector v(x.size());
      for (Index j = 0; j < x.size(); ++j) v(j) = sgn(x(j));
      return v;
    }
  }
  return Vector();
}

struct Projection {
  Vector point;
  double distance = 0.0;
};

/// Closest point (in `norm`) to a_hat on the hyperplane { a : a'x_hat = b }
/// and its unweighted distance |a_hat'x_hat - b| / ||x_hat||_*.
inline Projection project_hyperplane(const Vector& a_hat, const Vector& x_hat, double b, NormKind norm) {
  if (x_hat.isZero(0.0)) throw Error(ErrorCode::ZeroVector, "x_hat must be nonzero");
  const double dn = dual_norm(x_hat, norm);
  const double residual = a_hat.dot(x_hat) - b;
  Projection out;
  out.point = a_hat - (residual / dn) * dual_norm_maximizer(x_hat, norm);
  out.distance = std::abs(residual) / dn;
  return out;
}

/// Closest point to a_hat in the half-space { a : a'x_hat >= b }.
inline Projection project_halfspace(const Vector& a_hat, const Vector& x_hat, double b, NormKind norm) {
  if (x_hat.isZero(0.0)) throw Error(ErrorCode::ZeroVector, "x_hat must be nonzero");
  if (a_hat.dot(x_hat) >= b) return {a_hat, 0.0};
  return project_hyperplane(a_hat, x_hat, b, norm);
}

/// Row a_i under interval uncertainty as seen at x: a_ij - sgn(x_j) alpha_ij on J_i.
inline Vector realized_row_interval(const Vector& a_i, const Vector& alpha_i, const ColumnSet& cols,
                                    const Vector& x) {
  Vector out = a_i;
  for (Index j : cols) {
    if (alpha_i(j) < 0.0) throw Error(ErrorCode::InvalidArgument, "alpha must be nonnegative");
    out(j) -= sgn(x(j)) * alpha_i(j);
  }
  return out;
}

/// J_i ordered by alpha_ij |x_j| descending, ties by ascending column.
struct SortedUncertainty {
  std::vector<Index> order;
  std::vector<double> values;
};

inline SortedUncertainty sort_uncertainty(const Vector& alpha_i, const ColumnSet& cols, const Vector& x) {
  SortedUncertainty s;
  s.order = cols;
  std::stable_sort(s.order.begin(), s.order.end(), [&](Index l, Index r) {
    const double vl = alpha_i(l) * std::abs(x(l));
    const double vr = alpha_i(r) * std::abs(x(r));
    if (vl != vr) return vl > vr;
    return l < r;
  });
  for (Index j : s.order) s.values.push_back(alpha_i(j) * std::abs(x(j)));
  return s;
}

namespace detail {

inline void check_budget(double gamma, std::size_t count) {
  const double hi = static_cast<double>(count);
  if (!(gamma >= -kFeasTol && gamma <= hi + kFeasTol))
    throw Error(ErrorCode::InvalidArgument,
                "Gamma " + std::to_string(gamma) + " outside [0, " + std::to_string(count) + "]");
}

// Split a budget into its integer part and the fractional remainder.
inline std::pair<std::size_t, double> split_budget(double gamma, std::size_t count) {
  gamma = std::clamp(gamma, 0.0, static_cast<double>(count));
  const double fl = std::floor(gamma);
  return {static_cast<std::size_t>(fl), gamma - fl};
}

}  // namespace detail

/// Row a_i under cardinality-constrained uncertainty as seen at x: the
/// floor(Gamma) largest alpha_ij |x_j| fully deviated, the next one by the
/// fractional part of Gamma, the rest nominal.
inline Vector realized_row_cardinality(const Vector& a_i, const Vector& alpha_i, double gamma,
                                       const ColumnSet& cols, const Vector& x) {
  detail::check_budget(gamma, cols.size());
  for (Index j : cols)
    if (alpha_i(j) < 0.0) throw Error(ErrorCode::InvalidArgument, "alpha must be nonnegative");
  const auto sorted = sort_uncertainty(alpha_i, cols, x);
  const auto [whole, frac] = detail::split_budget(gamma, cols.size());
  Vector out = a_i;
  for (std::size_t k = 0; k < sorted.order.size(); ++k) {
    const Index j = sorted.order[k];
    double weight = 0.0;
    if (k < whole) weight = 1.0;
    else if (k == whole) weight = frac;
    out(j) -= sgn(x(j)) * alpha_i(j) * weight;
  }
  return out;
}

/// The protection function: largest loss of row surplus at x for budget Gamma.
inline double protection_value(const Vector& alpha_i, double gamma, const ColumnSet& cols, const Vector& x) {
  detail::check_budget(gamma, cols.size());
  const auto sorted = sort_uncertainty(alpha_i, cols, x);
  const auto [whole, frac] = detail::split_budget(gamma, cols.size());
  double total = 0.0;
  for (std::size_t k = 0; k < whole; ++k) total += sorted.values[k];
  if (whole < sorted.values.size()) total += frac * sorted.values[whole];
  return total;
}

struct KnapsackResult {
  std::vector<double> phi;  // in input order
  double total = 0.0;
};

/// max sum v_j phi_j  s.t.  sum phi_j <= capacity, 0 <= phi <= 1, filled
/// greedily by descending value (ties by input position).
inline KnapsackResult knapsack_continuous(const std::vector<double>& values, double capacity) {
  if (capacity < 0.0) throw Error(ErrorCode::InvalidArgument, "knapsack capacity must be nonnegative");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] > values[r]; });
  KnapsackResult out;
  out.phi.assign(values.size(), 0.0);
  double left = capacity;
  for (std::size_t k : order) {
    if (left <= 0.0) break;
    const double take = std::min(1.0, left);
    out.phi[k] = take;
    out.total += take * values[k];
    left -= take;
  }
  return out;
}

enum class GammaBarKind { Unique, Interval, NotApplicable };

struct GammaBarResult {
  GammaBarKind kind = GammaBarKind::NotApplicable;
  double lower = 0.0;  // Gamma-bar
  double upper = 0.0;  // Gamma-bar-over (equals lower when unique)
  std::string reason;
};

/// Number of gamma_bar calls made by this process. Monotone; read deltas.
inline std::atomic<std::uint64_t>& gamma_bar_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

/// Smallest budget whose protection equals the nominal surplus of row i at
/// x_hat, found by inverting the sorted cumulative sums. When the surplus
/// equals the full protection and some alpha_ij |x_j| is zero, every budget in
/// [Gamma-bar, |J_i|] activates the row and an Interval is returned.
inline GammaBarResult gamma_bar(const ForwardProblem& problem, const Vector& alpha_i, const ColumnSet& cols,
                                const Vector& x_hat, Index i) {
  gamma_bar_counter().fetch_add(1, std::memory_order_relaxed);
  const double surplus = problem.A.row(i).dot(x_hat) - problem.b(i);
  const auto sorted = sort_uncertainty(alpha_i, cols, x_hat);
  double total = 0.0;
  for (double v : sorted.values) total += v;
  const double tol = kFeasTol * std::max(1.0, total);

  GammaBarResult out;
  if (surplus < -kFeasTol) {
    out.reason = "x_hat violates nominal row " + std::to_string(i + 1);
    return out;
  }
  if (surplus > total + tol) {
    out.reason = "nominal surplus exceeds the full protection of row " + std::to_string(i + 1);
    return out;
  }
  const double target = std::clamp(surplus, 0.0, total);
  double gamma = 0.0;
  if (target > 0.0) {
    double cum = 0.0;
    gamma = static_cast<double>(sorted.values.size());
    for (std::size_t k = 0; k < sorted.values.size(); ++k) {
      const double v = sorted.values[k];
      if (v > 0.0 && cum + v >= target - tol) {
        gamma = static_cast<double>(k) + std::clamp((target - cum) / v, 0.0, 1.0);
        break;
      }
      cum += v;
    }
  }
  const bool has_zero = std::any_of(sorted.values.begin(), sorted.values.end(), [](double v) { return v == 0.0; });
  out.lower = gamma;
  if (has_zero && std::abs(surplus - total) <= tol) {
    out.kind = GammaBarKind::Interval;
    out.upper = static_cast<double>(cols.size());
  } else {
    out.kind = GammaBarKind::Unique;
    out.upper = gamma;
  }
  return out;
}

/// Optimal (u, y, z) of the auxiliary problem
///   min sum y_j + Gamma z  s.t.  y_j + z >= u_j, |alpha_j x_j| <= u_j, y, z >= 0
/// with u_j = alpha_j |x_j|, z the ceil(Gamma)-th largest u (the largest when
/// Gamma = 0), y_j = max(u_j - z, 0). Vectors are indexed like `cols`.
struct AuxOptimum {
  std::vector<double> u;
  std::vector<double> y;
  double z = 0.0;
  double value = 0.0;
};

inline AuxOptimum aux_optimum(const Vector& alpha_i, double gamma, const ColumnSet& cols, const Vector& x_hat) {
  detail::check_budget(gamma, cols.size());
  const auto sorted = sort_uncertainty(alpha_i, cols, x_hat);
  AuxOptimum out;
  if (!cols.empty()) {
    const double g = std::clamp(gamma, 0.0, static_cast<double>(cols.size()));
    const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(g - 1e-12)));
    out.z = sorted.values[rank - 1];
  }
  for (Index j : cols) {
    const double u = alpha_i(j) * std::abs(x_hat(j));
    out.u.push_back(u);
    out.y.push_back(std::max(u - out.z, 0.0));
  }
  out.value = std::accumulate(out.y.begin(), out.y.end(), 0.0) + gamma * out.z;
  return out;
}

/// True when the interval-realized row can be the zero vector for some x:
/// every certain coefficient is zero and every uncertain one has |a_ij| = alpha_ij.
inline bool interval_row_can_vanish(const Vector& a_i, const Vector& alpha_i, const ColumnSet& cols,
                                    double tol = kFeasTol) {
  for (Index j = 0; j < a_i.size(); ++j) {
    const bool uncertain = std::find(cols.begin(), cols.end(), j) != cols.end();
    if (uncertain) {
      if (std::abs(std::abs(a_i(j)) - alpha_i(j)) > tol) return false;
    } else if (std::abs(a_i(j)) > tol) {
      return false;
    }
  }
  return true;
}

/// True when the cardinality-realized row at budget Gamma can be the zero
/// vector for some x. A realization deviates floor(Gamma) coefficients fully,
/// one by frac(Gamma) and the rest not at all, with any assignment of columns
/// to those slots reachable by choosing |x_j|; the row vanishes iff the weights
/// |a_ij| / alpha_ij can be matched to the slots.
inline bool cardinality_row_can_vanish(const Vector& a_i, const Vector& alpha_i, double gamma,
                                       const ColumnSet& cols, double tol = kFeasTol) {
  const auto [whole, frac] = detail::split_budget(gamma, cols.size());
  std::vector<double> slots(cols.size(), 0.0);
  for (std::size_t k = 0; k < whole; ++k) slots[k] = 1.0;
  if (whole < slots.size()) slots[whole] = frac;

  std::size_t free_columns = 0;
  for (Index j = 0; j < a_i.size(); ++j) {
    const bool uncertain = std::find(cols.begin(), cols.end(), j) != cols.end();
    if (!uncertain) {
      if (std::abs(a_i(j)) > tol) return false;
      continue;
    }
    if (alpha_i(j) <= tol) {
      if (std::abs(a_i(j)) > tol) return false;
      ++free_columns;  // any slot works
      continue;
    }
    const double need = std::abs(a_i(j)) / alpha_i(j);
    auto it = std::find_if(slots.begin(), slots.end(), [&](double s) { return std::abs(s - need) <= tol; });
    if (it == slots.end()) return false;
    slots.erase(it);
  }
  return slots.size() == free_columns;
}

}  // namespace invopt::geometry
