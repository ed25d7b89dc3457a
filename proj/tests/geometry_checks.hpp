#pragma once

// Randomized property checks of the geometry kernel. Each returns the number
// of failing trials and a description of the first failure.

#include "support.hpp"

#include <sstream>
#include <string>

namespace invopt::testkit {

struct PropertyResult {
  int trials = 0;
  int failures = 0;
  std::string first;

  bool ok() const { return failures == 0; }
  void fail(int trial, const std::string& what) {
    if (failures++ == 0) first = "trial " + std::to_string(trial) + ": " + what;
  }
};

inline Vector random_vector(Generator& g, Index n, double lo, double hi) {
  Vector v(n);
  for (Index j = 0; j < n; ++j) v(j) = g.uniform(lo, hi);
  return v;
}

/// |x'y| <= ||x|| ||y||_* and the maximizer is a unit vector attaining it.
inline PropertyResult check_holder(int trials, std::uint64_t seed) {
  Generator g(seed);
  PropertyResult r;
  for (int t = 0; t < trials; ++t, ++r.trials) {
    const Index n = g.integer(1, 6);
    const NormKind norm = g.norm();
    const Vector x = random_vector(g, n, -3, 3), y = random_vector(g, n, -3, 3);
    const double lhs = std::abs(x.dot(y));
    const double rhs = norm_of(x, norm) * geometry::dual_norm(y, norm);
    if (lhs > rhs + 1e-12 * (1 + rhs)) r.fail(t, "Holder bound violated");
    const Vector v = geometry::dual_norm_maximizer(y, norm);
    if (std::abs(norm_of(v, norm) - 1.0) > 1e-12) r.fail(t, "maximizer is not a unit vector");
    if (std::abs(y.dot(v) - geometry::dual_norm(y, norm)) > 1e-12 * (1 + rhs)) r.fail(t, "maximizer misses the dual norm");
  }
  return r;
}

/// The projections lie on their sets, are at the reported distance, and no
/// sampled point of the set is closer.
inline PropertyResult check_projection(int trials, std::uint64_t seed) {
  Generator g(seed);
  PropertyResult r;
  for (int t = 0; t < trials; ++t, ++r.trials) {
    const Index n = g.integer(1, 4);
    const NormKind norm = g.norm();
    const Vector a_hat = random_vector(g, n, -2, 2);
    Vector x = random_vector(g, n, -2, 2);
    if (x.isZero(0.0)) x(0) = 1.0;
    const double b = g.uniform(-3, 3);
    const auto f = geometry::project_hyperplane(a_hat, x, b, norm);
    const auto h = geometry::project_halfspace(a_hat, x, b, norm);
    if (std::abs(f.point.dot(x) - b) > 1e-9) r.fail(t, "hyperplane projection is off the plane");
    if (h.point.dot(x) < b - 1e-9) r.fail(t, "half-space projection is infeasible");
    if (std::abs(norm_of(f.point - a_hat, norm) - f.distance) > 1e-9) r.fail(t, "hyperplane distance mismatch");
    if (std::abs(norm_of(h.point - a_hat, norm) - h.distance) > 1e-9) r.fail(t, "half-space distance mismatch");
    if (h.distance > f.distance + 1e-12) r.fail(t, "half-space farther than hyperplane");
    // Random points of the hyperplane: move along x's null space and fix one coordinate.
    Index k = 0;
    for (Index j = 1; j < n; ++j)
      if (std::abs(x(j)) > std::abs(x(k))) k = j;
    for (int s = 0; s < 20; ++s) {
      Vector p = a_hat + random_vector(g, n, -1.5, 1.5);
      p(k) += (b - p.dot(x)) / x(k);
      if (norm_of(p - a_hat, norm) < f.distance - 1e-9) {
        r.fail(t, "sampled point closer than the projection");
        break;
      }
      if (p.dot(x) >= b && norm_of(p - a_hat, norm) < h.distance - 1e-9) {
        r.fail(t, "sampled point closer than the half-space projection");
        break;
      }
    }
  }
  return r;
}

/// Protection is concave and piecewise linear in Gamma with breakpoints at
/// the integers, equals the LP protection, and the realized row's surplus loss
/// equals it.
inline PropertyResult check_protection(int trials, std::uint64_t seed) {
  Generator g(seed);
  PropertyResult r;
  for (int t = 0; t < trials; ++t, ++r.trials) {
    const Index n = g.integer(1, 5);
    ColumnSet cols;
    for (Index j = 0; j < n; ++j)
      if (g.coin() || (j == n - 1 && cols.empty())) cols.push_back(j);
    const Vector alpha = random_vector(g, n, 0, 2);
    Vector x = random_vector(g, n, -2, 2);
    if (g.coin()) x(g.integer(0, static_cast<int>(n - 1))) = 0.0;
    const Vector a = random_vector(g, n, -2, 2);
    const double J = static_cast<double>(cols.size());
    auto prot = [&](double gm) { return geometry::protection_value(alpha, gm, cols, x); };

    const double g1 = g.uniform(0, J), g2 = g.uniform(0, J), lam = g.uniform(0, 1);
    if (prot(lam * g1 + (1 - lam) * g2) < lam * prot(g1) + (1 - lam) * prot(g2) - 1e-12) r.fail(t, "not concave");
    // Linear between consecutive integers.
    const double k = std::floor(g.uniform(0, J));
    const double u = g.uniform(0, 1);
    if (k + 1 <= J && std::abs(prot(k + u) - ((1 - u) * prot(k) + u * prot(k + 1))) > 1e-12)
      r.fail(t, "not linear between breakpoints");
    // Slopes are the sorted values.
    const auto sorted = geometry::sort_uncertainty(alpha, cols, x);
    for (std::size_t q = 0; q < sorted.values.size(); ++q)
      if (std::abs(prot(double(q + 1)) - prot(double(q)) - sorted.values[q]) > 1e-12) r.fail(t, "wrong slope");
    std::vector<double> values;
    for (Index j : cols) values.push_back(alpha(j) * std::abs(x(j)));
    const double gm = g.uniform(0, J);
    if (std::abs(prot(gm) - protection_lp(values, gm)) > 1e-9) r.fail(t, "protection differs from LP");
    const auto knap = geometry::knapsack_continuous(values, gm);
    if (std::abs(knap.total - prot(gm)) > 1e-12) r.fail(t, "knapsack total differs");
    const Vector real = geometry::realized_row_cardinality(a, alpha, gm, cols, x);
    if (std::abs((a - real).dot(x) - prot(gm)) > 1e-12) r.fail(t, "realized row loss differs");
    const auto aux = geometry::aux_optimum(alpha, gm, cols, x);
    if (std::abs(aux.value - prot(gm)) > 1e-9) r.fail(t, "auxiliary optimum differs");
  }
  return r;
}

/// Greedy Gamma-bar equals the smallest LP budget reaching the surplus.
inline PropertyResult check_gamma_bar(int trials, std::uint64_t seed) {
  Generator g(seed);
  PropertyResult r;
  for (int t = 0; t < trials; ++t, ++r.trials) {
    const Index n = g.integer(1, 5);
    ColumnSet cols;
    for (Index j = 0; j < n; ++j)
      if (g.coin() || (j == n - 1 && cols.empty())) cols.push_back(j);
    const Vector alpha = random_vector(g, n, 0.1, 2);
    const Vector x = random_vector(g, n, -2, 2);
    double total = 0.0;
    std::vector<double> values;
    for (Index j : cols) {
      values.push_back(alpha(j) * std::abs(x(j)));
      total += values.back();
    }
    ForwardProblem p;
    p.A = random_vector(g, n, -2, 2).transpose();
    const double surplus = g.uniform(0, 1) * total;
    p.b = Vector::Constant(1, p.A.row(0).dot(x) - surplus);
    const auto gb = geometry::gamma_bar(p, alpha, cols, x, 0);
    const double oracle = gamma_bar_lp(values, surplus);
    if (gb.kind != geometry::GammaBarKind::Unique) {
      r.fail(t, "expected a unique Gamma-bar");
      continue;
    }
    if (std::abs(gb.lower - oracle) > 1e-8) {
      std::ostringstream os;
      os << "greedy " << gb.lower << " vs LP " << oracle;
      r.fail(t, os.str());
    }
    if (std::abs(geometry::protection_value(alpha, gb.lower, cols, x) - surplus) > 1e-9) r.fail(t, "Gamma-bar not active");
  }
  return r;
}

/// At full budget the cardinality realization equals the interval one.
inline PropertyResult check_full_budget(int trials, std::uint64_t seed) {
  Generator g(seed);
  PropertyResult r;
  for (int t = 0; t < trials; ++t, ++r.trials) {
    const Index n = g.integer(1, 5);
    ColumnSet cols;
    for (Index j = 0; j < n; ++j)
      if (g.coin() || (j == n - 1 && cols.empty())) cols.push_back(j);
    const Vector alpha = random_vector(g, n, 0, 2);
    Vector x = random_vector(g, n, -2, 2);
    if (g.coin()) x(g.integer(0, static_cast<int>(n - 1))) = 0.0;
    const Vector a = random_vector(g, n, -2, 2);
    const Vector card = geometry::realized_row_cardinality(a, alpha, static_cast<double>(cols.size()), cols, x);
    const Vector inter = geometry::realized_row_interval(a, alpha, cols, x);
    if ((card - inter).lpNorm<Eigen::Infinity>() > 1e-12) r.fail(t, "realizations differ");
  }
  return r;
}

}  // namespace invopt::testkit
