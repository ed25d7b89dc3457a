#pragma once

// Shared helpers for the test suite and the acceptance binary: random
// instances with a grid box and an agreement tolerance, and small oracles that
// do not go through the solvers under test.

#include "invopt/invopt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace invopt::testkit {

constexpr double kGridStep = 0.05;

struct Instance {
  ModelKind model = ModelKind::NloDg;
  ForwardProblem problem;
  Vector x_hat;
  UncertaintyStructure structure;
  SideConstraints omega;
  Prior prior;
  GridOracleSpec spec;
  double tolerance = 0.0;  // allowed gap between grid and exact optimum
};

inline InverseSolution solve(const Instance& in) {
  switch (in.model) {
    case ModelKind::NloDg: return solve_nlo_dg(in.problem, in.x_hat, in.omega);
    case ModelKind::NloSd: return solve_nlo_sd(in.problem, in.x_hat, in.prior);
    case ModelKind::RloIuDg: return solve_rlo_iu_dg(in.problem, in.x_hat, in.structure, in.omega);
    case ModelKind::RloIuSd: return solve_rlo_iu_sd(in.problem, in.x_hat, in.structure, in.prior);
    case ModelKind::RloCcuDg: return solve_rlo_ccu_dg(in.problem, in.x_hat, in.structure, in.omega);
    case ModelKind::RloCcuSd: return solve_rlo_ccu_sd(in.problem, in.x_hat, in.structure, in.prior);
  }
  return {};
}

inline OracleResult grid_oracle(const Instance& in) {
  const bool gap = is_gap_model(in.model);
  return brute_force_min(in.problem, in.x_hat, in.structure, gap ? &in.omega : nullptr, gap ? nullptr : &in.prior,
                         in.spec);
}

/// Value the grid oracle minimizes, read off a solver result.
inline double model_value(const Instance& in, const InverseSolution& sol) {
  return is_gap_model(in.model) ? sol.duality_gap : sol.objective_value;
}

inline CertificateReport certify(const Instance& in, const InverseSolution& sol) {
  const bool gap = is_gap_model(in.model);
  return check_certificate(in.model, in.problem, in.x_hat, in.structure, sol, gap ? &in.omega : nullptr,
                           gap ? nullptr : &in.prior);
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  /// Multiple of `step` in [lo, hi].
  double on_grid(double lo, double hi, double step = kGridStep) {
    const int a = static_cast<int>(std::ceil(lo / step - 1e-9));
    const int b = static_cast<int>(std::floor(hi / step + 1e-9));
    return integer(a, b) * step;
  }
  bool coin() { return integer(0, 1) == 1; }

  /// Nonzero vector with entries in {-2, -1.5, ..., 2}.
  Vector observation(Index n) {
    Vector x(n);
    do {
      for (Index j = 0; j < n; ++j) x(j) = 0.5 * integer(-4, 4);
    } while (x.isZero(0.0));
    return x;
  }

  Matrix matrix(Index m, Index n, double lo, double hi) {
    Matrix a(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) a(i, j) = uniform(lo, hi);
    return a;
  }

  NormKind norm(bool allow_l2 = true) {
    const int k = integer(0, allow_l2 ? 2 : 1);
    return k == 0 ? NormKind::L1 : (k == 1 ? NormKind::Linf : NormKind::L2);
  }

  /// Nonempty column sets whose sizes add up to at most max(m, budget).
  std::vector<ColumnSet> column_sets(Index m, Index n, Index budget) {
    std::vector<Index> sizes(static_cast<std::size_t>(m), 1);
    Index left = std::max<Index>(0, budget - m);
    for (auto& s : sizes) {
      const Index extra = std::min<Index>(left, integer(0, static_cast<int>(n - 1)));
      s += extra;
      left -= extra;
    }
    std::shuffle(sizes.begin(), sizes.end(), rng_);
    std::vector<ColumnSet> out;
    for (Index size : sizes) {
      std::vector<Index> all(static_cast<std::size_t>(n));
      for (Index j = 0; j < n; ++j) all[static_cast<std::size_t>(j)] = j;
      std::shuffle(all.begin(), all.end(), rng_);
      ColumnSet cols(all.begin(), all.begin() + size);
      std::sort(cols.begin(), cols.end());
      out.push_back(cols);
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

// Box omega: rows -z_k <= -lo_k and z_k <= hi_k.
inline SideConstraints box_omega(const Vector& lo, const Vector& hi) {
  const Index p = lo.size();
  SideConstraints sc;
  sc.G = Matrix::Zero(2 * p, p);
  sc.h = Vector::Zero(2 * p);
  for (Index k = 0; k < p; ++k) {
    sc.G(2 * k, k) = -1.0;
    sc.h(2 * k) = -lo(k);
    sc.G(2 * k + 1, k) = 1.0;
    sc.h(2 * k + 1) = hi(k);
  }
  return sc;
}

inline SideConstraints with_sum_cap(SideConstraints sc, Index p, double cap) {
  sc.G.conservativeResize(sc.G.rows() + 1, p);
  sc.G.row(sc.G.rows() - 1).setOnes();
  sc.h.conservativeResize(sc.h.size() + 1);
  sc.h(sc.h.size() - 1) = cap;
  return sc;
}

/// NLO-DG: box omega inside [0, 2] with at most three free entries; the rest
/// are pinned. b comes from a grid point of the box, so the grid is feasible.
/// Rounding an optimal row toward larger surplus costs at most step * |x|_1.
inline Instance random_nlo_dg(Generator& g) {
  Instance in;
  in.model = ModelKind::NloDg;
  const Index m = g.integer(1, 4), n = g.integer(1, 3);
  const Index p = m * n;
  in.x_hat = g.observation(n);
  Vector lo(p), hi(p);
  std::vector<Index> order(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) order[static_cast<std::size_t>(k)] = k;
  std::shuffle(order.begin(), order.end(), g.rng());
  const Index free = std::min<Index>(p, 3);
  for (Index k = 0; k < p; ++k) {
    const Index q = order[static_cast<std::size_t>(k)];
    if (k < free) {
      lo(q) = g.on_grid(0.0, 1.0);
      hi(q) = g.on_grid(lo(q), 2.0);
    } else {
      lo(q) = hi(q) = g.on_grid(0.0, 2.0);
    }
  }
  Matrix A0(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) A0(i, j) = g.on_grid(lo(i * n + j), hi(i * n + j));
  in.problem.A = A0;
  in.problem.b = A0 * in.x_hat;
  for (Index i = 0; i < m; ++i) in.problem.b(i) -= g.on_grid(0.0, 1.0);
  in.structure = UncertaintyStructure::nominal(m);
  in.omega = box_omega(lo, hi);
  in.spec = {in.model, lo, hi, kGridStep};
  in.tolerance = kGridStep * in.x_hat.lpNorm<1>() + 1e-9;
  return in;
}

/// RLO-IU-DG: at most four alpha entries in a box [0, u] with an optional cap
/// on the sum; alpha = 0 is feasible. Rounding alpha down keeps feasibility
/// and costs at most step * |x|_1.
inline Instance random_iu_dg(Generator& g) {
  Instance in;
  in.model = ModelKind::RloIuDg;
  const Index m = g.integer(1, 4), n = g.integer(1, 3);
  in.x_hat = g.observation(n);
  in.problem.A = g.matrix(m, n, -2.0, 2.0);
  in.structure = UncertaintyStructure::interval(g.column_sets(m, n, 3));
  const Index p = parameter_count(in.model, in.problem, in.structure);
  in.problem.b = in.problem.A * in.x_hat;
  for (Index i = 0; i < m; ++i) in.problem.b(i) -= g.uniform(0.0, 3.0);
  Vector lo = Vector::Zero(p), hi(p);
  // Four parameters only when every row has one; keep that grid small.
  for (Index k = 0; k < p; ++k) hi(k) = g.on_grid(0.5, p > 3 ? 1.0 : 2.0);
  in.omega = box_omega(lo, hi);
  if (p > 0 && g.coin()) in.omega = with_sum_cap(in.omega, p, g.on_grid(0.5, 3.0));
  in.spec = {in.model, lo, hi, kGridStep};
  in.tolerance = kGridStep * in.x_hat.lpNorm<1>() + 1e-9;
  return in;
}

/// RLO-CCU-DG: budgets in [0, min(u, |J_i|)] with an optional cap on the sum.
/// Rounding budgets down keeps feasibility and costs at most
/// step * max alpha_ij |x_j|.
inline Instance random_ccu_dg(Generator& g) {
  Instance in;
  in.model = ModelKind::RloCcuDg;
  const Index m = g.integer(1, 4), n = g.integer(1, 3);
  in.x_hat = g.observation(n);
  in.problem.A = g.matrix(m, n, -2.0, 2.0);
  const auto cols = g.column_sets(m, n, 2 * m);
  Matrix alpha = Matrix::Zero(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j : cols[static_cast<std::size_t>(i)]) alpha(i, j) = g.uniform(0.2, 2.0);
  in.structure = UncertaintyStructure::cardinality(cols, alpha);
  in.problem.b = in.problem.A * in.x_hat;
  for (Index i = 0; i < m; ++i) in.problem.b(i) -= g.uniform(0.0, 3.0);
  Vector lo = Vector::Zero(m), hi(m);
  double worst = 0.0;
  for (Index i = 0; i < m; ++i) {
    const auto size = static_cast<double>(cols[static_cast<std::size_t>(i)].size());
    // At most three rows carry a budget worth searching.
    hi(i) = i >= 3 ? 0.0 : g.on_grid(0.0, std::min(size, 2.0));
    for (Index j : cols[static_cast<std::size_t>(i)]) worst = std::max(worst, alpha(i, j) * std::abs(in.x_hat(j)));
  }
  in.omega = box_omega(lo, hi);
  if (g.coin()) in.omega = with_sum_cap(in.omega, m, g.on_grid(0.0, 3.0));
  in.spec = {in.model, lo, hi, kGridStep};
  in.tolerance = kGridStep * worst + 1e-9;
  return in;
}

// Row-separable strong-duality oracle: each row's grid rounding costs at most
// n * step in any of the supported norms, and re-solving the eliminated
// parameter adds at most n * step more, weighted by xi_i.
inline double sd_tolerance(const Vector& xi, Index n) { return kGridStep * xi.sum() * 2.0 * static_cast<double>(n) + 1e-9; }

/// NLO-SD: prior in [0, 2]; each row's activeness residual is at most 0.9 of
/// the dual norm of x_hat, so both projections stay inside the box prior +- 1.
inline Instance random_nlo_sd(Generator& g) {
  Instance in;
  in.model = ModelKind::NloSd;
  const Index m = g.integer(1, 4), n = g.integer(1, 3);
  in.x_hat = g.observation(n);
  in.prior.norm = g.norm();
  in.prior.matrix = Matrix(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) in.prior.matrix(i, j) = g.on_grid(0.0, 2.0);
  in.prior.weights = Vector(m);
  for (Index i = 0; i < m; ++i) in.prior.weights(i) = g.on_grid(0.5, 2.0);
  in.problem.A = in.prior.matrix;
  const double dual = geometry::dual_norm(in.x_hat, in.prior.norm);
  in.problem.b = in.prior.matrix * in.x_hat;
  for (Index i = 0; i < m; ++i) in.problem.b(i) -= g.uniform(-0.9, 0.9) * dual;
  in.structure = UncertaintyStructure::nominal(m);
  Vector lo(m * n), hi(m * n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      lo(i * n + j) = in.prior.matrix(i, j) - 1.0;
      hi(i * n + j) = in.prior.matrix(i, j) + 1.0;
    }
  in.spec = {in.model, lo, hi, kGridStep};
  in.tolerance = sd_tolerance(in.prior.weights, n);
  return in;
}

/// RLO-IU-SD: prior alpha in [0.5, 1] on the grid; the residual is at most
/// 0.45 of the largest |x_j| over J_i, so the optimum stays inside [0, 2].
inline Instance random_iu_sd(Generator& g) {
  Instance in;
  in.model = ModelKind::RloIuSd;
  const Index m = g.integer(1, 4), n = g.integer(1, 3);
  in.x_hat = g.observation(n);
  in.problem.A = g.matrix(m, n, -2.0, 2.0);
  in.structure = UncertaintyStructure::interval(g.column_sets(m, n, 2 * m));
  in.prior.norm = g.norm(false);
  in.prior.matrix = Matrix::Zero(m, n);
  in.prior.weights = Vector(m);
  in.problem.b.resize(m);
  for (Index i = 0; i < m; ++i) {
    in.prior.weights(i) = g.on_grid(0.5, 2.0);
    double protection = 0.0, largest = 0.0;
    for (Index j : in.structure.row_columns(i)) {
      in.prior.matrix(i, j) = g.on_grid(0.5, 1.0);
      protection += in.prior.matrix(i, j) * std::abs(in.x_hat(j));
      largest = std::max(largest, std::abs(in.x_hat(j)));
    }
    const double r = largest > 0.0 ? g.uniform(-0.45, 0.45) * largest : g.uniform(0.0, 1.0);
    in.problem.b(i) = in.problem.A.row(i).dot(in.x_hat) - protection - r;
  }
  const Index p = parameter_count(in.model, in.problem, in.structure);
  in.spec = {in.model, Vector::Zero(p), Vector::Constant(p, 2.0), kGridStep};
  in.tolerance = sd_tolerance(in.prior.weights, n);
  return in;
}

/// RLO-CCU-SD: the deviation is an unweighted norm over budgets, so the grid
/// costs at most step per row.
inline Instance random_ccu_sd(Generator& g) {
  Instance in;
  in.model = ModelKind::RloCcuSd;
  const Index m = g.integer(1, 4), n = g.integer(1, 3);
  in.x_hat = g.observation(n);
  in.problem.A = g.matrix(m, n, -2.0, 2.0);
  const auto cols = g.column_sets(m, n, 2 * m);
  Matrix alpha = Matrix::Zero(m, n);
  in.prior.gamma = Vector(m);
  in.problem.b.resize(m);
  for (Index i = 0; i < m; ++i) {
    double total = 0.0;
    for (Index j : cols[static_cast<std::size_t>(i)]) {
      alpha(i, j) = g.uniform(0.2, 2.0);
      total += alpha(i, j) * std::abs(in.x_hat(j));
    }
    const auto size = static_cast<double>(cols[static_cast<std::size_t>(i)].size());
    in.prior.gamma(i) = g.uniform(0.0, size);
    in.problem.b(i) = in.problem.A.row(i).dot(in.x_hat) - g.uniform(0.0, 1.2) * total;
  }
  in.structure = UncertaintyStructure::cardinality(cols, alpha);
  in.prior.norm = g.norm();
  Vector hi(m);
  for (Index i = 0; i < m; ++i) hi(i) = static_cast<double>(cols[static_cast<std::size_t>(i)].size());
  in.spec = {in.model, Vector::Zero(m), hi, kGridStep};
  in.tolerance = kGridStep * static_cast<double>(m) + 1e-9;
  return in;
}

inline Instance random_instance(ModelKind model, Generator& g) {
  switch (model) {
    case ModelKind::NloDg: return random_nlo_dg(g);
    case ModelKind::NloSd: return random_nlo_sd(g);
    case ModelKind::RloIuDg: return random_iu_dg(g);
    case ModelKind::RloIuSd: return random_iu_sd(g);
    case ModelKind::RloCcuDg: return random_ccu_dg(g);
    case ModelKind::RloCcuSd: return random_ccu_sd(g);
  }
  return {};
}

inline const std::array<ModelKind, 6>& all_models() {
  static const std::array<ModelKind, 6> models = {ModelKind::NloDg,   ModelKind::NloSd,    ModelKind::RloIuDg,
                                                  ModelKind::RloIuSd, ModelKind::RloCcuDg, ModelKind::RloCcuSd};
  return models;
}

struct Agreement {
  bool ok = false;
  std::string detail;
};

/// Solver and grid agree: both infeasible, or the exact optimum is no larger
/// than the grid minimum and within the tolerance of it.
inline Agreement agree(const Instance& in) {
  const auto sol = solve(in);
  const auto grid = grid_oracle(in);
  const bool solved = sol.has_solution();
  if (!solved || !std::isfinite(grid.value)) {
    if (!solved && !std::isfinite(grid.value)) return {true, ""};
    return {false, std::string("status ") + std::string(to_string(sol.status)) + " vs grid " + std::to_string(grid.value)};
  }
  const double exact = model_value(in, sol);
  const bool ok = exact <= grid.value + 1e-7 && grid.value - exact <= in.tolerance;
  return {ok, "exact " + std::to_string(exact) + " grid " + std::to_string(grid.value) + " tol " +
                  std::to_string(in.tolerance)};
}

// ---------------------------------------------------------------------------
// Independent oracles

/// Vertex enumeration for min c'x s.t. rows (as >= after flipping) over a
/// bounded region: every n-subset of tight constraints is solved and the best
/// feasible vertex kept. Returns +inf when no vertex is feasible.
inline double vertex_enumeration_min(const Vector& c, const Matrix& G, const Vector& h) {
  // G x >= h
  const Index n = c.size();
  const Index r = G.rows();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> pick(static_cast<std::size_t>(n));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == n) {
      Matrix M(n, n);
      Vector rhs(n);
      for (Index k = 0; k < n; ++k) {
        M.row(k) = G.row(pick[static_cast<std::size_t>(k)]);
        rhs(k) = h(pick[static_cast<std::size_t>(k)]);
      }
      Eigen::FullPivLU<Matrix> lu(M);
      if (lu.rank() < n) return;
      const Vector x = lu.solve(rhs);
      if (((G * x - h).array() >= -1e-9).all()) best = std::min(best, c.dot(x));
      return;
    }
    for (Index k = start; k < r; ++k) {
      pick[static_cast<std::size_t>(depth)] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

/// Smallest budget whose protection reaches `surplus`, from the LP
///   min Gamma  s.t.  sum v_j phi_j >= surplus, sum phi_j <= Gamma, 0 <= phi <= 1.
inline double gamma_bar_lp(const std::vector<double>& values, double surplus) {
  const Index k = static_cast<Index>(values.size());
  lp::LinearProgram prog(k + 1);
  prog.objective(k) = 1.0;
  Vector reach = Vector::Zero(k + 1), budget = Vector::Zero(k + 1);
  for (Index q = 0; q < k; ++q) {
    prog.set_bounds(q, 0.0, 1.0);
    reach(q) = values[static_cast<std::size_t>(q)];
    budget(q) = -1.0;
  }
  budget(k) = 1.0;
  prog.set_nonnegative(k);
  prog.add_row(reach, lp::Sense::GreaterEqual, surplus);
  prog.add_row(budget, lp::Sense::GreaterEqual, 0.0);
  const auto out = lp::solve_lp(prog);
  return out.status == lp::Status::Optimal ? out.value : std::numeric_limits<double>::quiet_NaN();
}

/// max sum v_j phi_j s.t. sum phi <= Gamma, 0 <= phi <= 1, by LP.
inline double protection_lp(const std::vector<double>& values, double gamma) {
  const Index k = static_cast<Index>(values.size());
  lp::LinearProgram prog(k);
  Vector budget = Vector::Constant(k, -1.0);
  for (Index q = 0; q < k; ++q) {
    prog.set_bounds(q, 0.0, 1.0);
    prog.objective(q) = -values[static_cast<std::size_t>(q)];
  }
  prog.add_row(budget, lp::Sense::GreaterEqual, -gamma);
  return -lp::solve_lp(prog).value;
}

}  // namespace invopt::testkit
