#pragma once

// Dense two-phase primal simplex for the small per-constraint subproblems.
//
// Pricing is Dantzig (most negative reduced cost). After a run of
// 10 * (variables + rows) consecutive degenerate pivots the phase switches to
// Bland's rule, which guarantees termination. The ratio test breaks ties on the
// smallest basic column index, so identical inputs always take identical pivots.

#include "invopt/model.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace invopt::lp {

enum class Sense { GreaterEqual, LessEqual, Equal };

struct Row {
  Vector coeffs;
  Sense sense = Sense::GreaterEqual;
  double rhs = 0.0;
};

struct Bounds {
  std::optional<double> lower;
  std::optional<double> upper;
};

/// minimize objective' x  subject to rows and per-variable bounds.
/// Variables are free unless bounded.
struct LinearProgram {
  Vector objective;
  std::vector<Row> rows;
  std::vector<Bounds> bounds;

  LinearProgram() = default;
  explicit LinearProgram(Index num_vars)
      : objective(Vector::Zero(num_vars)), bounds(static_cast<std::size_t>(num_vars)) {}

  Index num_vars() const { return objective.size(); }

  void add_row(Vector coeffs, Sense sense, double rhs) { rows.push_back({std::move(coeffs), sense, rhs}); }
  void set_bounds(Index j, std::optional<double> lo, std::optional<double> hi) {
    bounds[static_cast<std::size_t>(j)] = {lo, hi};
  }
  void set_nonnegative(Index j) { set_bounds(j, 0.0, std::nullopt); }

  /// Adds G z <= h over variables [offset, offset + G.cols()). Rows with a
  /// single nonzero tighten that variable's bounds instead, unless doing so
  /// would leave the bounds crossed.
  void add_upper_rows(const Matrix& G, const Vector& h, Index offset = 0) {
    for (Index r = 0; r < G.rows(); ++r) {
      Index nz = -1;
      int count = 0;
      for (Index k = 0; k < G.cols(); ++k)
        if (G(r, k) != 0.0) {
          nz = k;
          ++count;
        }
      if (count == 1) {
        auto& bd = bounds[static_cast<std::size_t>(offset + nz)];
        const double v = h(r) / G(r, nz);
        Bounds next = bd;
        if (G(r, nz) > 0.0) next.upper = next.upper ? std::min(*next.upper, v) : v;
        else next.lower = next.lower ? std::max(*next.lower, v) : v;
        if (!(next.lower && next.upper && *next.lower > *next.upper)) {
          bd = next;
          continue;
        }
      }
      Vector row = Vector::Zero(num_vars());
      row.segment(offset, G.cols()) = G.row(r).transpose();
      add_row(std::move(row), Sense::LessEqual, h(r));
    }
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
  }
  return "unknown";
}

struct LpOutcome {
  Status status = Status::Infeasible;
  Vector solution;       // Optimal only
  double value = 0.0;    // Optimal only
  Vector row_duals;      // Optimal only; >= 0 for >= rows, <= 0 for <= rows
  Vector ray;            // Unbounded only: feasible direction with negative objective slope
  double phase_one_value = 0.0;
  int pivots = 0;
};

inline constexpr double kPrimalTol = 1e-9;
inline constexpr double kOptimalityTol = 1e-9;
inline constexpr double kPivotTol = 1e-12;
inline constexpr int kMaxPivots = 50000;

/// Number of solve_lp calls made by this process. Monotone; read deltas.
inline std::atomic<std::uint64_t>& invocation_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

inline std::uint64_t invocation_count() { return invocation_counter().load(); }

namespace detail {

// How an original variable maps onto nonnegative standard-form columns.
struct VarMap {
  enum Kind { Shifted, Mirrored, Split } kind = Shifted;
  double offset = 0.0;
  Index col = 0;  // first standard column
};

class Tableau {
 public:
  Tableau(Matrix body, Vector rhs, std::vector<Index> basis, Index first_artificial)
      : t_(std::move(body)), rhs_(std::move(rhs)), basis_(std::move(basis)), first_art_(first_artificial) {}

  Index rows() const { return t_.rows(); }
  Index cols() const { return t_.cols(); }
  const Matrix& body() const { return t_; }
  const Vector& rhs() const { return rhs_; }
  const std::vector<Index>& basis() const { return basis_; }

  /// Reduced costs d = c - c_B' T for cost vector c over all columns.
  Vector reduced_costs(const Vector& cost) const {
    Vector cb(rows());
    for (Index r = 0; r < rows(); ++r) cb(r) = cost(basis_[static_cast<std::size_t>(r)]);
    return cost - t_.transpose() * cb;
  }

  double objective(const Vector& cost) const {
    double v = 0.0;
    for (Index r = 0; r < rows(); ++r) v += cost(basis_[static_cast<std::size_t>(r)]) * rhs_(r);
    return v;
  }

  void pivot(Index r, Index q) {
    const double p = t_(r, q);
    t_.row(r) /= p;
    rhs_(r) /= p;
    for (Index k = 0; k < rows(); ++k) {
      if (k == r) continue;
      const double f = t_(k, q);
      if (f == 0.0) continue;
      t_.row(k) -= f * t_.row(r);
      rhs_(k) -= f * rhs_(r);
      if (std::abs(rhs_(k)) < 1e-14) rhs_(k) = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = q;
  }

  enum class PhaseResult { Optimal, Unbounded };

  /// Runs the simplex loop for `cost`; columns at or beyond `first_art_` never enter.
  PhaseResult run(const Vector& cost, Index budget_scale, int& pivots, Index& unbounded_col) {
    const Index degenerate_limit = 10 * budget_scale;
    Index degenerate_run = 0;
    bool bland = false;
    Vector d = reduced_costs(cost);
    while (true) {
      Index q = -1;
      double best = -kOptimalityTol;
      for (Index j = 0; j < first_art_; ++j) {
        if (d(j) < best) {
          q = j;
          if (bland) break;
          best = d(j);
        }
      }
      if (q < 0) return PhaseResult::Optimal;

      Index r = -1;
      double best_ratio = 0.0;
      bool tiny_only = false;
      for (Index k = 0; k < rows(); ++k) {
        const double a = t_(k, q);
        if (a <= kPivotTol) {
          if (a > 0.0) tiny_only = true;
          continue;
        }
        const double ratio = std::max(0.0, rhs_(k)) / a;
        if (r < 0 || ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && basis_[static_cast<std::size_t>(k)] < basis_[static_cast<std::size_t>(r)])) {
          r = k;
          best_ratio = ratio;
        }
      }
      if (r < 0) {
        if (tiny_only) throw Error(ErrorCode::NumericalFailure, "pivot magnitude below 1e-12 with no alternative");
        unbounded_col = q;
        return PhaseResult::Unbounded;
      }

      pivot(r, q);
      if (++pivots > kMaxPivots) throw Error(ErrorCode::NumericalFailure, "simplex pivot limit exceeded");
      if (best_ratio <= kPrimalTol) {
        if (++degenerate_run > degenerate_limit) bland = true;
      } else {
        degenerate_run = 0;
      }
      // Refresh from the tableau to keep the reduced costs consistent with it.
      d = reduced_costs(cost);
    }
  }

  void set_first_artificial(Index k) { first_art_ = k; }

 private:
  Matrix t_;
  Vector rhs_;
  std::vector<Index> basis_;
  Index first_art_;
};

}  // namespace detail

/// Validates shapes; throws DimensionMismatch / InvalidArgument.
inline void check_well_formed(const LinearProgram& lp) {
  const Index p = lp.num_vars();
  if (static_cast<Index>(lp.bounds.size()) != p)
    throw Error(ErrorCode::DimensionMismatch, "bounds: expected one entry per variable");
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    if (lp.rows[r].coeffs.size() != p)
      throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(r) + ": wrong coefficient count");
    if (!lp.rows[r].coeffs.allFinite() || !std::isfinite(lp.rows[r].rhs))
      throw Error(ErrorCode::NonFinite, "row " + std::to_string(r) + ": non-finite data");
  }
  for (const auto& b : lp.bounds)
    if (b.lower && b.upper && *b.lower > *b.upper)
      throw Error(ErrorCode::InvalidArgument, "bounds: lower exceeds upper");
  if (!lp.objective.allFinite()) throw Error(ErrorCode::NonFinite, "objective: non-finite data");
}

inline LpOutcome solve_lp(const LinearProgram& lp) {
  invocation_counter().fetch_add(1, std::memory_order_relaxed);
  check_well_formed(lp);

  const Index p = lp.num_vars();
  std::vector<detail::VarMap> vars(static_cast<std::size_t>(p));
  Index ncols = 0;
  std::vector<std::pair<Index, double>> upper_rows;  // (std column, u - l)
  for (Index j = 0; j < p; ++j) {
    auto& vm = vars[static_cast<std::size_t>(j)];
    const auto& bd = lp.bounds[static_cast<std::size_t>(j)];
    vm.col = ncols;
    if (bd.lower) {
      vm.kind = detail::VarMap::Shifted;
      vm.offset = *bd.lower;
      if (bd.upper) upper_rows.emplace_back(ncols, *bd.upper - *bd.lower);
      ncols += 1;
    } else if (bd.upper) {
      vm.kind = detail::VarMap::Mirrored;
      vm.offset = *bd.upper;
      ncols += 1;
    } else {
      vm.kind = detail::VarMap::Split;
      ncols += 2;
    }
  }
  const Index structural = ncols;
  const Index orig_rows = static_cast<Index>(lp.rows.size());
  const Index nrows = orig_rows + static_cast<Index>(upper_rows.size());

  // Row data over structural columns, with constants moved to the right.
  Matrix a = Matrix::Zero(nrows, structural);
  Vector rhs(nrows);
  std::vector<Sense> senses(static_cast<std::size_t>(nrows));
  for (Index r = 0; r < orig_rows; ++r) {
    const auto& row = lp.rows[static_cast<std::size_t>(r)];
    double shift = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double c = row.coeffs(j);
      if (c == 0.0) continue;
      const auto& vm = vars[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case detail::VarMap::Shifted: a(r, vm.col) = c; shift += c * vm.offset; break;
        case detail::VarMap::Mirrored: a(r, vm.col) = -c; shift += c * vm.offset; break;
        case detail::VarMap::Split: a(r, vm.col) = c; a(r, vm.col + 1) = -c; break;
      }
    }
    rhs(r) = row.rhs - shift;
    senses[static_cast<std::size_t>(r)] = row.sense;
  }
  for (std::size_t k = 0; k < upper_rows.size(); ++k) {
    const Index r = orig_rows + static_cast<Index>(k);
    a(r, upper_rows[k].first) = 1.0;
    rhs(r) = upper_rows[k].second;
    senses[static_cast<std::size_t>(r)] = Sense::LessEqual;
  }

  Index nslack = 0;
  for (auto s : senses)
    if (s != Sense::Equal) ++nslack;
  const Index first_art = structural + nslack;
  const Index total = first_art + nrows;

  Matrix body = Matrix::Zero(nrows, total);
  body.leftCols(structural) = a;
  std::vector<double> row_sign(static_cast<std::size_t>(nrows), 1.0);
  // A slack that ends up with a +1 coefficient starts basic in place of the
  // artificial, so variables not forced off their bounds stay there.
  std::vector<Index> basis(static_cast<std::size_t>(nrows));
  Index slack = structural;
  for (Index r = 0; r < nrows; ++r) {
    const auto s = senses[static_cast<std::size_t>(r)];
    Index own = -1;
    if (s == Sense::GreaterEqual) body(r, own = slack++) = -1.0;
    else if (s == Sense::LessEqual) body(r, own = slack++) = 1.0;
    if (rhs(r) < 0.0) {
      body.row(r) *= -1.0;
      rhs(r) = -rhs(r);
      row_sign[static_cast<std::size_t>(r)] = -1.0;
    }
    body(r, first_art + r) = 1.0;
    basis[static_cast<std::size_t>(r)] = (own >= 0 && body(r, own) > 0.0) ? own : first_art + r;
  }

  detail::Tableau tab(std::move(body), rhs, std::move(basis), first_art);
  LpOutcome out;
  Index unbounded_col = -1;
  const Index scale = p + orig_rows;

  // Phase one.
  Vector phase1_cost = Vector::Zero(total);
  phase1_cost.tail(nrows).setOnes();
  tab.run(phase1_cost, scale, out.pivots, unbounded_col);
  out.phase_one_value = tab.objective(phase1_cost);
  const double rhs_scale = 1.0 + (rhs.size() ? rhs.lpNorm<Eigen::Infinity>() : 0.0);
  if (out.phase_one_value > kPrimalTol * rhs_scale) {
    out.status = Status::Infeasible;
    return out;
  }

  // Drive zero-level artificials out of the basis where possible.
  for (Index r = 0; r < nrows; ++r) {
    if (tab.basis()[static_cast<std::size_t>(r)] < first_art) continue;
    Index best = -1;
    double mag = 1e-9;
    for (Index k = 0; k < first_art; ++k) {
      const double v = std::abs(tab.body()(r, k));
      if (v > mag) { mag = v; best = k; }
    }
    if (best >= 0) tab.pivot(r, best);
  }

  // Phase two.
  Vector cost = Vector::Zero(total);
  for (Index j = 0; j < p; ++j) {
    const double c = lp.objective(j);
    const auto& vm = vars[static_cast<std::size_t>(j)];
    switch (vm.kind) {
      case detail::VarMap::Shifted: cost(vm.col) = c; break;
      case detail::VarMap::Mirrored: cost(vm.col) = -c; break;
      case detail::VarMap::Split: cost(vm.col) = c; cost(vm.col + 1) = -c; break;
    }
  }
  const auto result = tab.run(cost, scale, out.pivots, unbounded_col);

  auto to_original = [&](const Vector& std_values, bool with_offset) {
    Vector x(p);
    for (Index j = 0; j < p; ++j) {
      const auto& vm = vars[static_cast<std::size_t>(j)];
      const double off = with_offset ? vm.offset : 0.0;
      switch (vm.kind) {
        case detail::VarMap::Shifted: x(j) = off + std_values(vm.col); break;
        case detail::VarMap::Mirrored: x(j) = off - std_values(vm.col); break;
        case detail::VarMap::Split: x(j) = std_values(vm.col) - std_values(vm.col + 1); break;
      }
    }
    return x;
  };

  if (result == detail::Tableau::PhaseResult::Unbounded) {
    Vector dir = Vector::Zero(total);
    dir(unbounded_col) = 1.0;
    for (Index r = 0; r < nrows; ++r) dir(tab.basis()[static_cast<std::size_t>(r)]) = -tab.body()(r, unbounded_col);
    out.status = Status::Unbounded;
    out.ray = to_original(dir, false);
    return out;
  }

  Vector std_x = Vector::Zero(total);
  for (Index r = 0; r < nrows; ++r) std_x(tab.basis()[static_cast<std::size_t>(r)]) = std::max(0.0, tab.rhs()(r));
  out.status = Status::Optimal;
  out.solution = to_original(std_x, true);
  out.value = lp.objective.dot(out.solution);

  // Duals from the artificial columns: y = c_B' B^{-1} and B^{-1} sits under them.
  const Vector d = tab.reduced_costs(cost);
  out.row_duals.resize(orig_rows);
  for (Index r = 0; r < orig_rows; ++r) out.row_duals(r) = -d(first_art + r) * row_sign[static_cast<std::size_t>(r)];
  return out;
}

/// Worker cap from IO_RECOVER_THREADS (default: hardware concurrency).
inline unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IO_RECOVER_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = static_cast<unsigned>(v);
  }
  return cap;
}

/// Batch result: an outcome, or the error that element raised.
struct BatchItem {
  std::optional<LpOutcome> outcome;
  std::string error;
};

/// Element-wise solve_lp. Results are in input order and one failing element
/// never aborts the others.
inline std::vector<BatchItem> solve_lp_batch(const std::vector<LinearProgram>& lps) {
  std::vector<BatchItem> results(lps.size());
  auto work = [&](std::size_t k) {
    try {
      results[k].outcome = solve_lp(lps[k]);
    } catch (const std::exception& e) {
      results[k].error = e.what();
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), lps.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < lps.size(); ++k) work(k);
    return results;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < lps.size(); k = next++) work(k);
      });
  }
  return results;
}

/// Largest violation of the KKT system of `lp` at an Optimal outcome: primal
/// feasibility, dual sign, complementary slackness and reduced-cost signs.
inline double kkt_residual(const LinearProgram& lp, const LpOutcome& outcome) {
  const Vector& x = outcome.solution;
  const Vector& y = outcome.row_duals;
  double worst = 0.0;
  Vector reduced = lp.objective;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    const double act = row.coeffs.dot(x) - row.rhs;
    const double yr = y(static_cast<Index>(r));
    reduced -= yr * row.coeffs;
    switch (row.sense) {
      case Sense::GreaterEqual: worst = std::max({worst, -act, -yr}); break;
      case Sense::LessEqual: worst = std::max({worst, act, yr}); break;
      case Sense::Equal: worst = std::max(worst, std::abs(act)); break;
    }
    worst = std::max(worst, std::abs(yr * act));
  }
  for (Index j = 0; j < lp.num_vars(); ++j) {
    const auto& bd = lp.bounds[static_cast<std::size_t>(j)];
    const double dj = reduced(j);
    const bool at_lo = bd.lower && std::abs(x(j) - *bd.lower) <= kPrimalTol;
    const bool at_hi = bd.upper && std::abs(x(j) - *bd.upper) <= kPrimalTol;
    if (bd.lower) worst = std::max(worst, *bd.lower - x(j));
    if (bd.upper) worst = std::max(worst, x(j) - *bd.upper);
    if (at_lo && at_hi) continue;
    if (at_lo) worst = std::max(worst, -dj);
    else if (at_hi) worst = std::max(worst, dj);
    else worst = std::max(worst, std::abs(dj));
  }
  return worst;
}

}  // namespace invopt::lp
