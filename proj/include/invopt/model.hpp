#pragma once

// Shared domain types for the inverse solvers: forward problem data, the
// uncertainty structure, side constraints, priors and the solution record.
//
// Conventions used throughout the library:
//   * the forward problem is  minimize c'x  subject to  A x >= b;
//   * constraint and column indices are 0-based in the C++ API and 1-based
//     in every serialized report;
//   * sgn(0) = +1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace invopt {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ColumnSet = std::vector<Index>;

/// Feasibility / zero tests on values produced by closed forms or the LP engine.
inline constexpr double kFeasTol = 1e-9;
/// Comparisons made when reporting against expected values or certificates.
inline constexpr double kReportTol = 1e-7;

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  InvalidArgument,
  ZeroVector,
  ZeroObservation,
  UnsupportedNorm,
  NumericalFailure,
  GridTooLarge,
  DimensionNotPlottable,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ZeroObservation: return "ZeroObservation";
    case ErrorCode::UnsupportedNorm: return "UnsupportedNorm";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::DimensionNotPlottable: return "DimensionNotPlottable";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class ModelKind { NloDg, NloSd, RloIuDg, RloIuSd, RloCcuDg, RloCcuSd };

inline std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::NloDg: return "nlo-dg";
    case ModelKind::NloSd: return "nlo-sd";
    case ModelKind::RloIuDg: return "rlo-iu-dg";
    case ModelKind::RloIuSd: return "rlo-iu-sd";
    case ModelKind::RloCcuDg: return "rlo-ccu-dg";
    case ModelKind::RloCcuSd: return "rlo-ccu-sd";
  }
  return "unknown";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view text) {
  for (auto kind : {ModelKind::NloDg, ModelKind::NloSd, ModelKind::RloIuDg, ModelKind::RloIuSd,
                    ModelKind::RloCcuDg, ModelKind::RloCcuSd}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

/// True for the duality-gap models, which accept side constraints.
inline bool is_gap_model(ModelKind kind) {
  return kind == ModelKind::NloDg || kind == ModelKind::RloIuDg || kind == ModelKind::RloCcuDg;
}

enum class NormKind { L1, L2, Linf };

inline std::string_view to_string(NormKind norm) {
  switch (norm) {
    case NormKind::L1: return "L1";
    case NormKind::L2: return "L2";
    case NormKind::Linf: return "Linf";
  }
  return "unknown";
}

inline std::optional<NormKind> parse_norm_kind(std::string_view text) {
  if (text == "L1") return NormKind::L1;
  if (text == "L2") return NormKind::L2;
  if (text == "Linf") return NormKind::Linf;
  return std::nullopt;
}

inline double norm_of(const Vector& v, NormKind norm) {
  if (v.size() == 0) return 0.0;
  switch (norm) {
    case NormKind::L1: return v.lpNorm<1>();
    case NormKind::L2: return v.norm();
    case NormKind::Linf: return v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Index of the smallest finite entry; entries within `tol` of the minimum tie
/// and the lowest index wins. Returns -1 when no entry is finite.
inline Index argmin_lowest(const std::vector<double>& values, double tol = kFeasTol) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : values)
    if (std::isfinite(v)) best = std::min(best, v);
  if (!std::isfinite(best)) return -1;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (std::isfinite(values[k]) && values[k] <= best + tol) return static_cast<Index>(k);
  return -1;
}

inline Vector unit_vector(Index size, Index k) {
  Vector e = Vector::Zero(size);
  e(k) = 1.0;
  return e;
}

/// minimize c'x subject to A x >= b.
struct ForwardProblem {
  Matrix A;
  Vector b;

  Index num_constraints() const { return A.rows(); }
  Index num_vars() const { return A.cols(); }

  /// a_i' x - b_i for every row.
  Vector surplus(const Vector& x) const { return A * x - b; }
};

struct ObservedPoint {
  Vector x_hat;
};

enum class UncertaintyKind { Nominal, Interval, Cardinality };

/// Which coefficients are uncertain (J_i) and, for cardinality-constrained
/// uncertainty, the fixed deviations alpha_ij. `alpha` is m x n with entries
/// outside J_i ignored.
struct UncertaintyStructure {
  UncertaintyKind kind = UncertaintyKind::Nominal;
  std::vector<ColumnSet> columns;
  Matrix alpha;

  static UncertaintyStructure nominal(Index m) {
    UncertaintyStructure s;
    s.kind = UncertaintyKind::Nominal;
    s.columns.assign(static_cast<std::size_t>(m), {});
    return s;
  }
  static UncertaintyStructure interval(std::vector<ColumnSet> columns) {
    UncertaintyStructure s;
    s.kind = UncertaintyKind::Interval;
    s.columns = std::move(columns);
    return s;
  }
  static UncertaintyStructure cardinality(std::vector<ColumnSet> columns, Matrix alpha) {
    UncertaintyStructure s;
    s.kind = UncertaintyKind::Cardinality;
    s.columns = std::move(columns);
    s.alpha = std::move(alpha);
    return s;
  }

  const ColumnSet& row_columns(Index i) const { return columns[static_cast<std::size_t>(i)]; }
};

/// Position of each imputed parameter in the canonical flattening used by
/// side constraints:
///   NLO models: A row-major (m*n entries);
///   interval models: alpha_ij for i ascending, j in J_i ascending;
///   cardinality models: Gamma_i for i ascending.
inline Index parameter_count(ModelKind model, const ForwardProblem& problem,
                             const UncertaintyStructure& structure) {
  switch (model) {
    case ModelKind::NloDg:
    case ModelKind::NloSd:
      return problem.num_constraints() * problem.num_vars();
    case ModelKind::RloIuDg:
    case ModelKind::RloIuSd: {
      Index p = 0;
      for (const auto& cols : structure.columns) p += static_cast<Index>(cols.size());
      return p;
    }
    case ModelKind::RloCcuDg:
    case ModelKind::RloCcuSd:
      return problem.num_constraints();
  }
  return 0;
}

/// 1-based parameter names in canonical order: "a[i,j]", "alpha[i,j]", "gamma[i]".
inline std::vector<std::string> parameter_names(ModelKind model, const ForwardProblem& problem,
                                                const UncertaintyStructure& structure) {
  std::vector<std::string> names;
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  auto idx = [](Index k) { return std::to_string(k + 1); };
  switch (model) {
    case ModelKind::NloDg:
    case ModelKind::NloSd:
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) names.push_back("a[" + idx(i) + "," + idx(j) + "]");
      break;
    case ModelKind::RloIuDg:
    case ModelKind::RloIuSd:
      for (Index i = 0; i < m; ++i)
        for (Index j : structure.row_columns(i)) names.push_back("alpha[" + idx(i) + "," + idx(j) + "]");
      break;
    case ModelKind::RloCcuDg:
    case ModelKind::RloCcuSd:
      for (Index i = 0; i < m; ++i) names.push_back("gamma[" + idx(i) + "]");
      break;
  }
  return names;
}

/// The polyhedron { z : G z <= h } over the imputed parameters. Column k of G
/// refers to canonical parameter `variable_map[k]`; an empty map means the
/// columns are already in canonical order.
struct SideConstraints {
  Matrix G;
  Vector h;
  std::vector<Index> variable_map;

  Index num_rows() const { return G.rows(); }

  /// G with its columns permuted into canonical parameter order.
  Matrix canonical_matrix(Index p) const {
    if (variable_map.empty()) {
      if (G.cols() != p)
        throw Error(ErrorCode::DimensionMismatch,
                    "omega.G has " + std::to_string(G.cols()) + " columns, expected " + std::to_string(p));
      return G;
    }
    if (static_cast<Index>(variable_map.size()) != p || G.cols() != p)
      throw Error(ErrorCode::DimensionMismatch, "omega.variable_order must list every imputed parameter once");
    Matrix out = Matrix::Zero(G.rows(), p);
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    for (Index k = 0; k < p; ++k) {
      const Index target = variable_map[static_cast<std::size_t>(k)];
      if (target < 0 || target >= p || seen[static_cast<std::size_t>(target)])
        throw Error(ErrorCode::InvalidArgument, "omega.variable_order is not a bijection");
      seen[static_cast<std::size_t>(target)] = true;
      out.col(target) = G.col(k);
    }
    return out;
  }

  /// max_k (G z - h)_k clipped at zero, with z in canonical order.
  double violation(const Vector& canonical) const {
    if (G.rows() == 0) return 0.0;
    const Vector r = canonical_matrix(canonical.size()) * canonical - h;
    return std::max(0.0, r.maxCoeff());
  }
};

/// Prior estimates for the strong-duality models.
///   NLO-SD: `matrix` holds A-hat (m x n).
///   RLO-IU-SD: `matrix` holds alpha-hat (m x n, entries outside J_i ignored).
///   RLO-CCU-SD: `gamma` holds Gamma-hat (length m).
/// `weights` (xi) defaults to all ones when left empty.
struct Prior {
  Matrix matrix;
  Vector gamma;
  Vector weights;
  NormKind norm = NormKind::L2;

  Vector weights_or_ones(Index m) const {
    return weights.size() == 0 ? Vector::Ones(m) : weights;
  }
};

enum class SolveStatus { Optimal, Infeasible, UnboundedGap, TrivialDetected };

inline std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::UnboundedGap: return "UnboundedGap";
    case SolveStatus::TrivialDetected: return "TrivialDetected";
  }
  return "unknown";
}

inline std::optional<SolveStatus> parse_solve_status(std::string_view text) {
  for (auto s : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::UnboundedGap,
                 SolveStatus::TrivialDetected}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

enum class RemediationKind { RhsEpsilon, PriorEpsilon, WeightBoost };

inline std::string_view to_string(RemediationKind kind) {
  switch (kind) {
    case RemediationKind::RhsEpsilon: return "RhsEpsilon";
    case RemediationKind::PriorEpsilon: return "PriorEpsilon";
    case RemediationKind::WeightBoost: return "WeightBoost";
  }
  return "unknown";
}

/// A data perturbation that sidesteps a trivial NLO-SD imputation.
///   RhsEpsilon:   b[row] += magnitude
///   PriorEpsilon: prior[row, column] += magnitude
///   WeightBoost:  xi[row] = magnitude
struct Remediation {
  RemediationKind kind = RemediationKind::RhsEpsilon;
  Index row = 0;
  Index column = 0;
  double magnitude = 0.0;
  bool heuristic = false;
  std::string note;
};

/// Counts of the expensive primitives a solve invoked.
struct SolveStats {
  int lp_solves = 0;
  int gamma_bar_evaluations = 0;
};

/// Output of every inverse solver.
///
/// `A` is the imputed matrix for the NLO models and the (unchanged) nominal
/// matrix for the robust models. `alpha` is the imputed deviation matrix for
/// the interval models and the fixed one for the cardinality models. `gamma`
/// is the imputed budget vector for the cardinality models.
struct InverseSolution {
  ModelKind model = ModelKind::NloDg;
  SolveStatus status = SolveStatus::Infeasible;

  Matrix A;
  Matrix alpha;
  Vector gamma;

  Vector cost;
  Vector dual_pi;
  double duality_gap = 0.0;
  Index active_row = -1;
  double objective_value = 0.0;

  // Per-constraint diagnostics. Which of these are filled depends on the model:
  // DG models and RLO-IU-SD fill `t`; NLO-SD and RLO-CCU-SD fill `f` and `g`;
  // the cardinality models fill `gamma_bar`/`gamma_over` (NaN outside I-hat).
  Vector t;
  Vector f;
  Vector g;
  std::vector<Index> i_hat;
  Vector gamma_bar;
  Vector gamma_over;
  Vector phi;  // knapsack allocation of the active row (cardinality DG), over J_{i*}

  std::vector<Remediation> remediations;
  std::string reason;
  SolveStats stats;

  /// 1-based index of the active constraint, 0 when there is none.
  Index active_index() const { return active_row + 1; }
  bool has_solution() const {
    return status == SolveStatus::Optimal || status == SolveStatus::TrivialDetected;
  }
};

/// Auxiliary primal and dual blocks reconstructed for a solution, plus the
/// named residuals computed from them. Blocks are m x n with entries outside
/// J_i left at zero.
struct Certificate {
  Matrix u;
  Matrix y;
  Vector z;
  Matrix lambda;
  Matrix mu;
  Matrix phi;
  std::map<std::string, double> residuals;
};

// ---------------------------------------------------------------------------
// Validation

enum class Verdict { Pass, Fail, Warn, NotApplicable };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Warn: return "warn";
    case Verdict::NotApplicable: return "n/a";
  }
  return "unknown";
}

struct AssumptionCheck {
  int assumption = 0;  // 1..10
  Verdict verdict = Verdict::NotApplicable;
  std::vector<Index> rows;  // offending rows (0-based)
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  const AssumptionCheck* find(int assumption) const {
    for (const auto& c : checks)
      if (c.assumption == assumption) return &c;
    return nullptr;
  }
  Verdict verdict(int assumption) const {
    const auto* c = find(assumption);
    return c ? c->verdict : Verdict::NotApplicable;
  }
  bool ok() const {
    for (const auto& c : checks)
      if (c.verdict == Verdict::Fail) return false;
    return true;
  }
};

namespace detail {

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace detail

/// Dimension and finiteness checks shared by validate() and every solver.
inline void check_dimensions(const ForwardProblem& problem, const Vector& x_hat) {
  using detail::require;
  require(problem.A.rows() > 0 && problem.A.cols() > 0, ErrorCode::DimensionMismatch,
          "A: must have at least one row and one column");
  require(problem.b.size() == problem.A.rows(), ErrorCode::DimensionMismatch,
          "b: length " + std::to_string(problem.b.size()) + " does not match " +
              std::to_string(problem.A.rows()) + " rows of A");
  require(x_hat.size() == problem.A.cols(), ErrorCode::DimensionMismatch,
          "x_hat: length " + std::to_string(x_hat.size()) + " does not match " +
              std::to_string(problem.A.cols()) + " columns of A");
  require(problem.A.allFinite(), ErrorCode::NonFinite, "A: entries must be finite");
  require(problem.b.allFinite(), ErrorCode::NonFinite, "b: entries must be finite");
  require(x_hat.allFinite(), ErrorCode::NonFinite, "x_hat: entries must be finite");
}

inline void check_structure(const ForwardProblem& problem, const UncertaintyStructure& structure) {
  using detail::require;
  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  if (structure.kind == UncertaintyKind::Nominal && structure.columns.empty()) return;
  require(static_cast<Index>(structure.columns.size()) == m, ErrorCode::DimensionMismatch,
          "uncertain_columns: expected one entry per constraint");
  for (Index i = 0; i < m; ++i) {
    const auto& cols = structure.row_columns(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      require(cols[k] >= 0 && cols[k] < n, ErrorCode::DimensionMismatch,
              "uncertain_columns[" + std::to_string(i + 1) + "]: column out of range");
      require(k == 0 || cols[k] > cols[k - 1], ErrorCode::InvalidArgument,
              "uncertain_columns[" + std::to_string(i + 1) + "]: columns must be strictly increasing");
    }
  }
  if (structure.kind == UncertaintyKind::Cardinality) {
    require(structure.alpha.rows() == m && structure.alpha.cols() == n, ErrorCode::DimensionMismatch,
            "alpha: must be m x n");
    for (Index i = 0; i < m; ++i)
      for (Index j : structure.row_columns(i)) {
        const double a = structure.alpha(i, j);
        require(std::isfinite(a), ErrorCode::NonFinite, "alpha: entries must be finite");
        require(a >= 0.0, ErrorCode::InvalidArgument, "alpha: entries must be nonnegative");
      }
  }
}

/// Clamp Gamma-hat into [0, |J_i|].
inline Vector clamp_gamma_prior(const Vector& gamma_hat, const UncertaintyStructure& structure) {
  Vector out = gamma_hat;
  for (Index i = 0; i < out.size(); ++i) {
    const double hi = static_cast<double>(structure.row_columns(i).size());
    out(i) = std::clamp(out(i), 0.0, hi);
  }
  return out;
}

/// Checks every assumption relevant to `model`. Dimension errors throw;
/// assumption failures are reported, never thrown. Assumption 2's b_i != 0
/// half is a warning because a zero right-hand side only risks (and does not
/// imply) a trivial imputation.
inline ValidationReport validate(const ForwardProblem& problem, const Vector& x_hat,
                                 const UncertaintyStructure& structure, ModelKind model,
                                 const SideConstraints* omega = nullptr, const Prior* prior = nullptr) {
  check_dimensions(problem, x_hat);
  check_structure(problem, structure);

  const Index m = problem.num_constraints();
  const Index n = problem.num_vars();
  const bool robust = model != ModelKind::NloDg && model != ModelKind::NloSd;
  if (robust && structure.kind == UncertaintyKind::Nominal)
    throw Error(ErrorCode::InvalidArgument, "uncertain_columns: required for robust models");
  if ((model == ModelKind::RloCcuDg || model == ModelKind::RloCcuSd) &&
      structure.kind != UncertaintyKind::Cardinality)
    throw Error(ErrorCode::InvalidArgument, "alpha: cardinality models need fixed deviations");

  if (omega != nullptr) {
    const Index p = parameter_count(model, problem, structure);
    detail::require(omega->h.size() == omega->G.rows(), ErrorCode::DimensionMismatch,
                    "omega.h: length must equal the number of rows of omega.G");
    (void)omega->canonical_matrix(p);
    detail::require(omega->G.allFinite() && omega->h.allFinite(), ErrorCode::NonFinite,
                    "omega: entries must be finite");
  }
  if (prior != nullptr) {
    const Vector xi = prior->weights_or_ones(m);
    detail::require(xi.size() == m, ErrorCode::DimensionMismatch, "prior.xi: expected one weight per constraint");
    detail::require((xi.array() >= 0.0).all(), ErrorCode::InvalidArgument, "prior.xi: weights must be nonnegative");
    if (model == ModelKind::NloSd || model == ModelKind::RloIuSd)
      detail::require(prior->matrix.rows() == m && prior->matrix.cols() == n, ErrorCode::DimensionMismatch,
                      "prior.estimates: must be m x n");
    if (model == ModelKind::RloCcuSd)
      detail::require(prior->gamma.size() == m, ErrorCode::DimensionMismatch,
                      "prior.estimates: expected one budget per constraint");
  }

  ValidationReport report;
  const Vector surplus = problem.surplus(x_hat);
  auto add = [&](int id, Verdict v, std::vector<Index> rows, std::string detail) {
    report.checks.push_back({id, v, std::move(rows), std::move(detail)});
  };

  // Assumption 1 (NLO-DG): b_i > 0, or a_i = 0 is excluded by omega. Certified
  // only when omega is a box; otherwise checked on the returned solution.
  if (model == ModelKind::NloDg) {
    std::vector<Index> rows;
    bool certified = true;
    Vector lo = Vector::Constant(m * n, -std::numeric_limits<double>::infinity());
    Vector hi = Vector::Constant(m * n, std::numeric_limits<double>::infinity());
    if (omega != nullptr && omega->G.rows() > 0) {
      const Matrix G = omega->canonical_matrix(m * n);
      for (Index r = 0; r < G.rows(); ++r) {
        Index nz = 0, col = -1;
        for (Index k = 0; k < G.cols(); ++k)
          if (G(r, k) != 0.0) { ++nz; col = k; }
        if (nz != 1) { certified = false; continue; }
        const double bound = omega->h(r) / G(r, col);
        if (G(r, col) > 0) hi(col) = std::min(hi(col), bound);
        else lo(col) = std::max(lo(col), bound);
      }
    }
    for (Index i = 0; i < m; ++i) {
      if (problem.b(i) > 0) continue;
      bool zero_allowed = true;
      for (Index j = 0; j < n; ++j)
        if (lo(i * n + j) > 0.0 || hi(i * n + j) < 0.0) zero_allowed = false;
      if (zero_allowed) rows.push_back(i);
    }
    if (!certified)
      add(1, rows.empty() ? Verdict::Pass : Verdict::Warn, rows,
          "omega is not a box; rows with b_i <= 0 are checked on the returned solution");
    else
      add(1, rows.empty() ? Verdict::Pass : Verdict::Fail, rows,
          rows.empty() ? "" : "a_i = 0 is admissible for rows with b_i <= 0");
  }

  if (model == ModelKind::NloSd) {
    std::vector<Index> zero_b, zero_prior;
    for (Index i = 0; i < m; ++i) {
      if (problem.b(i) == 0.0) zero_b.push_back(i);
      if (prior != nullptr && prior->matrix.row(i).isZero(0.0)) zero_prior.push_back(i);
    }
    if (!zero_prior.empty())
      add(2, Verdict::Fail, zero_prior, "prior row a-hat_i is zero");
    else if (!zero_b.empty())
      add(2, Verdict::Warn, zero_b, "b_i = 0 may produce a trivial imputation");
    else
      add(2, Verdict::Pass, {}, "");
    const bool nonzero = !x_hat.isZero(0.0);
    add(3, nonzero ? Verdict::Pass : Verdict::Fail, {}, nonzero ? "" : "x_hat is the zero vector");
  }

  if (model == ModelKind::RloIuDg || model == ModelKind::RloIuSd) {
    std::vector<Index> empty_rows, trivial_rows;
    for (Index i = 0; i < m; ++i) {
      const auto& cols = structure.row_columns(i);
      if (cols.empty()) empty_rows.push_back(i);
      bool certain_nonzero = false;
      for (Index j = 0; j < n; ++j)
        if (std::find(cols.begin(), cols.end(), j) == cols.end() && problem.A(i, j) != 0.0) certain_nonzero = true;
      if (!(problem.b(i) > 0.0 || certain_nonzero)) trivial_rows.push_back(i);
    }
    add(4, empty_rows.empty() ? Verdict::Pass : Verdict::Fail, empty_rows,
        empty_rows.empty() ? "" : "J_i is empty");
    add(5, trivial_rows.empty() ? Verdict::Pass : Verdict::Fail, trivial_rows,
        trivial_rows.empty() ? "" : "b_i <= 0 and no certain nonzero coefficient");
  }

  if (model == ModelKind::RloIuSd) {
    bool any = false;
    for (Index i = 0; i < m && !any; ++i)
      for (Index j : structure.row_columns(i))
        if (x_hat(j) != 0.0) any = true;
    add(6, any ? Verdict::Pass : Verdict::Fail, {}, any ? "" : "every uncertain column has x_hat_j = 0");
  }

  if (model == ModelKind::RloIuSd || model == ModelKind::RloCcuDg || model == ModelKind::RloCcuSd) {
    std::vector<Index> rows;
    for (Index i = 0; i < m; ++i)
      if (surplus(i) < -kFeasTol) rows.push_back(i);
    add(7, rows.empty() ? Verdict::Pass : Verdict::Fail, rows,
        rows.empty() ? "" : "x_hat violates the nominal constraints");
  }

  if (model == ModelKind::RloCcuDg || model == ModelKind::RloCcuSd) {
    // Assumption 8: Gamma-bar unique. Violated when surplus equals full
    // protection and some alpha_ij |x_j| vanishes.
    std::vector<Index> multi;
    for (Index i = 0; i < m; ++i) {
      double total = 0.0;
      bool has_zero = false;
      for (Index j : structure.row_columns(i)) {
        const double v = structure.alpha(i, j) * std::abs(x_hat(j));
        total += v;
        if (v == 0.0) has_zero = true;
      }
      if (has_zero && std::abs(surplus(i) - total) <= kFeasTol * std::max(1.0, total)) multi.push_back(i);
    }
    add(8, multi.empty() ? Verdict::Pass : Verdict::Warn, multi,
        multi.empty() ? "" : "Gamma-bar is not unique; the interval [Gamma-bar, |J_i|] is used");

    if (model == ModelKind::RloCcuSd && prior != nullptr) {
      std::vector<Index> out;
      for (Index i = 0; i < m; ++i) {
        const double hi = static_cast<double>(structure.row_columns(i).size());
        if (prior->gamma(i) < 0.0 || prior->gamma(i) > hi) out.push_back(i);
      }
      add(9, out.empty() ? Verdict::Pass : Verdict::Warn, out,
          out.empty() ? "" : "Gamma-hat_i outside [0, |J_i|]; clamped");
    }

    std::vector<Index> weak;
    for (Index i = 0; i < m; ++i) {
      const auto& cols = structure.row_columns(i);
      bool ok = false;
      for (Index j = 0; j < n; ++j) {
        const bool uncertain = std::find(cols.begin(), cols.end(), j) != cols.end();
        if (uncertain && std::abs(problem.A(i, j)) > structure.alpha(i, j)) ok = true;
        if (!uncertain && problem.A(i, j) != 0.0) ok = true;
      }
      if (!ok) weak.push_back(i);
    }
    add(10, weak.empty() ? Verdict::Pass : Verdict::Fail, weak,
        weak.empty() ? "" : "no coefficient dominates its deviation");
  }

  return report;
}

}  // namespace invopt
