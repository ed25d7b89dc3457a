#pragma once

// Runs the solver named by a problem document.

#include "invopt/cardinality.hpp"
#include "invopt/interval.hpp"
#include "invopt/io.hpp"
#include "invopt/nominal.hpp"
#include "invopt/verify.hpp"

#include <string>

namespace invopt {

struct DispatchResult {
  ValidationReport validation;
  InverseSolution solution;
};

/// Assumptions whose failure makes the input unusable rather than the
/// inverse problem infeasible or trivial.
inline bool is_rejecting(int assumption) { return assumption == 3 || assumption == 4; }

/// Validate the document, reject hard failures, and solve.
inline DispatchResult solve_problem(const io::ProblemFile& pf) {
  const auto structure = pf.structure();
  const auto omega = pf.side_constraints();
  const auto prior = pf.make_prior();
  const bool gap = is_gap_model(pf.model);
  DispatchResult out;
  out.validation = validate(pf.problem, pf.x_hat, structure, pf.model, gap ? &omega : nullptr, gap ? nullptr : &prior);
  for (const auto& c : out.validation.checks)
    if (c.verdict == Verdict::Fail && is_rejecting(c.assumption))
      throw Error(c.assumption == 3 ? ErrorCode::ZeroObservation : ErrorCode::InvalidArgument,
                  "assumption " + std::to_string(c.assumption) + ": " + c.detail);
  switch (pf.model) {
    case ModelKind::NloDg: out.solution = solve_nlo_dg(pf.problem, pf.x_hat, omega); break;
    case ModelKind::NloSd: out.solution = solve_nlo_sd(pf.problem, pf.x_hat, prior); break;
    case ModelKind::RloIuDg: out.solution = solve_rlo_iu_dg(pf.problem, pf.x_hat, structure, omega); break;
    case ModelKind::RloIuSd: out.solution = solve_rlo_iu_sd(pf.problem, pf.x_hat, structure, prior); break;
    case ModelKind::RloCcuDg: out.solution = solve_rlo_ccu_dg(pf.problem, pf.x_hat, structure, omega); break;
    case ModelKind::RloCcuSd: out.solution = solve_rlo_ccu_sd(pf.problem, pf.x_hat, structure, prior); break;
  }
  return out;
}

/// Certificate of `sol` against the document's data.
inline CertificateReport certify(const io::ProblemFile& pf, const InverseSolution& sol) {
  const auto structure = pf.structure();
  const auto omega = pf.side_constraints();
  const auto prior = pf.make_prior();
  const bool gap = is_gap_model(pf.model);
  return check_certificate(pf.model, pf.problem, pf.x_hat, structure, sol, gap ? &omega : nullptr,
                           gap ? nullptr : &prior);
}

}  // namespace invopt
