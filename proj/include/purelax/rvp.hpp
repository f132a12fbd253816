#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "purelax/decision.hpp"
#include "purelax/lp.hpp"
#include "purelax/measure_space.hpp"
#include "purelax/purify.hpp"

namespace purelax {

/// Robust variational problem on a finite space: maximise the worst-case
/// expected utility over the parameter grid subject to worst-case expected
/// cost budgets. The base instance's integrand is the stacked vector
/// (u, c_1, ..., c_m), so base.n == m + 1.
struct RvpInstance {
  DecisionInstance base;
  Vector budgets;
  DensityFamily densities;
  /// Optional uniform bound on |u|.
  std::optional<double> utility_bound;

  std::size_t num_costs() const noexcept { return budgets.size(); }
  std::size_t num_params() const noexcept { return densities.num_params(); }
  void validate(double density_tol = kDensityTol) const;
};

struct Evaluation {
  double objective = 0.0;
  Vector costs;
};

Evaluation evaluate(const RvpInstance& inst, const RandomizedDecision& phi, std::size_t param);
Evaluation evaluate(const RvpInstance& inst, const PureDecision& f, std::size_t param);
/// Throws UnknownParameter for labels outside the grid.
Evaluation evaluate(const RvpInstance& inst, const RandomizedDecision& phi, const std::string& param);

/// Epigraph LP of the relaxed problem. Variables: phi(cell, action) >= 0 in
/// cell order, then the free epigraph variable t (last). Rows: one
/// "objective >= t" row per parameter, one budget row per (cost, parameter)
/// ordered cost-major, one convexity row per cell.
lp::LinearProgram build_crvp(const RvpInstance& inst);
lp::LinearProgram build_crvp(const RvpInstance& inst, const Vector& budgets);

enum class CrvpMethod { Auto, Direct, ColumnGeneration };
const char* to_string(CrvpMethod m) noexcept;

struct CrvpOptions {
  CrvpMethod method = CrvpMethod::Auto;
  /// Auto picks the direct LP when it has at most this many rows.
  std::size_t direct_row_limit = 400;
  std::size_t max_columns = 20000;
};

struct CrvpSolution {
  RandomizedDecision phi;
  /// min over the grid of the expected utility of phi.
  double value = 0.0;
  CrvpMethod method = CrvpMethod::Direct;
  /// Upper bound on how far value is from the relaxed optimum.
  double optimality_gap = 0.0;
  std::size_t iterations = 0;
};

/// Solves the relaxed problem, either as the explicit epigraph LP or by
/// column generation over pure decisions (the master carries only the
/// parameter and budget rows; pricing is a per-cell argmin).
/// Throws InfeasibleConstraints or UnboundedProblem.
CrvpSolution solve_crvp(const RvpInstance& inst, const CrvpOptions& options = {});
CrvpSolution solve_crvp(const RvpInstance& inst, const Vector& budgets, const CrvpOptions& options = {});

struct ParamAudit {
  std::size_t param = 0;
  Evaluation relaxed;
  Evaluation pure;
  /// max_k |sum_w rho(., p) (I_phi(g_k) - I_f(g_k))|.
  double chain_residual = 0.0;
  bool within_epsilon = false;
};

struct RvpOptions {
  double density_tol = kDensityTol;
  double group_tol = 1e-9;
  bool strict = false;
  CrvpOptions crvp;
};

struct RvpSolution {
  RandomizedDecision relaxed;
  PureDecision pure;
  double relaxed_value = 0.0;
  double pure_value = 0.0;
  /// Purification bound carried through the densities.
  double epsilon = 0.0;
  std::size_t worst_objective_param = 0;
  std::vector<std::size_t> worst_constraint_params;
  /// max_p expected cost of the pure decision.
  Vector constraint_values;
  Vector relaxed_constraint_values;
  std::vector<ParamAudit> audit;
  PurifyReport report;
  BlockPartition blocks;
  CrvpMethod method = CrvpMethod::Direct;
  double crvp_gap = 0.0;
  /// Budgets the relaxed problem was solved with (tightened in strict mode).
  Vector solved_budgets;

  bool chain_verified() const;
  /// pure_value >= relaxed_value - epsilon and every cost <= budget + epsilon.
  bool feasible_within_epsilon(const Vector& budgets, double tol = lp::kFeasibilityTol) const;
};

/// Relaxation, LP solution and purification on the partition generated by
/// the densities. In strict mode the relaxed problem is re-solved with
/// budgets tightened by the observed purification slack until the pure
/// decision meets the original budgets.
RvpSolution solve_rvp(const RvpInstance& inst, const RvpOptions& options = {});

struct BruteForceResult {
  std::optional<PureDecision> best;
  double value = 0.0;
  std::size_t visited = 0;
};

/// Exhaustive search over pure decisions. Throws TooLarge past `limit`.
BruteForceResult brute_force_rvp(const RvpInstance& inst, std::size_t limit = 1'000'000);

RvpInstance split_instance(const RvpInstance& inst, std::size_t copies);

}  // namespace purelax
