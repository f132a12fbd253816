#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "purelax/linalg.hpp"

namespace purelax::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kGapTol = 1e-6;

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

struct Term {
  std::size_t var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;

  /// Constraint from a dense coefficient vector; zero coefficients are skipped.
  static Constraint dense(std::span<const double> coefficients, Relation relation, double rhs);
  double activity(std::span<const double> x) const;
};

struct Bounds {
  double lo = 0.0;
  double hi = kInfinity;
};

struct LinearProgram {
  Sense sense = Sense::Maximize;
  Vector objective;
  std::vector<Constraint> constraints;
  std::vector<Bounds> bounds;

  std::size_t num_variables() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return constraints.size(); }

  std::size_t add_variable(double cost, Bounds b = {});
  void add_constraint(Constraint c) { constraints.push_back(std::move(c)); }

  /// Throws ValidationError on out-of-range indices, lo > hi or NaNs.
  void validate() const;
  double evaluate(std::span<const double> x) const;
  /// Largest violation of any row or bound at x.
  double max_violation(std::span<const double> x) const;
};

struct BasicSolution {
  Status status = Status::Infeasible;
  Vector values;
  double objective_value = 0.0;
  /// Basic structural variables, ascending.
  std::vector<std::size_t> basis;
  /// Row multipliers in the problem's own sense: for a maximization a new
  /// column (cost c, coefficients a) would improve the optimum iff
  /// c - duals . a > 0; for a minimization iff it is < 0.
  Vector duals;
  std::size_t iterations = 0;
  /// Primal minus Lagrangian dual bound at the returned duals (>= 0 up to rounding).
  double duality_gap = 0.0;
};

struct SolverOptions {
  std::size_t max_iterations = 0;  // 0: derived from problem size
  double feasibility_tol = kFeasibilityTol;
  double optimality_tol = 1e-9;
  std::size_t refactor_interval = 64;
};

/// Bounded-variable dense revised simplex, two phases. Dantzig pricing with a
/// switch to Bland's rule after 2 * (variables + rows) iterations.
/// Throws IterationLimit or SolverFailure.
BasicSolution solve(const LinearProgram& lp, const SolverOptions& options = {});

/// Phase one only: a basic feasible point or Status::Infeasible.
BasicSolution feasibility(const LinearProgram& lp, const SolverOptions& options = {});

/// Moves a feasible point to a basic feasible solution without worsening the
/// objective. Each step finds a direction in the null space of the rows
/// touched by a few strictly-interior variables and follows it until one more
/// variable reaches a bound. On return the interior variables have linearly
/// independent columns, so at most num_rows() of them remain.
///
/// Throws ValidationError if `start` violates the LP by more than `tol`.
/// Returns Status::Unbounded if an improving ray is found.
BasicSolution crossover(const LinearProgram& lp, std::span<const double> start, double tol = kFeasibilityTol);

/// Number of variables strictly between their bounds (by more than tol).
std::size_t count_between_bounds(const LinearProgram& lp, std::span<const double> x, double tol = 1e-9);

/// Row-oriented text dump for debugging.
std::string to_text(const LinearProgram& lp);

const char* to_string(Status s) noexcept;

}  // namespace purelax::lp
