#pragma once

#include <cstddef>
#include <vector>

#include "purelax/linalg.hpp"
#include "purelax/measure_space.hpp"

namespace purelax {

inline constexpr double kProbabilityTol = 1e-10;

/// Feasible actions per cell together with the tabulated integrand.
/// `g[cell]` is |actions[cell]| x n; row j is g(cell, actions[cell][j]).
struct DecisionInstance {
  DiscreteSpace space;
  std::vector<std::vector<long long>> actions;
  std::vector<Matrix> g;
  std::size_t n = 0;

  std::size_t num_cells() const noexcept { return space.size(); }
  std::size_t num_actions(std::size_t cell) const { return actions.at(cell).size(); }
  std::span<const double> point(std::size_t cell, std::size_t action) const { return g[cell].row(action); }

  /// Throws ValidationError on the first violated invariant.
  void validate() const;
};

/// Per-cell probability vector over that cell's action list.
struct RandomizedDecision {
  std::vector<Vector> probabilities;
};

/// Per-cell index into that cell's action list.
struct PureDecision {
  std::vector<std::size_t> choice;
  friend bool operator==(const PureDecision&, const PureDecision&) = default;
};

void validate_decision(const DecisionInstance& inst, const RandomizedDecision& phi);
void validate_decision(const DecisionInstance& inst, const PureDecision& f);

/// The point mass on each chosen action.
RandomizedDecision as_randomized(const DecisionInstance& inst, const PureDecision& f);

/// Per-cell mixture of g under phi (cells x n).
Matrix moment(const DecisionInstance& inst, const RandomizedDecision& phi);
/// Per-cell g at the chosen action (cells x n).
Matrix moment_pure(const DecisionInstance& inst, const PureDecision& f);

/// Instance on split_cells(space, copies): every child repeats its parent's
/// actions and integrand.
DecisionInstance split_instance(const DecisionInstance& inst, std::size_t copies);
RandomizedDecision split_decision(const RandomizedDecision& phi, std::size_t copies);

}  // namespace purelax
