#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "purelax/decision.hpp"
#include "purelax/linalg.hpp"

namespace purelax {

inline constexpr double kWeightSnap = 1e-12;
inline constexpr double kReconstructionTol = 1e-8;

/// Sparse probability vector over the rows of some point set.
struct ConvexCombination {
  std::vector<std::size_t> indices;
  Vector weights;

  std::size_t support() const noexcept { return indices.size(); }
};

/// Per-cell convex combinations over the cell's action list with at most
/// n + 1 support points each.
struct CaratheodoryCertificate {
  std::size_t n = 0;
  std::vector<ConvexCombination> cells;
};

/// Weighted sum of the rows of `points`.
Vector barycenter(const Matrix& points, std::span<const double> weights);
Vector barycenter(const Matrix& points, const ConvexCombination& combo);

/// Carathéodory reduction. Repeatedly takes the first n + 2 support points,
/// finds an affine dependence sum c_i p_i = 0, sum c_i = 0, and shifts weight
/// along it until a weight vanishes (smallest index wins ties). The result has
/// at most n + 1 points and the same barycenter up to rounding.
///
/// Throws NumericalDegeneracy when no elimination step is possible or the
/// step count exceeds the initial support size.
ConvexCombination reduce_support(const Matrix& points, std::span<const double> weights,
                                 std::size_t* iterations = nullptr);

/// Applies reduce_support cell by cell to the support of phi. Indices in the
/// certificate refer to positions in each cell's action list.
CaratheodoryCertificate decompose_decision(const DecisionInstance& inst, const RandomizedDecision& phi);

/// Largest max-norm gap between a certificate's barycenters and I_phi(g).
double certificate_error(const DecisionInstance& inst, const RandomizedDecision& phi,
                         const CaratheodoryCertificate& cert);

}  // namespace purelax
