#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "purelax/caratheodory.hpp"
#include "purelax/decision.hpp"
#include "purelax/measure_space.hpp"

namespace purelax {

/// Floating-point allowance used when comparing a residual against its bound.
/// Scaled by (1 + max |g|); the bound itself is never inflated.
inline constexpr double kBoundSlack = 1e-12;

/// Result of purifying one block.
struct BlockPurification {
  /// Chosen action (index into the cell's action list), aligned with the
  /// block's cell list.
  std::vector<std::size_t> choice;
  /// sum_w (certificate barycenter - chosen point) over the block, mass scale.
  Vector mass_residual;
  /// n * max cell weight * max spread over the block.
  double mass_bound = 0.0;
  double max_cell_weight = 0.0;
  double max_spread = 0.0;
  /// Cells left fractional by the vertex solution before rounding (<= n).
  std::size_t fractional_cells = 0;
  /// Per-cell spread of the merged certificate support, aligned with the cells.
  Vector spread;
};

/// Purifies the cells of one block from their certificate slices. Solves the
/// block LP (z[cell, support point] in [0, 1], one convexity row per cell and
/// n moment rows) by walking the certificate itself to a vertex, then rounds
/// each fractional cell to its largest-z support point (ties: first point).
/// Support points with identical g are merged first.
///
/// Throws InternalInfeasible if the certificate is not a feasible point.
BlockPurification purify_block(const DecisionInstance& inst, const CaratheodoryCertificate& cert,
                               std::span<const std::size_t> cells);

struct BlockReport {
  std::size_t block = 0;
  double weight = 0.0;
  /// E(I_phi(g) | G) - E(I_f(g) | G) on this block.
  Vector residual;
  double residual_norm = 0.0;
  /// Guaranteed bound on residual_norm: mass_bound / weight.
  double bound = 0.0;
  double mass_bound = 0.0;
  double max_cell_weight = 0.0;
  double max_spread = 0.0;
  std::size_t fractional_cells = 0;

  bool within_bound(double slack = 0.0) const { return residual_norm * weight <= mass_bound + slack; }
};

struct PurifyReport {
  std::vector<BlockReport> blocks;
  /// sum_w (I_phi(g) - I_f(g)) over the whole space.
  Vector global_residual;
  /// Sum of the block mass bounds; bounds the global residual.
  double global_bound = 0.0;
  /// Slack used by within_bounds(), kBoundSlack * (1 + max |g|).
  double slack = 0.0;
  /// Per-cell spread of the merged certificate support.
  Vector cell_spread;

  bool within_bounds() const;
  double max_residual() const;
  double max_bound() const;
};

struct PurifyResult {
  PureDecision f;
  PurifyReport report;
  CaratheodoryCertificate certificate;
};

/// Residual report of (phi, f) on a partition with bounds taken from the
/// given per-block mass bounds.
PurifyReport residual_report(const DecisionInstance& inst, const RandomizedDecision& phi, const PureDecision& f,
                             const BlockPartition& blocks);

/// Finite purification: Carathéodory decomposition, then purify_block on each
/// block (concurrently). The chosen action in each cell always has positive
/// probability under phi.
PurifyResult purify(const DecisionInstance& inst, const RandomizedDecision& phi, const BlockPartition& blocks);

/// Same with the partition carried by the instance's space.
PurifyResult purify(const DecisionInstance& inst, const RandomizedDecision& phi);

struct MultiMeasureReport {
  /// residuals[i][k] = int I_phi(g_k) d mu_i - int I_f(g_k) d mu_i.
  std::vector<Vector> residuals;
  /// Shared bound on every |residuals[i][k]|.
  double bound = 0.0;
  PurifyReport stacked;

  bool within_bound() const;
};

struct MultiMeasureResult {
  PureDecision f;
  MultiMeasureReport report;
};

/// Matches the integrals of g against each of k measures simultaneously by
/// purifying the stacked integrand (g * d mu_1/d mu, ..., g * d mu_k/d mu)
/// over the trivial partition.
MultiMeasureResult purify_multimeasure(const DecisionInstance& inst, const RandomizedDecision& phi,
                                       const MeasureFamily& measures);

}  // namespace purelax
