#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "purelax/linalg.hpp"

namespace purelax {

inline constexpr double kSpaceWeightTol = 1e-12;
inline constexpr double kDensityTol = 1e-9;

struct Cell {
  double weight = 0.0;
  std::size_t block = 0;
};

using BlockPartition = std::vector<std::vector<std::size_t>>;

/// Finite weighted-cell approximation of a probability space. The block
/// partition plays the role of the conditioning sub-sigma-field: a function is
/// measurable with respect to it iff it is constant on every block.
struct DiscreteSpace {
  std::vector<Cell> cells;
  BlockPartition blocks;

  std::size_t size() const noexcept { return cells.size(); }
  std::size_t num_blocks() const noexcept { return blocks.size(); }
  Vector weights() const;
  double block_weight(std::size_t b) const;

  /// Space with the given weights and the block ids carried by `block_of`;
  /// blocks are numbered densely in order of the ids.
  static DiscreteSpace from_block_ids(const Vector& weights, const std::vector<std::size_t>& block_of);
  /// Replaces the partition, updating each cell's block id.
  void set_blocks(BlockPartition partition);
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;
  void fail(std::string message) {
    ok = false;
    failures.push_back(std::move(message));
  }
};

/// Nature's densities rho(cell, p) over a finite parameter grid. `values` is
/// cells x params.
struct DensityFamily {
  std::vector<std::string> params;
  Matrix values;

  std::size_t num_params() const noexcept { return params.size(); }
  std::size_t param_index(const std::string& label) const;  // throws UnknownParameter
};

/// Densities d mu_i / d mu of k probability measures, cells x k.
struct MeasureFamily {
  Matrix densities;
  std::size_t size() const noexcept { return densities.cols(); }
};

ValidationReport validate_space(const DiscreteSpace& space);
ValidationReport validate_densities(const DiscreteSpace& space, const DensityFamily& fam,
                                    double tol = kDensityTol);
ValidationReport validate_measures(const DiscreteSpace& space, const MeasureFamily& fam,
                                   double tol = kDensityTol);

/// Block-wise weighted average of per-cell vectors (cells x d) -> blocks x d.
/// Throws DegenerateBlock when a block has zero total weight.
Matrix conditional_expectation(const DiscreteSpace& space, const Matrix& values);

/// Weighted sum over all cells of per-cell vectors (cells x d) -> R^d.
Vector integrate(const DiscreteSpace& space, const Matrix& values);

/// Partition of the cells into classes of equal density rows. Each entry is
/// quantized to round(value / tol) (bit equality when tol == 0); cells whose
/// quantized rows coincide share a block. Blocks are numbered by their first
/// cell, so the result does not depend on how rows compare pairwise.
BlockPartition blocks_from_densities(const DiscreteSpace& space, const DensityFamily& fam,
                                     double tol);

/// Largest single-cell weight inside each block. A block dominated by one
/// cell is the finite stand-in for a conditional atom.
Vector atomlessness_margin(const DiscreteSpace& space);

/// Splits every cell into `copies` children of equal weight that keep the
/// parent's block. Child c of cell i gets index i * copies + c.
DiscreteSpace split_cells(const DiscreteSpace& space, std::size_t copies);

}  // namespace purelax
