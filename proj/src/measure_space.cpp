#include "purelax/measure_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "purelax/errors.hpp"

namespace purelax {

Vector DiscreteSpace::weights() const {
  Vector w(cells.size());
  std::transform(cells.begin(), cells.end(), w.begin(), [](const Cell& c) { return c.weight; });
  return w;
}

double DiscreteSpace::block_weight(std::size_t b) const {
  double total = 0.0;
  for (std::size_t id : blocks.at(b)) total += cells[id].weight;
  return total;
}

DiscreteSpace DiscreteSpace::from_block_ids(const Vector& weights,
                                            const std::vector<std::size_t>& block_of) {
  if (weights.size() != block_of.size()) throw DimensionMismatch("weights and block ids differ in length");
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t id : block_of) dense.emplace(id, 0);
  std::size_t next = 0;
  for (auto& [id, d] : dense) d = next++;
  DiscreteSpace space;
  space.blocks.resize(dense.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::size_t b = dense[block_of[i]];
    space.cells.push_back({weights[i], b});
    space.blocks[b].push_back(i);
  }
  return space;
}

void DiscreteSpace::set_blocks(BlockPartition partition) {
  blocks = std::move(partition);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t id : blocks[b])
      if (id < cells.size()) cells[id].block = b;
}

std::size_t DensityFamily::param_index(const std::string& label) const {
  auto it = std::find(params.begin(), params.end(), label);
  if (it == params.end()) throw UnknownParameter("unknown parameter '" + label + "'");
  return static_cast<std::size_t>(it - params.begin());
}

ValidationReport validate_space(const DiscreteSpace& space) {
  ValidationReport report;
  const std::size_t n = space.cells.size();
  if (n == 0) report.fail("space has no cells");

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = space.cells[i].weight;
    if (!std::isfinite(w) || w < 0.0) {
      std::ostringstream os;
      os << "cell " << i << " has invalid weight " << w;
      report.fail(os.str());
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kSpaceWeightTol) {
    std::ostringstream os;
    os << "weights sum " << total;
    report.fail(os.str());
  }

  std::vector<int> seen(n, 0);
  for (std::size_t b = 0; b < space.blocks.size(); ++b) {
    const auto& block = space.blocks[b];
    if (block.empty()) {
      report.fail("empty block " + std::to_string(b));
      continue;
    }
    double bw = 0.0;
    for (std::size_t id : block) {
      if (id >= n) {
        report.fail("block " + std::to_string(b) + " references missing cell " + std::to_string(id));
        continue;
      }
      ++seen[id];
      bw += space.cells[id].weight;
      if (space.cells[id].block != b)
        report.fail("cell " + std::to_string(id) + " block id disagrees with partition");
    }
    if (!(bw > 0.0)) report.fail("block " + std::to_string(b) + " has zero weight");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == 0) report.fail("cell " + std::to_string(i) + " not covered by any block");
    if (seen[i] > 1) report.fail("cell " + std::to_string(i) + " appears in several blocks");
  }
  return report;
}

ValidationReport validate_densities(const DiscreteSpace& space, const DensityFamily& fam, double tol) {
  ValidationReport report;
  if (fam.values.rows() != space.size()) {
    report.fail("density table has " + std::to_string(fam.values.rows()) + " rows for " +
                std::to_string(space.size()) + " cells");
    return report;
  }
  if (fam.values.cols() != fam.params.size()) {
    report.fail("density table width differs from the parameter count");
    return report;
  }
  if (fam.params.empty()) report.fail("parameter grid is empty");
  for (std::size_t p = 0; p < fam.params.size(); ++p) {
    double mass = 0.0;
    bool negative = false;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double v = fam.values(i, p);
      if (!std::isfinite(v) || v < 0.0) negative = true;
      mass += space.cells[i].weight * v;
    }
    if (negative) report.fail("density for parameter '" + fam.params[p] + "' has a negative or non-finite entry");
    if (std::abs(mass - 1.0) > tol) {
      std::ostringstream os;
      os << "density for parameter '" << fam.params[p] << "' integrates to " << mass;
      report.fail(os.str());
    }
  }
  return report;
}

ValidationReport validate_measures(const DiscreteSpace& space, const MeasureFamily& fam, double tol) {
  ValidationReport report;
  if (fam.densities.rows() != space.size()) {
    report.fail("measure table rows differ from cell count");
    return report;
  }
  if (fam.size() == 0) report.fail("no measures given");
  for (std::size_t k = 0; k < fam.size(); ++k) {
    double mass = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double v = fam.densities(i, k);
      if (!std::isfinite(v) || v < 0.0) report.fail("measure " + std::to_string(k) + " has a negative density");
      mass += space.cells[i].weight * v;
    }
    if (std::abs(mass - 1.0) > tol) {
      std::ostringstream os;
      os << "measure " << k << " integrates to " << mass;
      report.fail(os.str());
    }
  }
  return report;
}

Matrix conditional_expectation(const DiscreteSpace& space, const Matrix& values) {
  if (values.rows() != space.size()) throw DimensionMismatch("one value row per cell expected");
  const std::size_t d = values.cols();
  Matrix out(space.num_blocks(), d);
  for (std::size_t b = 0; b < space.num_blocks(); ++b) {
    double bw = 0.0;
    for (std::size_t id : space.blocks[b]) {
      const double w = space.cells[id].weight;
      bw += w;
      for (std::size_t k = 0; k < d; ++k) out(b, k) += w * values(id, k);
    }
    if (!(bw > 0.0)) throw DegenerateBlock("block " + std::to_string(b) + " has zero weight");
    for (std::size_t k = 0; k < d; ++k) out(b, k) /= bw;
  }
  return out;
}

Vector integrate(const DiscreteSpace& space, const Matrix& values) {
  if (values.rows() != space.size()) throw DimensionMismatch("one value row per cell expected");
  Vector out(values.cols(), 0.0);
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t k = 0; k < values.cols(); ++k) out[k] += space.cells[i].weight * values(i, k);
  return out;
}

BlockPartition blocks_from_densities(const DiscreteSpace& space, const DensityFamily& fam, double tol) {
  if (fam.values.rows() != space.size()) throw DimensionMismatch("density rows differ from cell count");
  if (tol < 0.0) throw ValidationError("grouping tolerance must be nonnegative");
  const std::size_t np = fam.values.cols();

  auto key_of = [&](std::size_t cell) {
    std::vector<std::int64_t> key(np);
    for (std::size_t p = 0; p < np; ++p) {
      double v = fam.values(cell, p);
      if (tol == 0.0) {
        if (v == 0.0) v = 0.0;  // fold -0.0 into +0.0
        key[p] = std::bit_cast<std::int64_t>(v);
      } else {
        const double q = std::round(v / tol);
        if (!(std::abs(q) < 9.0e18)) throw ValidationError("density value too large for grouping tolerance");
        key[p] = static_cast<std::int64_t>(q);
      }
    }
    return key;
  };

  std::map<std::vector<std::int64_t>, std::size_t> index;
  BlockPartition blocks;
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto [it, inserted] = index.emplace(key_of(i), blocks.size());
    if (inserted) blocks.emplace_back();
    blocks[it->second].push_back(i);
  }
  return blocks;
}

Vector atomlessness_margin(const DiscreteSpace& space) {
  Vector margin(space.num_blocks(), 0.0);
  for (std::size_t b = 0; b < space.num_blocks(); ++b)
    for (std::size_t id : space.blocks[b]) margin[b] = std::max(margin[b], space.cells[id].weight);
  return margin;
}

DiscreteSpace split_cells(const DiscreteSpace& space, std::size_t copies) {
  if (copies == 0) throw ValidationError("split factor must be at least 1");
  DiscreteSpace out;
  out.cells.reserve(space.size() * copies);
  for (const Cell& c : space.cells)
    for (std::size_t k = 0; k < copies; ++k) out.cells.push_back({c.weight / static_cast<double>(copies), c.block});
  out.blocks.resize(space.num_blocks());
  for (std::size_t b = 0; b < space.num_blocks(); ++b)
    for (std::size_t id : space.blocks[b])
      for (std::size_t k = 0; k < copies; ++k) out.blocks[b].push_back(id * copies + k);
  return out;
}

}  // namespace purelax
