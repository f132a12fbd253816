#include "purelax/purify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "purelax/errors.hpp"
#include "purelax/lp.hpp"
#include "purelax/parallel.hpp"

namespace purelax {

namespace {

struct MergedSupport {
  std::vector<std::size_t> actions;  // representative action per merged point
  Vector weights;
  double spread = 0.0;
};

MergedSupport merge_support(const DecisionInstance& inst, std::size_t cell, const ConvexCombination& combo) {
  MergedSupport out;
  for (std::size_t s = 0; s < combo.support(); ++s) {
    const std::size_t a = combo.indices[s];
    const auto p = inst.point(cell, a);
    auto same = std::find_if(out.actions.begin(), out.actions.end(), [&](std::size_t b) {
      return std::ranges::equal(inst.point(cell, b), p);
    });
    if (same != out.actions.end()) {
      out.weights[static_cast<std::size_t>(same - out.actions.begin())] += combo.weights[s];
    } else {
      out.actions.push_back(a);
      out.weights.push_back(combo.weights[s]);
    }
  }
  for (std::size_t i = 0; i < out.actions.size(); ++i)
    for (std::size_t j = i + 1; j < out.actions.size(); ++j)
      out.spread = std::max(out.spread, max_abs_diff(inst.point(cell, out.actions[i]), inst.point(cell, out.actions[j])));
  return out;
}

double max_abs_g(const DecisionInstance& inst) {
  double m = 0.0;
  for (const auto& g : inst.g)
    for (std::size_t r = 0; r < g.rows(); ++r) m = std::max(m, max_abs(g.row(r)));
  return m;
}

}  // namespace

BlockPurification purify_block(const DecisionInstance& inst, const CaratheodoryCertificate& cert,
                               std::span<const std::size_t> cells) {
  if (cells.empty()) throw ValidationError("purify_block: empty block");
  const std::size_t n = inst.n;
  BlockPurification out;
  out.choice.resize(cells.size());
  out.spread.resize(cells.size());
  out.mass_residual.assign(n, 0.0);

  std::vector<MergedSupport> merged(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    merged[c] = merge_support(inst, cells[c], cert.cells.at(cells[c]));
    out.spread[c] = merged[c].spread;
    out.max_spread = std::max(out.max_spread, merged[c].spread);
    out.max_cell_weight = std::max(out.max_cell_weight, inst.space.cells[cells[c]].weight);
  }

  // Block LP over the cells that still mix several points.
  lp::LinearProgram lp;
  lp.sense = lp::Sense::Minimize;
  Vector start;
  std::vector<std::size_t> first_var(cells.size(), 0);
  std::vector<lp::Constraint> moment_rows(n);
  for (auto& row : moment_rows) row.relation = lp::Relation::Equal;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (merged[c].actions.size() < 2) continue;
    const double w = inst.space.cells[cells[c]].weight;
    first_var[c] = lp.num_variables();
    lp::Constraint convexity;
    convexity.relation = lp::Relation::Equal;
    convexity.rhs = 1.0;
    for (std::size_t j = 0; j < merged[c].actions.size(); ++j) {
      const std::size_t var = lp.add_variable(0.0, {0.0, 1.0});
      start.push_back(merged[c].weights[j]);
      convexity.terms.push_back({var, 1.0});
      const auto h = inst.point(cells[c], merged[c].actions[j]);
      for (std::size_t k = 0; k < n; ++k) {
        if (h[k] == 0.0 || w == 0.0) continue;
        moment_rows[k].terms.push_back({var, w * h[k]});
        moment_rows[k].rhs += w * h[k] * merged[c].weights[j];
      }
    }
    lp.add_constraint(std::move(convexity));
  }

  Vector z = start;
  if (lp.num_variables() > 0) {
    for (auto& row : moment_rows) lp.add_constraint(std::move(row));
    lp::BasicSolution vertex;
    try {
      vertex = lp::crossover(lp, start);
    } catch (const ValidationError& e) {
      throw InternalInfeasible(std::string("block LP rejects its certificate: ") + e.what());
    }
    if (vertex.status != lp::Status::Optimal) throw InternalInfeasible("block LP has no vertex");
    z = std::move(vertex.values);
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& m = merged[c];
    std::size_t pick = 0;
    if (m.actions.size() >= 2) {
      double best = -1.0;
      for (std::size_t j = 0; j < m.actions.size(); ++j) {
        const double zj = z[first_var[c] + j];
        if (zj > best) {
          best = zj;
          pick = j;
        }
      }
      if (best < 1.0 - 1e-9) ++out.fractional_cells;
    }
    out.choice[c] = m.actions[pick];

    const double w = inst.space.cells[cells[c]].weight;
    const auto chosen = inst.point(cells[c], m.actions[pick]);
    for (std::size_t j = 0; j < m.actions.size(); ++j) {
      const auto h = inst.point(cells[c], m.actions[j]);
      for (std::size_t k = 0; k < n; ++k) out.mass_residual[k] += w * m.weights[j] * h[k];
    }
    for (std::size_t k = 0; k < n; ++k) out.mass_residual[k] -= w * chosen[k];
  }
  out.mass_bound = static_cast<double>(n) * out.max_cell_weight * out.max_spread;
  return out;
}

bool PurifyReport::within_bounds() const {
  return std::all_of(blocks.begin(), blocks.end(), [&](const BlockReport& b) { return b.within_bound(slack); });
}

double PurifyReport::max_residual() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.residual_norm);
  return m;
}

double PurifyReport::max_bound() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.bound);
  return m;
}

PurifyReport residual_report(const DecisionInstance& inst, const RandomizedDecision& phi, const PureDecision& f,
                             const BlockPartition& blocks) {
  validate_decision(inst, phi);
  validate_decision(inst, f);
  const Matrix mixed = moment(inst, phi);
  const Matrix pure = moment_pure(inst, f);
  PurifyReport report;
  report.slack = kBoundSlack * (1.0 + max_abs_g(inst));
  report.global_residual.assign(inst.n, 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    BlockReport br;
    br.block = b;
    Vector mass(inst.n, 0.0);
    for (std::size_t id : blocks[b]) {
      const double w = inst.space.cells.at(id).weight;
      br.weight += w;
      for (std::size_t k = 0; k < inst.n; ++k) mass[k] += w * (mixed(id, k) - pure(id, k));
    }
    if (!(br.weight > 0.0)) throw DegenerateBlock("block " + std::to_string(b) + " has zero weight");
    br.residual.resize(inst.n);
    for (std::size_t k = 0; k < inst.n; ++k) {
      br.residual[k] = mass[k] / br.weight;
      report.global_residual[k] += mass[k];
    }
    br.residual_norm = max_abs(br.residual);
    report.blocks.push_back(std::move(br));
  }
  return report;
}

namespace {

void check_partition(const DecisionInstance& inst, const BlockPartition& blocks) {
  std::vector<int> seen(inst.num_cells(), 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw ValidationError("empty block " + std::to_string(b));
    for (std::size_t id : blocks[b]) {
      if (id >= inst.num_cells() || seen[id]++) throw ValidationError("blocks do not partition the cells");
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ValidationError("blocks do not cover every cell");
}

}  // namespace

PurifyResult purify(const DecisionInstance& inst, const RandomizedDecision& phi, const BlockPartition& blocks) {
  inst.validate();
  check_partition(inst, blocks);
  PurifyResult result;
  result.certificate = decompose_decision(inst, phi);

  std::vector<BlockPurification> parts(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t b) {
    try {
      parts[b] = purify_block(inst, result.certificate, blocks[b]);
    } catch (const InternalInfeasible& e) {
      throw InternalInfeasible("block " + std::to_string(b) + ": " + e.what());
    }
  });

  result.f.choice.assign(inst.num_cells(), 0);
  Vector cell_spread(inst.num_cells(), 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t c = 0; c < blocks[b].size(); ++c) {
      result.f.choice[blocks[b][c]] = parts[b].choice[c];
      cell_spread[blocks[b][c]] = parts[b].spread[c];
    }
  }

  result.report = residual_report(inst, phi, result.f, blocks);
  result.report.cell_spread = std::move(cell_spread);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& br = result.report.blocks[b];
    br.mass_bound = parts[b].mass_bound;
    br.bound = parts[b].mass_bound / br.weight;
    br.max_cell_weight = parts[b].max_cell_weight;
    br.max_spread = parts[b].max_spread;
    br.fractional_cells = parts[b].fractional_cells;
    result.report.global_bound += parts[b].mass_bound;
  }
  return result;
}

PurifyResult purify(const DecisionInstance& inst, const RandomizedDecision& phi) {
  return purify(inst, phi, inst.space.blocks);
}

bool MultiMeasureReport::within_bound() const {
  for (const auto& r : residuals)
    for (double v : r)
      if (std::abs(v) > bound + stacked.slack) return false;
  return true;
}

MultiMeasureResult purify_multimeasure(const DecisionInstance& inst, const RandomizedDecision& phi,
                                       const MeasureFamily& measures) {
  inst.validate();
  const auto check = validate_measures(inst.space, measures);
  if (!check.ok) throw InvalidDensity(check.failures.front());
  const std::size_t k = measures.size();
  const std::size_t m = inst.n;

  DecisionInstance stacked;
  stacked.space = inst.space;
  std::vector<std::size_t> all(inst.num_cells());
  std::iota(all.begin(), all.end(), 0);
  stacked.space.set_blocks({all});
  stacked.actions = inst.actions;
  stacked.n = k * m;
  stacked.g.reserve(inst.num_cells());
  for (std::size_t cell = 0; cell < inst.num_cells(); ++cell) {
    Matrix g(inst.num_actions(cell), k * m);
    for (std::size_t a = 0; a < inst.num_actions(cell); ++a)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t d = 0; d < m; ++d) g(a, i * m + d) = inst.g[cell](a, d) * measures.densities(cell, i);
    stacked.g.push_back(std::move(g));
  }

  auto res = purify(stacked, phi);
  MultiMeasureResult out;
  out.f = std::move(res.f);
  out.report.bound = res.report.blocks.front().mass_bound;
  out.report.residuals.assign(k, Vector(m, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t d = 0; d < m; ++d) out.report.residuals[i][d] = res.report.global_residual[i * m + d];
  out.report.stacked = std::move(res.report);
  return out;
}

}  // namespace purelax
