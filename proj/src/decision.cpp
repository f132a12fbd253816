#include "purelax/decision.hpp"

#include <cmath>
#include <string>

#include "purelax/errors.hpp"

namespace purelax {

void DecisionInstance::validate() const {
  const auto report = validate_space(space);
  if (!report.ok) throw ValidationError("invalid space: " + report.failures.front());
  if (n == 0) throw ValidationError("moment dimension must be positive");
  if (actions.size() != space.size() || g.size() != space.size())
    throw DimensionMismatch("actions/g need one entry per cell (" + std::to_string(space.size()) + ")");
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (actions[i].empty()) throw ValidationError("cell " + std::to_string(i) + " has no actions");
    if (g[i].rows() != actions[i].size() || g[i].cols() != n)
      throw DimensionMismatch("cell " + std::to_string(i) + ": g must be |actions| x n");
    for (std::size_t j = 0; j < g[i].rows(); ++j)
      for (double v : g[i].row(j))
        if (!std::isfinite(v)) throw ValidationError("cell " + std::to_string(i) + ": non-finite integrand");
  }
}

void validate_decision(const DecisionInstance& inst, const RandomizedDecision& phi) {
  if (phi.probabilities.size() != inst.num_cells())
    throw DimensionMismatch("decision has " + std::to_string(phi.probabilities.size()) + " cells, instance has " +
                            std::to_string(inst.num_cells()));
  for (std::size_t i = 0; i < inst.num_cells(); ++i) {
    const auto& p = phi.probabilities[i];
    if (p.size() != inst.num_actions(i))
      throw DimensionMismatch("cell " + std::to_string(i) + ": probability vector length differs from action count");
    double total = 0.0;
    for (double v : p) {
      if (!std::isfinite(v) || v < 0.0) throw ValidationError("cell " + std::to_string(i) + ": negative probability");
      total += v;
    }
    if (std::abs(total - 1.0) > kProbabilityTol)
      throw ValidationError("cell " + std::to_string(i) + ": probabilities sum to " + std::to_string(total));
  }
}

void validate_decision(const DecisionInstance& inst, const PureDecision& f) {
  if (f.choice.size() != inst.num_cells())
    throw DimensionMismatch("decision has " + std::to_string(f.choice.size()) + " cells, instance has " +
                            std::to_string(inst.num_cells()));
  for (std::size_t i = 0; i < inst.num_cells(); ++i)
    if (f.choice[i] >= inst.num_actions(i))
      throw ValidationError("cell " + std::to_string(i) + ": action index out of range");
}

RandomizedDecision as_randomized(const DecisionInstance& inst, const PureDecision& f) {
  validate_decision(inst, f);
  RandomizedDecision phi;
  phi.probabilities.resize(inst.num_cells());
  for (std::size_t i = 0; i < inst.num_cells(); ++i) {
    phi.probabilities[i].assign(inst.num_actions(i), 0.0);
    phi.probabilities[i][f.choice[i]] = 1.0;
  }
  return phi;
}

Matrix moment(const DecisionInstance& inst, const RandomizedDecision& phi) {
  Matrix out(inst.num_cells(), inst.n);
  for (std::size_t i = 0; i < inst.num_cells(); ++i) {
    const auto& p = phi.probabilities.at(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] == 0.0) continue;
      const auto row = inst.point(i, j);
      for (std::size_t k = 0; k < inst.n; ++k) out(i, k) += p[j] * row[k];
    }
  }
  return out;
}

Matrix moment_pure(const DecisionInstance& inst, const PureDecision& f) {
  Matrix out(inst.num_cells(), inst.n);
  for (std::size_t i = 0; i < inst.num_cells(); ++i) {
    const auto row = inst.point(i, f.choice.at(i));
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

DecisionInstance split_instance(const DecisionInstance& inst, std::size_t copies) {
  DecisionInstance out;
  out.space = split_cells(inst.space, copies);
  out.n = inst.n;
  for (std::size_t i = 0; i < inst.num_cells(); ++i) {
    for (std::size_t k = 0; k < copies; ++k) {
      out.actions.push_back(inst.actions[i]);
      out.g.push_back(inst.g[i]);
    }
  }
  return out;
}

RandomizedDecision split_decision(const RandomizedDecision& phi, std::size_t copies) {
  RandomizedDecision out;
  for (const auto& p : phi.probabilities)
    for (std::size_t k = 0; k < copies; ++k) out.probabilities.push_back(p);
  return out;
}

}  // namespace purelax
