#include "purelax/caratheodory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "purelax/errors.hpp"
#include "purelax/parallel.hpp"

namespace purelax {

Vector barycenter(const Matrix& points, std::span<const double> weights) {
  if (weights.size() != points.rows())
    throw DimensionMismatch("barycenter: " + std::to_string(weights.size()) + " weights for " +
                            std::to_string(points.rows()) + " points");
  Vector out(points.cols(), 0.0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (weights[i] == 0.0) continue;
    for (std::size_t k = 0; k < points.cols(); ++k) out[k] += weights[i] * points(i, k);
  }
  return out;
}

Vector barycenter(const Matrix& points, const ConvexCombination& combo) {
  Vector out(points.cols(), 0.0);
  for (std::size_t s = 0; s < combo.support(); ++s) {
    const auto row = points.row(combo.indices.at(s));
    for (std::size_t k = 0; k < points.cols(); ++k) out[k] += combo.weights[s] * row[k];
  }
  return out;
}

ConvexCombination reduce_support(const Matrix& points, std::span<const double> weights,
                                 std::size_t* iterations) {
  if (weights.size() != points.rows()) throw DimensionMismatch("reduce_support: weight count differs from point count");
  const std::size_t n = points.cols();

  ConvexCombination combo;
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ValidationError("reduce_support: negative weight");
    total += weights[i];
    if (weights[i] > 0.0) {
      combo.indices.push_back(i);
      combo.weights.push_back(weights[i]);
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("reduce_support: weights do not sum to 1");

  const std::size_t initial = combo.support();
  std::size_t steps = 0;
  while (combo.support() > n + 1) {
    if (++steps > initial) throw NumericalDegeneracy("reduce_support: elimination did not terminate");

    // Affine dependence among the first n + 2 support points.
    const std::size_t k = n + 2;
    Matrix system(n + 1, k);
    for (std::size_t s = 0; s < k; ++s) {
      const auto p = points.row(combo.indices[s]);
      for (std::size_t d = 0; d < n; ++d) system(d, s) = p[d];
      system(n, s) = 1.0;
    }
    auto c = null_vector(system);
    if (!c) throw NumericalDegeneracy("reduce_support: no affine dependence found");
    if (*std::max_element(c->begin(), c->end()) <= 0.0)
      for (double& v : *c) v = -v;

    double step = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < k; ++s)
      if ((*c)[s] > 0.0) step = std::min(step, combo.weights[s] / (*c)[s]);
    if (!std::isfinite(step)) throw NumericalDegeneracy("reduce_support: dependence has no positive entry");

    std::size_t hit = k;
    for (std::size_t s = 0; s < k && hit == k; ++s)
      if ((*c)[s] > 0.0 && combo.weights[s] / (*c)[s] <= step * (1.0 + 1e-12)) hit = s;

    for (std::size_t s = 0; s < k; ++s) combo.weights[s] -= step * (*c)[s];
    combo.weights[hit] = 0.0;

    ConvexCombination next;
    for (std::size_t s = 0; s < combo.support(); ++s) {
      if (combo.weights[s] < kWeightSnap) continue;
      next.indices.push_back(combo.indices[s]);
      next.weights.push_back(combo.weights[s]);
    }
    combo = std::move(next);
  }
  if (iterations) *iterations = steps;
  return combo;
}

CaratheodoryCertificate decompose_decision(const DecisionInstance& inst, const RandomizedDecision& phi) {
  validate_decision(inst, phi);
  CaratheodoryCertificate cert;
  cert.n = inst.n;
  cert.cells.resize(inst.num_cells());
  parallel_for(inst.num_cells(), [&](std::size_t cell) {
    const auto& probs = phi.probabilities[cell];
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < probs.size(); ++j)
      if (probs[j] > 0.0) support.push_back(j);
    Matrix pts(support.size(), inst.n);
    Vector w(support.size());
    double total = 0.0;
    for (std::size_t s = 0; s < support.size(); ++s) {
      const auto row = inst.point(cell, support[s]);
      std::copy(row.begin(), row.end(), pts.row(s).begin());
      w[s] = probs[support[s]];
      total += w[s];
    }
    for (double& v : w) v /= total;
    ConvexCombination local;
    try {
      local = reduce_support(pts, w);
    } catch (const NumericalDegeneracy& e) {
      throw NumericalDegeneracy(std::string(e.what()) + " (cell " + std::to_string(cell) + ")", cell);
    }
    for (auto& idx : local.indices) idx = support[idx];
    cert.cells[cell] = std::move(local);
  });
  return cert;
}

double certificate_error(const DecisionInstance& inst, const RandomizedDecision& phi,
                         const CaratheodoryCertificate& cert) {
  const Matrix target = moment(inst, phi);
  double worst = 0.0;
  for (std::size_t i = 0; i < inst.num_cells(); ++i) {
    const Vector b = barycenter(inst.g[i], cert.cells.at(i));
    worst = std::max(worst, max_abs_diff(b, target.row(i)));
  }
  return worst;
}

}  // namespace purelax
