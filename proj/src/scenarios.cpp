#include "purelax/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "purelax/errors.hpp"

namespace purelax {

const char* to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Example1: return "example1";
    case ScenarioKind::Example2: return "example2";
    case ScenarioKind::Example3: return "example3";
    case ScenarioKind::Random: return "random";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (auto k : {ScenarioKind::Example1, ScenarioKind::Example2, ScenarioKind::Example3, ScenarioKind::Random})
    if (name == to_string(k)) return k;
  throw ValidationError("unknown scenario kind '" + name + "'");
}

void ScenarioSpec::validate() const {
  if (min_actions < 1 || max_actions < min_actions) throw ValidationError("need 1 <= min_actions <= max_actions");
  switch (kind) {
    case ScenarioKind::Example1:
      if (n1 < 1 || n2 < 1) throw ValidationError("example1 resolutions must be >= 1");
      break;
    case ScenarioKind::Example2:
      if (subdivisions < 1) throw ValidationError("example2 subdivisions must be >= 1");
      break;
    case ScenarioKind::Example3:
      if (nq < 1 || nr < 1) throw ValidationError("example3 resolutions must be >= 1");
      break;
    case ScenarioKind::Random:
      if (cells < 1 || blocks < 1 || blocks > cells || params < 1)
        throw ValidationError("random scenario needs cells >= blocks >= 1 and params >= 1");
      break;
  }
}

std::string param_label(double p) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, end);
}

Vector example1_grid(std::size_t n1) {
  Vector grid(n1);
  for (std::size_t k = 1; k <= n1; ++k) grid[k - 1] = static_cast<double>(k) / static_cast<double>(n1);
  return grid;
}

Skeleton gen_example1(std::size_t n1, std::size_t n2, const Vector& p_grid) {
  if (n1 < 1 || n2 < 1) throw ValidationError("example1 resolutions must be >= 1");
  if (p_grid.empty()) throw ValidationError("example1 needs a non-empty parameter grid");
  std::vector<std::size_t> columns;
  for (double p : p_grid) {
    const double scaled = p * static_cast<double>(n1);
    const double k = std::round(scaled);
    if (!(std::abs(scaled - k) <= 1e-9 * std::max(1.0, scaled)) || k < 1 || k > static_cast<double>(n1))
      throw MisalignedParameter("p = " + param_label(p) + " is not a multiple of 1/" + std::to_string(n1) +
                                " in (0, 1]");
    columns.push_back(static_cast<std::size_t>(k));
  }

  Skeleton s;
  const double w = 1.0 / static_cast<double>(n1 * n2);
  std::vector<std::size_t> block_of(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) block_of[i * n2 + j] = i;
  s.space = DiscreteSpace::from_block_ids(Vector(n1 * n2, w), block_of);

  s.densities.values = Matrix(n1 * n2, p_grid.size());
  for (std::size_t p = 0; p < p_grid.size(); ++p) {
    const std::size_t k = columns[p];
    s.densities.params.push_back(param_label(p_grid[p]));
    // 1/p computed from the aligned fraction k / N1
    const double rho = static_cast<double>(n1) / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n2; ++j) s.densities.values(i * n2 + j, p) = rho;
  }
  return s;
}

Skeleton gen_example2(const Vector& block_weights, const std::vector<Vector>& density_vectors,
                      std::size_t subdivisions) {
  if (block_weights.empty() || subdivisions < 1) throw ValidationError("example2 needs blocks and subdivisions >= 1");
  double total = 0.0;
  for (double b : block_weights) {
    if (!(b > 0.0)) throw ValidationError("example2 block weights must be positive");
    total += b;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("example2 block weights sum to " + std::to_string(total));
  if (density_vectors.empty()) throw InvalidDensity("example2 needs at least one density vector");
  for (std::size_t p = 0; p < density_vectors.size(); ++p) {
    const auto& x = density_vectors[p];
    if (x.size() != block_weights.size())
      throw InvalidDensity("density vector " + std::to_string(p) + " has the wrong length");
    double mass = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!(x[j] >= 0.0)) throw InvalidDensity("density vector " + std::to_string(p) + " has a negative entry");
      mass += x[j] * block_weights[j];
    }
    if (std::abs(mass - 1.0) > 1e-9)
      throw InvalidDensity("density vector " + std::to_string(p) + " integrates to " + std::to_string(mass));
  }

  const std::size_t nb = block_weights.size();
  Vector weights;
  std::vector<std::size_t> block_of;
  for (std::size_t j = 0; j < nb; ++j)
    for (std::size_t s = 0; s < subdivisions; ++s) {
      weights.push_back(block_weights[j] / static_cast<double>(subdivisions));
      block_of.push_back(j);
    }
  Skeleton out;
  out.space = DiscreteSpace::from_block_ids(weights, block_of);
  out.densities.values = Matrix(weights.size(), density_vectors.size());
  for (std::size_t p = 0; p < density_vectors.size(); ++p) {
    out.densities.params.push_back("p" + std::to_string(p));
    for (std::size_t c = 0; c < weights.size(); ++c) out.densities.values(c, p) = density_vectors[p][block_of[c]];
  }
  return out;
}

Skeleton gen_example3(std::size_t nq, std::size_t nr, const Matrix& marginals) {
  if (nq < 1 || nr < 1) throw ValidationError("example3 resolutions must be >= 1");
  if (marginals.rows() != nq || marginals.cols() == 0)
    throw InvalidDensity("marginal table must have one row per Q-cell and at least one parameter");
  for (std::size_t p = 0; p < marginals.cols(); ++p) {
    double mass = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      if (!(marginals(q, p) >= 0.0)) throw InvalidDensity("marginal " + std::to_string(p) + " has a negative entry");
      mass += marginals(q, p) / static_cast<double>(nq);
    }
    if (std::abs(mass - 1.0) > 1e-9)
      throw InvalidDensity("marginal " + std::to_string(p) + " integrates to " + std::to_string(mass));
  }

  std::vector<std::size_t> block_of(nq * nr);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t r = 0; r < nr; ++r) block_of[q * nr + r] = q;
  Skeleton out;
  out.space = DiscreteSpace::from_block_ids(Vector(nq * nr, 1.0 / static_cast<double>(nq * nr)), block_of);
  out.densities.values = Matrix(nq * nr, marginals.cols());
  for (std::size_t p = 0; p < marginals.cols(); ++p) {
    out.densities.params.push_back("p" + std::to_string(p));
    for (std::size_t c = 0; c < nq * nr; ++c) out.densities.values(c, p) = marginals(block_of[c], p);
  }
  return out;
}

RandomizedDecision random_decision(const DecisionInstance& inst, Rng& rng) {
  RandomizedDecision phi;
  for (std::size_t i = 0; i < inst.num_cells(); ++i) {
    const std::size_t k = inst.num_actions(i);
    Vector probs(k);
    for (double& v : probs) v = rng.uniform() < 0.25 ? 0.0 : rng.uniform(0.05, 1.0);
    probs[rng.index(0, k - 1)] += rng.uniform(0.05, 1.0);
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& v : probs) v /= total;
    phi.probabilities.push_back(std::move(probs));
  }
  return phi;
}

RvpInstance attach_payoffs(Skeleton skeleton, std::size_t min_actions, std::size_t max_actions, std::size_t m,
                           Rng& rng) {
  RvpInstance inst;
  inst.base.space = std::move(skeleton.space);
  inst.densities = std::move(skeleton.densities);
  inst.base.n = m + 1;
  for (std::size_t i = 0; i < inst.base.num_cells(); ++i) {
    const std::size_t k = rng.index(min_actions, max_actions);
    std::vector<long long> ids(k);
    std::iota(ids.begin(), ids.end(), 0LL);
    Matrix g(k, m + 1);
    for (std::size_t a = 0; a < k; ++a) {
      g(a, 0) = rng.uniform(-1.0, 1.0);
      for (std::size_t c = 1; c <= m; ++c) g(a, c) = 1.0 - rng.uniform();  // (0, 1]
    }
    inst.base.actions.push_back(std::move(ids));
    inst.base.g.push_back(std::move(g));
  }

  const auto phi = random_decision(inst.base, rng);
  const Matrix mom = moment(inst.base, phi);
  inst.budgets.assign(m, 0.0);
  for (std::size_t p = 0; p < inst.num_params(); ++p)
    for (std::size_t c = 0; c < m; ++c) {
      double cost = 0.0;
      for (std::size_t i = 0; i < inst.base.num_cells(); ++i)
        cost += inst.base.space.cells[i].weight * inst.densities.values(i, p) * mom(i, c + 1);
      inst.budgets[c] = std::max(inst.budgets[c], cost);
    }
  for (double& a : inst.budgets) a *= 1.1;
  return inst;
}

RvpInstance gen_random(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Vector weights(spec.cells);
  for (double& w : weights) w = rng.uniform(0.5, 1.5);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;

  std::vector<std::size_t> block_of(spec.cells);
  for (std::size_t i = 0; i < spec.cells; ++i) block_of[i] = i < spec.blocks ? i : rng.index(0, spec.blocks - 1);

  Skeleton s;
  s.space = DiscreteSpace::from_block_ids(weights, block_of);
  s.densities.values = Matrix(spec.cells, spec.params);
  for (std::size_t p = 0; p < spec.params; ++p) {
    s.densities.params.push_back("p" + std::to_string(p));
    Vector x(spec.blocks);
    double mass = 0.0;
    for (std::size_t b = 0; b < spec.blocks; ++b) {
      x[b] = rng.uniform(0.2, 2.0);
      mass += x[b] * s.space.block_weight(b);
    }
    for (std::size_t i = 0; i < spec.cells; ++i) s.densities.values(i, p) = x[s.space.cells[i].block] / mass;
  }
  return attach_payoffs(std::move(s), spec.min_actions, spec.max_actions, spec.m, rng);
}

RvpInstance generate(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.kind == ScenarioKind::Random) return gen_random(spec);
  Skeleton s;
  switch (spec.kind) {
    case ScenarioKind::Example1:
      s = gen_example1(spec.n1, spec.n2, spec.p_grid.empty() ? example1_grid(spec.n1) : spec.p_grid);
      break;
    case ScenarioKind::Example2:
      s = gen_example2(spec.block_weights, spec.density_vectors, spec.subdivisions);
      break;
    default:
      s = gen_example3(spec.nq, spec.nr, spec.marginals);
      break;
  }
  Rng rng(spec.seed);
  return attach_payoffs(std::move(s), spec.min_actions, spec.max_actions, spec.m, rng);
}

}  // namespace purelax
