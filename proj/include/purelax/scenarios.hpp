#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "purelax/decision.hpp"
#include "purelax/measure_space.hpp"
#include "purelax/rvp.hpp"

namespace purelax {

enum class ScenarioKind { Example1, Example2, Example3, Random };
const char* to_string(ScenarioKind kind) noexcept;
ScenarioKind scenario_kind_from_string(const std::string& name);  // throws ValidationError

/// Space and densities without payoffs.
struct Skeleton {
  DiscreteSpace space;
  DensityFamily densities;
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Random;
  std::uint64_t seed = 0;

  // example1: N1 x N2 grid on the unit square; empty p_grid means {k / N1}.
  std::size_t n1 = 4, n2 = 4;
  Vector p_grid;

  // example2
  Vector block_weights;
  std::vector<Vector> density_vectors;
  std::size_t subdivisions = 1;

  // example3: marginals is NQ x |P|
  std::size_t nq = 2, nr = 3;
  Matrix marginals;

  // random space shape
  std::size_t cells = 8;
  std::size_t blocks = 2;
  std::size_t params = 2;

  // payoffs, for every kind
  std::size_t min_actions = 2;
  std::size_t max_actions = 3;
  std::size_t m = 1;

  void validate() const;
};

/// Unit square, N1 x N2 equal cells, cell id i * N2 + j where i indexes the
/// first coordinate. rho(cell, p) = 1/p when the cell's first-coordinate
/// interval lies in [0, p], else 0. Blocks are the N1 first-coordinate
/// columns. Throws MisalignedParameter unless every p is k / N1, 1 <= k <= N1.
Skeleton gen_example1(std::size_t n1, std::size_t n2, const Vector& p_grid);
/// The aligned grid {1/N1, 2/N1, ..., 1}.
Vector example1_grid(std::size_t n1);

/// Block j is split into `subdivisions` equal cells; rho(cell, p) is the
/// j-th entry of density vector p. Throws InvalidDensity.
Skeleton gen_example2(const Vector& block_weights, const std::vector<Vector>& density_vectors,
                      std::size_t subdivisions);

/// NQ x NR product grid with uniform weights, cell id q * NR + r.
/// rho(cell, p) = marginals(q, p); blocks are the NQ columns.
/// Throws InvalidDensity unless each marginal averages to 1.
Skeleton gen_example3(std::size_t nq, std::size_t nr, const Matrix& marginals);

/// Deterministic generator; equal seeds give equal streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

/// Random probability vector per cell, with a random subset of actions zeroed.
RandomizedDecision random_decision(const DecisionInstance& inst, Rng& rng);

/// Adds random actions (u in [-1, 1], costs in (0, 1]) and budgets equal to
/// 1.1 times the worst-case cost of a random decision, so the relaxed
/// problem is feasible.
RvpInstance attach_payoffs(Skeleton skeleton, std::size_t min_actions, std::size_t max_actions, std::size_t m,
                           Rng& rng);

/// Random space with block-constant densities, then attach_payoffs.
RvpInstance gen_random(const ScenarioSpec& spec);

/// Dispatches on spec.kind.
RvpInstance generate(const ScenarioSpec& spec);

/// Formats a parameter value as its shortest round-trip decimal.
std::string param_label(double p);

}  // namespace purelax
