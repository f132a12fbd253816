#include <doctest.h>

#include "oracles.hpp"
#include "purelax/errors.hpp"
#include "purelax/io.hpp"
#include "purelax/scenarios.hpp"

using namespace purelax;

TEST_CASE("gen_example1 layout") {
  auto s = gen_example1(4, 4, {0.25, 0.5, 0.75, 1.0});
  CHECK(s.space.size() == 16);
  CHECK(s.space.num_blocks() == 4);
  for (const auto& b : s.space.blocks) CHECK(b.size() == 4);
  CHECK(validate_space(s.space).ok);
  CHECK(validate_densities(s.space, s.densities).ok);
  // p = 1 column is identically one
  for (std::size_t i = 0; i < 16; ++i) CHECK(s.densities.values(i, 3) == 1.0);
  // cell (i, j) = i * N2 + j: first column carries 1/p for every p
  CHECK(s.densities.values(0, 0) == 4.0);
  CHECK(s.densities.values(4, 0) == 0.0);
  CHECK(s.densities.values(4, 1) == 2.0);
  CHECK(s.densities.params == std::vector<std::string>{"0.25", "0.5", "0.75", "1"});
}

TEST_CASE("gen_example1 densities integrate to one") {
  for (std::size_t n1 : {1u, 2u, 3u, 5u, 8u, 16u})
    for (std::size_t n2 : {1u, 4u, 7u}) {
      auto s = gen_example1(n1, n2, example1_grid(n1));
      for (std::size_t p = 0; p < n1; ++p) {
        // closed form: (k cells per row) * N2 rows * (N1 / k) / (N1 N2) = 1
        const std::size_t k = p + 1;
        double mass = 0, count = 0;
        for (std::size_t i = 0; i < n1 * n2; ++i) {
          mass += s.space.cells[i].weight * s.densities.values(i, p);
          count += s.densities.values(i, p) > 0;
        }
        CHECK(count == static_cast<double>(k * n2));
        CHECK(std::abs(mass - 1.0) < 1e-12);
      }
      CHECK(blocks_from_densities(s.space, s.densities, 0.0).size() == n1);
    }
}

TEST_CASE("gen_example1 rejects misaligned parameters") {
  CHECK_THROWS_AS(gen_example1(4, 4, {0.3}), MisalignedParameter);
  CHECK_THROWS_AS(gen_example1(4, 4, {0.0}), MisalignedParameter);
  CHECK_THROWS_AS(gen_example1(4, 4, {1.25}), MisalignedParameter);
  CHECK_NOTHROW(gen_example1(3, 2, {1.0 / 3, 2.0 / 3}));
  // a partial grid yields one block per distinct density row
  auto partial = gen_example1(8, 2, {0.5, 1.0});
  CHECK(blocks_from_densities(partial.space, partial.densities, 0.0).size() == 2);
}

TEST_CASE("gen_example2") {
  auto s = gen_example2({0.5, 0.5}, {{2, 0}}, 1);
  CHECK(validate_densities(s.space, s.densities).ok);
  auto one = gen_example2({0.2, 0.3, 0.5}, {{1, 1, 1}}, 2);
  CHECK(blocks_from_densities(one.space, one.densities, 1e-9).size() == 1);
  CHECK_THROWS_AS(gen_example2({0.5, 0.5}, {{1, 0}}, 1), InvalidDensity);
  CHECK_THROWS_AS(gen_example2({0.5, 0.5}, {{3, -1}}, 1), InvalidDensity);
  CHECK_THROWS_AS(gen_example2({0.5, 0.6}, {{1, 1}}, 1), ValidationError);

  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Vector bw{0.2, 0.35, 0.45};
    std::vector<Vector> dens;
    for (int p = 0; p < 5; ++p) {
      Vector x(3);
      double mass = 0;
      for (std::size_t j = 0; j < 3; ++j) mass += (x[j] = rng.uniform(0.1, 2.0)) * bw[j];
      for (double& v : x) v /= mass;
      dens.push_back(x);
    }
    auto sk = gen_example2(bw, dens, rng.index(1, 5));
    CHECK(blocks_from_densities(sk.space, sk.densities, 1e-9) == sk.space.blocks);
  }
}

TEST_CASE("gen_example3") {
  auto uniform = gen_example3(2, 3, Matrix(2, 1, 1.0));
  CHECK(uniform.space.num_blocks() == 2);
  for (std::size_t i = 0; i < 6; ++i) CHECK(uniform.densities.values(i, 0) == 1.0);

  Matrix conc(4, 1, 0.0);
  conc(2, 0) = 4.0;
  auto peaked = gen_example3(4, 3, conc);
  for (std::size_t i = 0; i < 12; ++i) CHECK(peaked.densities.values(i, 0) == (i / 3 == 2 ? 4.0 : 0.0));
  CHECK(validate_densities(peaked.space, peaked.densities).ok);

  CHECK_THROWS_AS(gen_example3(2, 2, Matrix(2, 1, 2.0)), InvalidDensity);

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nq = rng.index(2, 6), nr = rng.index(1, 5);
    Matrix marg(nq, 3);
    for (std::size_t p = 0; p < 3; ++p) {
      double mass = 0;
      for (std::size_t q = 0; q < nq; ++q) mass += (marg(q, p) = rng.uniform(0.1, 2.0)) / nq;
      for (std::size_t q = 0; q < nq; ++q) marg(q, p) /= mass;
    }
    auto sk = gen_example3(nq, nr, marg);
    CHECK(blocks_from_densities(sk.space, sk.densities, 1e-9).size() == nq);
  }
}

TEST_CASE("gen_random is reproducible and feasible") {
  ScenarioSpec spec;
  spec.seed = 42;
  spec.cells = 20;
  spec.blocks = 4;
  spec.params = 3;
  spec.m = 2;
  const auto a = io::dump(io::to_json(gen_random(spec)));
  const auto b = io::dump(io::to_json(gen_random(spec)));
  CHECK(a == b);
  spec.seed = 43;
  CHECK(io::dump(io::to_json(gen_random(spec))) != a);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    spec.seed = seed;
    spec.m = seed % 3;
    auto inst = gen_random(spec);
    CHECK_NOTHROW(inst.validate());
    CHECK(solve_crvp(inst).phi.probabilities.size() == inst.base.num_cells());
    CHECK(blocks_from_densities(inst.base.space, inst.densities, 1e-9) == inst.base.space.blocks);
  }
  spec.m = 0;
  CHECK(gen_random(spec).budgets.empty());
}

TEST_CASE("generate dispatches on kind") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::Example1;
  auto inst = generate(spec);
  CHECK(inst.base.num_cells() == 16);
  CHECK(inst.num_params() == 4);
  CHECK_NOTHROW(inst.validate());

  spec.kind = ScenarioKind::Example3;
  spec.marginals = Matrix(2, 1, 1.0);
  CHECK(generate(spec).base.num_cells() == 6);

  CHECK(scenario_kind_from_string("example2") == ScenarioKind::Example2);
  CHECK_THROWS_AS(scenario_kind_from_string("example4"), ValidationError);
  spec.min_actions = 0;
  CHECK_THROWS_AS(generate(spec), ValidationError);
}
