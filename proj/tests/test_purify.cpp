#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "purelax/errors.hpp"
#include "purelax/purify.hpp"
#include "purelax/scenarios.hpp"

using namespace purelax;

namespace {

DecisionInstance two_cell_binary() {
  DecisionInstance inst;
  inst.space = DiscreteSpace::from_block_ids({0.5, 0.5}, {0, 0});
  inst.actions = {{0, 1}, {0, 1}};
  inst.g = {Matrix::from_rows({{0}, {1}}), Matrix::from_rows({{0}, {1}})};
  inst.n = 1;
  return inst;
}

void check_bounds_against_oracle(const DecisionInstance& inst, const RandomizedDecision& phi, const PurifyResult& res,
                                 const BlockPartition& blocks) {
  const auto mass = oracle::block_mass_residuals(inst, phi, res.f, blocks);
  REQUIRE(res.report.blocks.size() == blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& br = res.report.blocks[b];
    const double independent = oracle::block_mass_bound(inst, phi, blocks[b]);
    CHECK(br.mass_bound <= independent + 1e-15);
    CHECK(max_abs(mass[b]) <= br.mass_bound + res.report.slack);
    CHECK(br.residual_norm <= br.bound + res.report.slack / br.weight);
    CHECK(br.within_bound(res.report.slack));
    // report residual is the conditional-expectation difference
    for (std::size_t k = 0; k < inst.n; ++k) CHECK(std::abs(br.residual[k] * br.weight - mass[b][k]) < 1e-13);
  }
}

}  // namespace

TEST_CASE("moments") {
  DecisionInstance inst;
  inst.space = DiscreteSpace::from_block_ids({1.0}, {0});
  inst.actions = {{0, 1}};
  inst.g = {Matrix::from_rows({{0, 2}, {2, 0}})};
  inst.n = 2;
  auto m = moment(inst, RandomizedDecision{{{0.5, 0.5}}});
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 1.0);
  auto mp = moment_pure(inst, PureDecision{{1}});
  CHECK(mp(0, 0) == 2.0);
  CHECK(mp(0, 1) == 0.0);

  Rng rng(2);
  auto big = oracle::random_decision_instance(rng, 60, 4, 3, 1, 6);
  auto phi = oracle::full_support_decision(big, rng);
  auto a = moment(big, phi), b = oracle::moment(big, phi);
  for (std::size_t i = 0; i < 60; ++i) CHECK(max_abs_diff(a.row(i), b.row(i)) < 1e-13);
}

TEST_CASE("decision validation") {
  auto inst = two_cell_binary();
  CHECK_THROWS_AS(validate_decision(inst, RandomizedDecision{{{0.5, 0.5}}}), DimensionMismatch);
  CHECK_THROWS_AS(validate_decision(inst, RandomizedDecision{{{0.5, 0.6}, {1, 0}}}), ValidationError);
  CHECK_THROWS_AS(validate_decision(inst, RandomizedDecision{{{1.5, -0.5}, {1, 0}}}), ValidationError);
  CHECK_THROWS_AS(validate_decision(inst, PureDecision{{0, 2}}), ValidationError);
  CHECK_NOTHROW(validate_decision(inst, RandomizedDecision{{{0.5, 0.5}, {1, 0}}}));

  auto empty = inst;
  empty.actions[1].clear();
  empty.g[1] = Matrix(0, 1);
  CHECK_THROWS_AS(empty.validate(), ValidationError);
  auto nan = inst;
  nan.g[0](0, 0) = std::nan("");
  CHECK_THROWS_AS(nan.validate(), ValidationError);
}

TEST_CASE("purify_block splits two binary cells") {
  auto inst = two_cell_binary();
  RandomizedDecision phi{{{0.5, 0.5}, {0.5, 0.5}}};
  auto res = purify(inst, phi);
  CHECK(res.f.choice[0] != res.f.choice[1]);
  CHECK(res.report.blocks[0].residual_norm == 0.0);
  // brute force over the 4 pure decisions: exactly the two mixed ones are exact
  int exact = 0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) exact += (0.5 * a + 0.5 * b == 0.5);
  CHECK(exact == 2);
}

TEST_CASE("purify is the identity on pure decisions") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = oracle::random_decision_instance(rng, 30, 3, 2, 1, 5);
    PureDecision f;
    for (std::size_t i = 0; i < 30; ++i) f.choice.push_back(rng.index(0, inst.num_actions(i) - 1));
    auto res = purify(inst, as_randomized(inst, f));
    CHECK(res.f == f);
    for (const auto& b : res.report.blocks) CHECK(b.residual_norm == 0.0);
  }
}

TEST_CASE("purify_block bound on random blocks") {
  Rng rng(100);
  for (int seed = 0; seed < 100; ++seed) {
    const std::size_t n = rng.index(1, 3);
    auto inst = oracle::random_decision_instance(rng, 20, 1, n, 1, n + 3);
    auto phi = oracle::full_support_decision(inst, rng);
    auto cert = decompose_decision(inst, phi);
    std::vector<std::size_t> cells(20);
    std::iota(cells.begin(), cells.end(), 0);
    auto part = purify_block(inst, cert, cells);
    PureDecision f{part.choice};
    auto mass = oracle::block_mass_residuals(inst, phi, f, {cells});
    CHECK(max_abs(mass[0]) <= oracle::block_mass_bound(inst, phi, cells) + 1e-12);
    CHECK(max_abs_diff(mass[0], part.mass_residual) < 1e-12);
    CHECK(part.fractional_cells <= n);
  }
}

TEST_CASE("purify property: bound, support preservation, fractional count") {
  Rng rng(555);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = rng.index(1, 4), cells = rng.index(5, 200), blocks = rng.index(1, 5);
    auto inst = oracle::random_decision_instance(rng, cells, blocks, n, 1, 6);
    auto phi = random_decision(inst, rng);
    auto res = purify(inst, phi);
    check_bounds_against_oracle(inst, phi, res, inst.space.blocks);
    for (std::size_t i = 0; i < cells; ++i) CHECK(phi.probabilities[i][res.f.choice[i]] > 0.0);
    for (const auto& b : res.report.blocks) CHECK(b.fractional_cells <= n);
    CHECK(res.report.within_bounds());
  }
}

TEST_CASE("single block matches global moments within the bound") {
  Rng rng(8);
  auto inst = oracle::random_decision_instance(rng, 100, 1, 3, 2, 5);
  auto phi = oracle::full_support_decision(inst, rng);
  auto res = purify(inst, phi);
  const Vector global_phi = integrate(inst.space, oracle::moment(inst, phi));
  const Vector global_f = integrate(inst.space, oracle::moment(inst, res.f));
  CHECK(max_abs_diff(global_phi, global_f) <= res.report.global_bound + res.report.slack);
  CHECK(max_abs_diff(res.report.global_residual, Vector{global_phi[0] - global_f[0], global_phi[1] - global_f[1],
                                                         global_phi[2] - global_f[2]}) < 1e-13);
}

TEST_CASE("singleton blocks expose the atom failure mode") {
  DecisionInstance inst;
  inst.space = DiscreteSpace::from_block_ids({0.5, 0.5}, {0, 1});
  inst.actions = {{0, 1}, {0, 1}};
  inst.g = {Matrix::from_rows({{0}, {1}}), Matrix::from_rows({{2}, {4}})};
  inst.n = 1;
  RandomizedDecision phi{{{0.3, 0.7}, {0.5, 0.5}}};
  auto res = purify(inst, phi);
  // each cell must pick a point; the residual is the within-cell deviation
  const double dev0 = 0.7 - (res.f.choice[0] == 1 ? 1.0 : 0.0);
  const double dev1 = 3.0 - (res.f.choice[1] == 1 ? 4.0 : 2.0);
  CHECK(res.report.blocks[0].residual[0] == doctest::Approx(dev0));
  CHECK(res.report.blocks[1].residual[0] == doctest::Approx(dev1));
  CHECK(res.report.blocks[0].residual_norm > 0.0);
  CHECK(res.report.within_bounds());
}

TEST_CASE("Example 1 space with four first-coordinate blocks") {
  auto sk = gen_example1(64, 64, {0.25, 0.5, 0.75, 1.0});
  Rng rng(64);
  auto inst = attach_payoffs(sk, 3, 3, 1, rng).base;  // n = 2
  auto blocks = blocks_from_densities(inst.space, sk.densities, 1e-9);
  REQUIRE(blocks.size() == 4);
  auto phi = oracle::full_support_decision(inst, rng);
  auto res = purify(inst, phi, blocks);
  check_bounds_against_oracle(inst, phi, res, blocks);
  const auto mass = oracle::block_mass_residuals(inst, phi, res.f, blocks);
  for (std::size_t b = 0; b < 4; ++b) {
    const double spread = res.report.blocks[b].max_spread;
    CHECK(max_abs(mass[b]) <= 2.0 * (1.0 / 4096) * spread + res.report.slack);
  }
}

TEST_CASE("refinement divides every bound by the copy count") {
  Rng rng(41);
  auto inst = oracle::random_decision_instance(rng, 40, 4, 2, 2, 4);
  auto phi = oracle::full_support_decision(inst, rng);
  auto coarse = purify(inst, phi);
  for (std::size_t q : {2u, 3u, 4u}) {
    auto fine = purify(split_instance(inst, q), split_decision(phi, q));
    for (std::size_t b = 0; b < 4; ++b)
      CHECK(fine.report.blocks[b].bound == doctest::Approx(coarse.report.blocks[b].bound / q).epsilon(1e-12));
  }
}

TEST_CASE("tiny instances: purify never loses to exhaustive search") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t cells = rng.index(1, 8), n = rng.index(1, 2);
    auto inst = oracle::random_decision_instance(rng, cells, 1, n, 1, 3);
    auto phi = random_decision(inst, rng);
    auto res = purify(inst, phi);
    const double bound = res.report.blocks[0].mass_bound + res.report.slack;
    PureDecision f;
    f.choice.assign(cells, 0);
    bool oracle_hit = false;
    for (;;) {
      const auto r = oracle::block_mass_residuals(inst, phi, f, inst.space.blocks)[0];
      oracle_hit = oracle_hit || max_abs(r) <= bound;
      std::size_t i = 0;
      while (i < cells && ++f.choice[i] == inst.num_actions(i)) f.choice[i++] = 0;
      if (i == cells) break;
    }
    if (oracle_hit) CHECK(max_abs(oracle::block_mass_residuals(inst, phi, res.f, inst.space.blocks)[0]) <= bound);
  }
}

TEST_CASE("residual_report agrees with purify") {
  Rng rng(9);
  auto inst = oracle::random_decision_instance(rng, 80, 5, 3, 1, 5);
  auto phi = random_decision(inst, rng);
  auto res = purify(inst, phi);
  auto again = residual_report(inst, phi, res.f, inst.space.blocks);
  for (std::size_t b = 0; b < 5; ++b)
    CHECK(max_abs_diff(again.blocks[b].residual, res.report.blocks[b].residual) <= 1e-12);
}

TEST_CASE("purify rejects bad partitions") {
  auto inst = two_cell_binary();
  RandomizedDecision phi{{{0.5, 0.5}, {0.5, 0.5}}};
  CHECK_THROWS_AS(purify(inst, phi, BlockPartition{{0}}), ValidationError);
  CHECK_THROWS_AS(purify(inst, phi, BlockPartition{{0, 1}, {1}}), ValidationError);
  CHECK_THROWS_AS(purify(inst, phi, BlockPartition{{0, 1}, {}}), ValidationError);
}

TEST_CASE("purify_multimeasure") {
  SUBCASE("k = 1 with the reference measure reduces to one-block purify") {
    Rng rng(10);
    auto inst = oracle::random_decision_instance(rng, 30, 3, 2, 1, 4);
    auto phi = oracle::full_support_decision(inst, rng);
    auto multi = purify_multimeasure(inst, phi, MeasureFamily{Matrix(30, 1, 1.0)});
    auto single = inst;
    std::vector<std::size_t> all(30);
    std::iota(all.begin(), all.end(), 0);
    single.space.set_blocks({all});
    auto plain = purify(single, phi);
    CHECK(multi.f == plain.f);
    CHECK(multi.report.bound == plain.report.blocks[0].mass_bound);
  }
  SUBCASE("two half-space measures, scalar integrand") {
    Rng rng(11);
    auto inst = oracle::random_decision_instance(rng, 40, 1, 1, 2, 4);
    // equal weights so each half has mass 1/2
    inst.space = DiscreteSpace::from_block_ids(Vector(40, 1.0 / 40), std::vector<std::size_t>(40, 0));
    Matrix dens(40, 2);
    for (std::size_t i = 0; i < 40; ++i) (i < 20 ? dens(i, 0) : dens(i, 1)) = 2.0;
    auto phi = oracle::full_support_decision(inst, rng);
    auto res = purify_multimeasure(inst, phi, MeasureFamily{dens});
    const Matrix a = oracle::moment(inst, phi), b = oracle::moment(inst, res.f);
    for (std::size_t k = 0; k < 2; ++k) {
      double diff = 0;
      for (std::size_t i = 0; i < 40; ++i) diff += inst.space.cells[i].weight * dens(i, k) * (a(i, 0) - b(i, 0));
      CHECK(std::abs(diff) <= res.report.bound + res.report.stacked.slack);
      CHECK(std::abs(diff - res.report.residuals[k][0]) < 1e-12);
    }
    CHECK(res.report.within_bound());
  }
  SUBCASE("k = 3, m = 2, N = 1000") {
    Rng rng(12);
    auto inst = oracle::random_decision_instance(rng, 1000, 1, 2, 2, 5);
    Matrix dens(1000, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      double mass = 0;
      for (std::size_t i = 0; i < 1000; ++i) mass += inst.space.cells[i].weight * (dens(i, k) = rng.uniform(0, 3));
      for (std::size_t i = 0; i < 1000; ++i) dens(i, k) /= mass;
    }
    auto phi = oracle::full_support_decision(inst, rng);
    auto res = purify_multimeasure(inst, phi, MeasureFamily{dens});
    const Matrix a = oracle::moment(inst, phi), b = oracle::moment(inst, res.f);
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t d = 0; d < 2; ++d) {
        double diff = 0;
        for (std::size_t i = 0; i < 1000; ++i) diff += inst.space.cells[i].weight * dens(i, k) * (a(i, d) - b(i, d));
        CHECK(std::abs(diff) <= res.report.bound + res.report.stacked.slack);
      }
  }
  SUBCASE("invalid measures are rejected") {
    auto inst = two_cell_binary();
    RandomizedDecision phi{{{0.5, 0.5}, {0.5, 0.5}}};
    CHECK_THROWS_AS(purify_multimeasure(inst, phi, MeasureFamily{Matrix::from_rows({{1}, {2}})}), InvalidDensity);
  }
}
