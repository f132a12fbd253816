#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "purelax/caratheodory.hpp"
#include "purelax/errors.hpp"

using namespace purelax;

namespace {

Vector direct_barycenter(const Matrix& pts, std::span<const double> w) {
  Vector out(pts.cols(), 0.0);
  for (std::size_t i = 0; i < pts.rows(); ++i)
    for (std::size_t d = 0; d < pts.cols(); ++d) out[d] += w[i] * pts(i, d);
  return out;
}

Vector combo_barycenter(const Matrix& pts, const ConvexCombination& c) {
  Vector out(pts.cols(), 0.0);
  for (std::size_t s = 0; s < c.support(); ++s)
    for (std::size_t d = 0; d < pts.cols(); ++d) out[d] += c.weights[s] * pts(c.indices[s], d);
  return out;
}

Vector random_weights(Rng& rng, std::size_t k) {
  Vector w(k);
  for (double& x : w) x = rng.uniform(0.01, 1.0);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  return w;
}

Matrix random_points(Rng& rng, std::size_t k, std::size_t n) {
  Matrix p(k, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t d = 0; d < n; ++d) p(i, d) = rng.uniform(-1, 1);
  return p;
}

}  // namespace

TEST_CASE("barycenter examples") {
  Matrix tri = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}});
  Vector third{1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto b = barycenter(tri, third);
  CHECK(b[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(barycenter(Matrix::from_rows({{2, -1}}), Vector{1.0}) == Vector{2, -1});
  CHECK_THROWS_AS(barycenter(tri, Vector{0.5, 0.5}), DimensionMismatch);

  Rng rng(1);
  auto pts = random_points(rng, 10, 4);
  auto w = random_weights(rng, 10);
  CHECK(max_abs_diff(barycenter(pts, w), direct_barycenter(pts, w)) < 1e-14);
}

TEST_CASE("reduce_support on collinear points") {
  Matrix pts = Matrix::from_rows({{0}, {0.5}, {1}});
  Vector w{0.25, 0.5, 0.25};
  auto c = reduce_support(pts, w);
  CHECK(c.support() <= 2);
  CHECK(std::abs(combo_barycenter(pts, c)[0] - 0.5) < 1e-12);
  CHECK(std::abs(std::accumulate(c.weights.begin(), c.weights.end(), 0.0) - 1.0) < 1e-10);
}

TEST_CASE("reduce_support leaves small supports alone") {
  Matrix pts = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}, {5, 5}});
  Vector w{0.2, 0.0, 0.8, 0.0};
  std::size_t iterations = 99;
  auto c = reduce_support(pts, w, &iterations);
  CHECK(iterations == 0);
  CHECK(c.indices == std::vector<std::size_t>{0, 2});
  CHECK(c.weights == Vector{0.2, 0.8});
}

TEST_CASE("reduce_support rejects non-probability weights") {
  Matrix pts = Matrix::from_rows({{0}, {1}});
  CHECK_THROWS_AS(reduce_support(pts, Vector{0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(reduce_support(pts, Vector{1.5, -0.5}), ValidationError);
}

TEST_CASE("reduce_support property: support, barycenter, provenance, iterations") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng.index(1, 5), k = rng.index(1, 30);
    Matrix pts = random_points(rng, k, n);
    if (trial % 3 == 0 && k > 2) {
      // duplicated and collinear points
      for (std::size_t d = 0; d < n; ++d) pts(1, d) = pts(0, d);
      for (std::size_t d = 0; d < n; ++d) pts(2, d) = 0.5 * (pts(0, d) + pts(k - 1, d));
    }
    Vector w = random_weights(rng, k);
    if (trial % 4 == 0 && k > 1) w[rng.index(0, k - 1)] = 0.0;
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s;

    std::size_t iterations = 0;
    auto c = reduce_support(pts, w, &iterations);
    CHECK(c.support() <= n + 1);
    CHECK(max_abs_diff(combo_barycenter(pts, c), direct_barycenter(pts, w)) <= kReconstructionTol);
    const std::size_t initial = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0; }));
    CHECK(c.support() <= initial);
    CHECK(iterations <= initial);
    for (std::size_t s2 = 0; s2 < c.support(); ++s2) {
      CHECK(w[c.indices[s2]] > 0.0);
      CHECK(c.weights[s2] > 0.0);
    }
  }
}

TEST_CASE("reduce_support is permutation-robust in barycenter") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3, k = 12;
    Matrix pts = random_points(rng, k, n);
    Vector w = random_weights(rng, k);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(0, i - 1)]);
    Matrix pp(k, n);
    Vector pw(k);
    for (std::size_t i = 0; i < k; ++i) {
      pw[i] = w[perm[i]];
      for (std::size_t d = 0; d < n; ++d) pp(i, d) = pts(perm[i], d);
    }
    auto a = reduce_support(pts, w), b = reduce_support(pp, pw);
    CHECK(a.support() <= n + 1);
    CHECK(b.support() <= n + 1);
    CHECK(max_abs_diff(combo_barycenter(pts, a), combo_barycenter(pp, b)) < 1e-8);
  }
}

TEST_CASE("decompose_decision") {
  SUBCASE("pure decision gives singletons") {
    Rng rng(4);
    auto inst = oracle::random_decision_instance(rng, 10, 2, 2, 1, 4);
    PureDecision f;
    for (std::size_t i = 0; i < 10; ++i) f.choice.push_back(rng.index(0, inst.num_actions(i) - 1));
    auto cert = decompose_decision(inst, as_randomized(inst, f));
    for (std::size_t i = 0; i < 10; ++i) {
      REQUIRE(cert.cells[i].support() == 1);
      CHECK(cert.cells[i].indices[0] == f.choice[i]);
      CHECK(cert.cells[i].weights[0] == 1.0);
    }
  }
  SUBCASE("five points on a line") {
    DecisionInstance inst;
    inst.space = DiscreteSpace::from_block_ids({1.0}, {0});
    inst.actions = {{10, 11, 12, 13, 14}};
    inst.g = {Matrix::from_rows({{0}, {1}, {2}, {3}, {4}})};
    inst.n = 1;
    RandomizedDecision phi{{Vector(5, 0.2)}};
    auto cert = decompose_decision(inst, phi);
    CHECK(cert.cells[0].support() <= 2);
    CHECK(std::abs(barycenter(inst.g[0], cert.cells[0])[0] - 2.0) < 1e-12);
    // brute-force pair search: some pair of values brackets the mean
    bool found = false;
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b) {
        const double lambda = (2.0 - b) / static_cast<double>(a - b);
        found = found || (lambda >= 0.0 && lambda <= 1.0);
      }
    CHECK(found);
    double lo = 1e9, hi = -1e9;
    for (std::size_t idx : cert.cells[0].indices) lo = std::min(lo, inst.g[0](idx, 0)), hi = std::max(hi, inst.g[0](idx, 0));
    CHECK(lo <= 2.0);
    CHECK(hi >= 2.0);
  }
  SUBCASE("random n = 2 instances") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      auto inst = oracle::random_decision_instance(rng, 40, 3, 2, 1, 8);
      auto phi = oracle::full_support_decision(inst, rng);
      auto cert = decompose_decision(inst, phi);
      CHECK(cert.n == 2);
      const Matrix mom = oracle::moment(inst, phi);
      for (std::size_t i = 0; i < inst.num_cells(); ++i) {
        CHECK(cert.cells[i].support() <= 3);
        CHECK(max_abs_diff(barycenter(inst.g[i], cert.cells[i]), mom.row(i)) <= kReconstructionTol);
      }
      CHECK(certificate_error(inst, phi, cert) <= kReconstructionTol);
    }
  }
}
