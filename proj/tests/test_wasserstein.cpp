#include "gapcert/wasserstein.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gapcert;
using gapcert::testing::TestRng;

namespace {

void check_plan_feasible(const TransportPlan& plan, const DiscreteDistribution& nu1,
                         const DiscreteDistribution& nu2, const Metric& metric) {
  REQUIRE(plan.plan.minCoeff() >= -1e-12);
  const Vec rows = plan.plan.rowwise().sum();
  const Vec cols = plan.plan.colwise().sum().transpose();
  for (std::size_t i = 0; i < plan.support1.size(); ++i)
    CHECK(rows[static_cast<Index>(i)] ==
          doctest::Approx(nu1.mass_at(plan.support1[i])).epsilon(0).scale(1).margin(1e-10));
  for (std::size_t j = 0; j < plan.support2.size(); ++j)
    CHECK(cols[static_cast<Index>(j)] ==
          doctest::Approx(nu2.mass_at(plan.support2[j])).epsilon(0).scale(1).margin(1e-10));
  Real cost = 0.0;
  for (std::size_t i = 0; i < plan.support1.size(); ++i)
    for (std::size_t j = 0; j < plan.support2.size(); ++j)
      cost += plan.plan(static_cast<Index>(i), static_cast<Index>(j)) *
              metric(plan.support1[i], plan.support2[j]);
  CHECK(std::abs(cost - plan.cost) <= 1e-10);
}

Mat cost_matrix(const DiscreteDistribution& a, const DiscreteDistribution& b, const Metric& m) {
  Mat c(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      c(i, j) = m(a.support[static_cast<std::size_t>(i)], b.support[static_cast<std::size_t>(j)]);
  return c;
}

Metric random_metric(int n, TestRng& rng) {
  // Distances induced by random points on a line plus a random positive part,
  // kept metric by construction via shortest paths over the complete graph.
  Mat d = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = rng.uniform(0.2, 2.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return Metric::from_table(d);
}

}  // namespace

TEST_CASE("identity coupling has zero cost") {
  TestRng rng(11);
  const Vec w = gapcert::testing::random_distribution(4, rng);
  const auto nu = DiscreteDistribution::from_weights(w);
  CHECK(w1_exact(nu, nu, Metric::trivial(4)).cost == doctest::Approx(0.0).margin(1e-12));
  CHECK(w1_exact(nu, nu, random_metric(4, rng)).cost == doctest::Approx(0.0).margin(1e-12));
}

TEST_CASE("point masses under the trivial metric") {
  const auto da = DiscreteDistribution::delta(0);
  const auto db = DiscreteDistribution::delta(2);
  CHECK(w1_exact(da, db, Metric::trivial(3)).cost == doctest::Approx(1.0).margin(1e-12));
  CHECK(tv_distance(da, db) == doctest::Approx(2.0).margin(1e-12));
}

TEST_CASE("two-point example equals half the total variation") {
  Vec a(2), b(2);
  a << 0.8, 0.2;
  b << 0.3, 0.7;
  const auto nu1 = DiscreteDistribution::from_weights(a);
  const auto nu2 = DiscreteDistribution::from_weights(b);
  CHECK(w1_exact(nu1, nu2, Metric::trivial(2)).cost == doctest::Approx(0.5).margin(1e-12));
  CHECK(tv_distance(nu1, nu2) == doctest::Approx(1.0).margin(1e-12));
}

TEST_CASE("line-metric example from extreme couplings") {
  Vec pts(4);
  pts << 0, 1, 2, 3;
  const Metric line = Metric::from_line_embedding(pts);
  const auto nu1 = DiscreteDistribution::delta(0);
  Vec w = Vec::Zero(4);
  w[1] = 0.5;
  w[3] = 0.5;
  const auto nu2 = DiscreteDistribution::from_weights(w);
  const TransportPlan plan = w1_exact(nu1, nu2, line);
  CHECK(plan.cost == doctest::Approx(2.0).margin(1e-12));
  check_plan_feasible(plan, nu1, nu2, line);
}

TEST_CASE("solver matches the basis-enumeration oracle on random instances") {
  TestRng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + rng.uniform_int(3);
    const int n = 2 + rng.uniform_int(3);
    const Metric metric = random_metric(std::max(m, n), rng);
    const auto nu1 = DiscreteDistribution::from_weights(
        gapcert::testing::random_distribution(m, rng));
    const auto nu2 = DiscreteDistribution::from_weights(
        gapcert::testing::random_distribution(n, rng));
    const TransportPlan plan = w1_exact(nu1, nu2, metric);
    const Real oracle = gapcert::testing::transport_bruteforce(
        nu1.weights, nu2.weights, cost_matrix(nu1, nu2, metric));
    CHECK(plan.cost == doctest::Approx(oracle).epsilon(0).margin(1e-9));
    check_plan_feasible(plan, nu1, nu2, metric);
  }
}

TEST_CASE("trivial-metric identity w1 = tv/2 on random pairs") {
  TestRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + rng.uniform_int(5);
    const auto nu1 = DiscreteDistribution::from_weights(
        gapcert::testing::random_distribution(n, rng));
    const auto nu2 = DiscreteDistribution::from_weights(
        gapcert::testing::random_distribution(n, rng));
    CHECK(w1_exact(nu1, nu2, Metric::trivial(n)).cost ==
          doctest::Approx(tv_distance(nu1, nu2) / 2.0).epsilon(0).margin(1e-10));
  }
}

TEST_CASE("symmetry and triangle inequality on random triples") {
  TestRng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + rng.uniform_int(3);
    const Metric metric = trial % 2 ? random_metric(n, rng) : Metric::trivial(n);
    const auto a = DiscreteDistribution::from_weights(
        gapcert::testing::random_distribution(n, rng));
    const auto b = DiscreteDistribution::from_weights(
        gapcert::testing::random_distribution(n, rng));
    const auto c = DiscreteDistribution::from_weights(
        gapcert::testing::random_distribution(n, rng));
    const Real ab = w1_exact(a, b, metric).cost;
    const Real ba = w1_exact(b, a, metric).cost;
    const Real ac = w1_exact(a, c, metric).cost;
    const Real cb = w1_exact(c, b, metric).cost;
    CHECK(std::abs(ab - ba) <= 1e-9);
    CHECK(ab <= ac + cb + 1e-9);
  }
}

TEST_CASE("dual witnesses never beat the optimal cost") {
  TestRng rng(5);
  SUBCASE("constant witness gives zero") {
    const auto nu1 = DiscreteDistribution::delta(0);
    const auto nu2 = DiscreteDistribution::delta(1);
    CHECK(dual_lower_bound(nu1, nu2, Metric::trivial(2), Vec::Constant(2, 3.0)) == 0.0);
  }
  SUBCASE("indicator witness attains tv/2 under the trivial metric") {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + rng.uniform_int(4);
      const auto nu1 = DiscreteDistribution::from_weights(
          gapcert::testing::random_distribution(n, rng));
      const auto nu2 = DiscreteDistribution::from_weights(
          gapcert::testing::random_distribution(n, rng));
      Vec f = Vec::Zero(n);
      for (int p = 0; p < n; ++p)
        if (nu1.mass_at(p) > nu2.mass_at(p)) f[p] = 1.0;
      const Real value = dual_lower_bound(nu1, nu2, Metric::trivial(n), f);
      CHECK(value == doctest::Approx(tv_distance(nu1, nu2) / 2.0).epsilon(0).margin(1e-9));
    }
  }
  SUBCASE("random witnesses on a three-point space") {
    for (int trial = 0; trial < 40; ++trial) {
      const Metric metric = random_metric(3, rng);
      const auto nu1 = DiscreteDistribution::from_weights(
          gapcert::testing::random_distribution(3, rng));
      const auto nu2 = DiscreteDistribution::from_weights(
          gapcert::testing::random_distribution(3, rng));
      const Vec f = gapcert::testing::random_table(3, rng);
      const Real w1 = w1_exact(nu1, nu2, metric).cost;
      CHECK(dual_lower_bound(nu1, nu2, metric, f) <= w1 + 1e-9);
    }
  }
}

TEST_CASE("oscillation vector on explicit tables") {
  const StateSpace space({2, 2});
  const std::vector<Metric> metrics(2, Metric::trivial(2));
  SUBCASE("constant table") {
    CHECK(lipschitz_vector(Vec::Constant(4, 2.5), space, metrics).maxCoeff() == 0.0);
  }
  SUBCASE("single-site function") {
    Vec f(4);
    f << 1, 1, -2, -2;  // depends on site 1 only
    const Vec delta = lipschitz_vector(f, space, metrics);
    CHECK(delta[0] == 0.0);
    CHECK(delta[1] == doctest::Approx(3.0));
  }
  SUBCASE("product of spins") {
    Vec f(4);
    f << 1, -1, -1, 1;  // x0 * x1 with spins -1, +1
    const Vec delta = lipschitz_vector(f, space, metrics);
    CHECK(delta[0] == doctest::Approx(2.0));
    CHECK(delta[1] == doctest::Approx(2.0));
  }
}

TEST_CASE("product-space transport") {
  const StateSpace space({2, 2});
  const std::vector<Metric> metrics(2, Metric::trivial(2));
  Vec t1(4), t2(4);
  t1 << 0.25, 0.25, 0.25, 0.25;

  SUBCASE("identical tables") { CHECK(product_w1(t1, t1, space, metrics) == doctest::Approx(0.0)); }

  SUBCASE("dirac configurations at hamming distance") {
    Vec a = Vec::Zero(4), b = Vec::Zero(4);
    a[0] = 1.0;
    b[3] = 1.0;  // both coordinates differ
    CHECK(product_w1(a, b, space, metrics) == doctest::Approx(2.0).margin(1e-10));
  }

  SUBCASE("tensorization against a single-site flip") {
    // nu1 = p (x) q; nu2 = p (x) delta_0: W1 = per-site W1 of (q, delta_0).
    Vec p(2), q(2);
    p << 0.3, 0.7;
    q << 0.6, 0.4;
    Vec prod1(4), prod2(4);
    for (int s0 = 0; s0 < 2; ++s0)
      for (int s1 = 0; s1 < 2; ++s1) {
        prod1[s0 + 2 * s1] = p[s0] * q[s1];
        prod2[s0 + 2 * s1] = p[s0] * (s1 == 0 ? 1.0 : 0.0);
      }
    const Real site_w1 =
        w1_exact(DiscreteDistribution::from_weights(q), DiscreteDistribution::delta(0),
                 Metric::trivial(2))
            .cost;
    CHECK(product_w1(prod1, prod2, space, metrics) ==
          doctest::Approx(site_w1).epsilon(0).margin(1e-10));
  }

  SUBCASE("cap is enforced") {
    CHECK_THROWS_AS(product_w1(t1, t1, space, metrics, 3), SizeLimit);
  }
}

TEST_CASE("input validation") {
  Vec bad(2);
  bad << 0.7, 0.2;
  CHECK_THROWS_AS(DiscreteDistribution::from_weights(bad), InvalidInput);
  CHECK_THROWS_AS(DiscreteDistribution::make({0, 0}, (Vec(2) << 0.5, 0.5).finished()),
                  InvalidInput);
  const auto nu = DiscreteDistribution::delta(5);
  CHECK_THROWS_AS(w1_exact(nu, nu, Metric::trivial(3)), InvalidInput);

  Mat asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(Metric::from_table(asym), InvalidInput);
  Mat triangle(3, 3);
  triangle << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(Metric::from_table(triangle), InvalidInput);
}
