#include "gapcert/models.hpp"

#include "gapcert/model_io.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gapcert;
using gapcert::testing::TestRng;

namespace {

// Conditional at one site recovered from the joint table by marginalization.
Vec conditional_from_joint(const SpinModel& model, int site, std::size_t state) {
  const Vec mu = model.joint_table();
  const StateSpace& space = model.space();
  Vec w(space.radix(site));
  for (int v = 0; v < space.radix(site); ++v)
    w[v] = mu[static_cast<Index>(space.with_coord(state, site, v))];
  return w / w.sum();
}

}  // namespace

TEST_CASE("free product conditionals ignore the configuration") {
  TestRng rng(3);
  const SpinModel model = gapcert::testing::random_free_product(3, 3, rng);
  const StateSpace& space = model.space();
  for (int i = 0; i < 3; ++i) {
    const Vec base = model.conditional(i, 0).dense(space.radix(i));
    for (std::size_t a = 0; a < space.size(); ++a)
      CHECK((model.conditional(i, a).dense(space.radix(i)) - base).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("free product joint is the tensor product") {
  Vec p(2), q(3);
  p << 0.3, 0.7;
  q << 0.2, 0.3, 0.5;
  const SpinModel model = make_free_product({p, q});
  const Vec mu = model.joint_table();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(mu[a + 2 * b] == doctest::Approx(p[a] * q[b]).epsilon(0).margin(1e-14));
}

TEST_CASE("two-site ising conditional and joint") {
  const Real beta = 0.7;
  const SpinModel model = make_ising({0, 1}, {{{0, 1}, beta}});
  const StateSpace& space = model.space();

  // P(x0 = +1 | x1) = e^{beta x1} / (e^{beta x1} + e^{-beta x1})
  for (int x1 = 0; x1 < 2; ++x1) {
    const Real s = x1 ? 1.0 : -1.0;
    const std::size_t state = space.with_coord(0, 1, x1);
    const DiscreteDistribution cond = model.conditional(0, state);
    CHECK(cond.mass_at(1) ==
          doctest::Approx(std::exp(beta * s) / (2.0 * std::cosh(beta * s))).margin(1e-14));
  }

  const Vec mu = model.joint_table();
  const Real z = 2.0 * std::exp(beta) + 2.0 * std::exp(-beta);
  CHECK(mu[3] == doctest::Approx(std::exp(beta) / z).margin(1e-14));  // (+,+)
  CHECK(mu[1] == doctest::Approx(std::exp(-beta) / z).margin(1e-14));

  // Aligned spins carry more mass for positive couplings.
  CHECK(mu[0] > mu[1]);
  CHECK(mu[3] > mu[2]);
}

TEST_CASE("potts antiferromagnet penalizes equal neighbor colors") {
  const int N = 5;
  const Real J = 1.3;
  const SpinModel model = make_potts({0, 1}, N, {{0, 1}}, J);
  const Vec mu = model.joint_table();
  // mu(a,a) / mu(a,b) = exp(-J) for a != b
  CHECK(mu[0 + N * 0] / mu[0 + N * 1] == doctest::Approx(std::exp(-J)).margin(1e-12));
  CHECK(mu[2 + N * 2] / mu[2 + N * 4] == doctest::Approx(std::exp(-J)).margin(1e-12));
}

TEST_CASE("gibbs consistency: conditionals match the joint on random models") {
  TestRng rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    SpinModel model = trial % 2 ? gapcert::testing::random_ising_chain(3, 0.8, rng)
                                : gapcert::testing::random_potts_chain(3, 4, 1.5, rng);
    const StateSpace& space = model.space();
    for (int i = 0; i < model.num_sites(); ++i)
      for (std::size_t a = 0; a < space.size(); ++a) {
        const Vec direct = model.conditional(i, a).dense(space.radix(i));
        const Vec from_joint = conditional_from_joint(model, i, a);
        CHECK((direct - from_joint).cwiseAbs().maxCoeff() <= 1e-12);
      }
  }
}

TEST_CASE("block conditionals") {
  TestRng rng(23);
  const SpinModel model = gapcert::testing::random_ising_chain(3, 0.6, rng);
  const StateSpace& space = model.space();

  SUBCASE("singleton block equals the conditional") {
    for (std::size_t a = 0; a < space.size(); ++a) {
      const Vec block = model.conditional_block({1}, a);
      const Vec cond = model.conditional(1, a).dense(2);
      CHECK((block - cond).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }

  SUBCASE("full window equals the joint") {
    const Vec block = model.conditional_block({0, 1, 2}, 0);
    CHECK((block - model.joint_table()).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("pair block matches brute-force conditioning") {
    const Vec mu = model.joint_table();
    for (int x0 = 0; x0 < 2; ++x0) {
      const std::size_t state = space.with_coord(0, 0, x0);
      const Vec block = model.conditional_block({1, 2}, state);
      Vec brute(4);
      for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
          brute[x1 + 2 * x2] =
              mu[static_cast<Index>(space.encode(std::vector<int>{x0, x1, x2}))];
      brute /= brute.sum();
      CHECK((block - brute).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("single-site compatibility inside a block") {
    // Conditioning the pair block on its second coordinate reproduces the
    // single-site conditional.
    for (std::size_t a = 0; a < space.size(); ++a) {
      const Vec block = model.conditional_block({1, 2}, a);
      const int x2 = space.coord(a, 2);
      Vec slice(2);
      slice << block[0 + 2 * x2], block[1 + 2 * x2];
      slice /= slice.sum();
      const Vec cond = model.conditional(1, a).dense(2);
      CHECK((slice - cond).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("boundary conditions enter through the couplings") {
  // 1-site window coupled to a fixed exterior spin.
  const Real beta = 0.4;
  const SpinModel plus = make_ising({0}, {{{0, 1}, beta}}, {{1, 1.0}});
  const DiscreteDistribution cond = plus.conditional(0, 0);
  CHECK(cond.mass_at(1) == doctest::Approx(std::exp(beta) / (2 * std::cosh(beta))).margin(1e-14));

  CHECK_THROWS_AS(make_ising({0}, {{{0, 1}, beta}}), InvalidInput);  // missing boundary
}

TEST_CASE("quartic single-site measure") {
  SUBCASE("second moment against closed form and high-resolution quadrature") {
    const Metric grid = quartic_grid(1.0, 512);
    const auto [m, sigma2] = phi4_single_site(1.0, 0.0, grid);
    const Real closed_form = std::tgamma(0.75) / std::tgamma(0.25);
    CHECK(sigma2 == doctest::Approx(closed_form).epsilon(0).margin(1e-6));
    const Real oracle = gapcert::testing::quartic_second_moment(1.0, 0.0, 4.0, 5120);
    CHECK(sigma2 == doctest::Approx(oracle).epsilon(0).margin(1e-6));

    Real mean = 0.0;
    const Vec& x = *grid.embedding();
    for (int k = 0; k < m.size(); ++k) mean += x[m.support[static_cast<std::size_t>(k)]] * m.weights[k];
    CHECK(std::abs(mean) <= 1e-12);
  }

  SUBCASE("doubling the density moves the moment by less than 1e-6") {
    const Real s512 = phi4_single_site(1.0, 0.0, quartic_grid(1.0, 512, 4.0)).second;
    const Real s1024 = phi4_single_site(1.0, 0.0, quartic_grid(1.0, 1024, 4.0)).second;
    CHECK(std::abs(s512 - s1024) < 1e-6);
  }

  SUBCASE("nonzero quadratic part") {
    const Metric grid = quartic_grid(1.0, 512);
    const auto [m, sigma2] = phi4_single_site(1.0, 0.8, grid);
    (void)m;
    const Real oracle = gapcert::testing::quartic_second_moment(1.0, 0.8, 4.0, 5120);
    CHECK(sigma2 == doctest::Approx(oracle).epsilon(0).margin(1e-6));
  }

  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(quartic_grid(-1.0, 64), InvalidInput);
    CHECK_THROWS_AS(quartic_grid(1.0, 8), InvalidInput);
    CHECK_THROWS_AS(phi4_single_site(0.0, 0.0, quartic_grid(1.0, 64)), InvalidInput);
  }
}

TEST_CASE("phi4 chain conditionals are grid heat-bath kernels") {
  const Metric grid = quartic_grid(1.0, 16);
  const SpinModel model = make_phi4({0, 1}, 1.0, 0.0, {{1, 0.3}}, grid);
  const StateSpace& space = model.space();
  const Vec& x = *grid.embedding();

  // mu_0(. | x1) should be proportional to exp(J x0 x1) m(x0).
  const auto [m, sigma2] = phi4_single_site(1.0, 0.0, grid);
  (void)sigma2;
  const Vec mw = m.dense(16);
  const int x1 = 11;
  const std::size_t state = space.with_coord(0, 1, x1);
  const Vec cond = model.conditional(0, state).dense(16);
  Vec expected = (0.3 * x.array() * x[x1]).exp() * mw.array();
  expected /= expected.sum();
  CHECK((cond - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("model files parse and errors cite the field") {
  SUBCASE("round trip") {
    const LoadedModel model = parse_model(R"({
      "model": "ising",
      "sites": [0, 1],
      "couplings": [{"sites": [0, 1], "J": 0.5}]
    })",
                                          "inline");
    CHECK(model.kind == ModelKind::Ising);
    CHECK(model.spin->num_sites() == 2);
  }

  SUBCASE("parse errors cite the position") {
    try {
      parse_model("{ not json", "broken.json");
      FAIL("expected a parse error");
    } catch (const InvalidInput& e) {
      CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
      CHECK(std::string(e.what()).find("parse error") != std::string::npos);
    }
  }

  SUBCASE("field errors cite the path") {
    try {
      parse_model(R"({"model": "ising", "sites": [0, 1],
                      "couplings": [{"sites": [0, 1]}]})",
                  "inline");
      FAIL("expected a field error");
    } catch (const InvalidInput& e) {
      CHECK(std::string(e.what()).find("couplings[0].J") != std::string::npos);
    }
  }

  SUBCASE("gaussian pair rejects the trivial metric") {
    CHECK_THROWS_AS(parse_model(R"({"model": "gaussian_pair", "rho": 0.4,
                                    "metric": "trivial"})",
                                "inline"),
                    UnsupportedModel);
  }

  SUBCASE("free product with explicit values") {
    const LoadedModel model = parse_model(R"({
      "model": "free_product",
      "marginals": [{"weights": [0.5, 0.5], "values": [-1, 1]}]
    })",
                                          "inline");
    CHECK(model.spin->spin(0).values[0] == -1.0);
  }
}
