#include "gapcert/glauber.hpp"

#include "gapcert/wasserstein.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gapcert;
using gapcert::testing::TestRng;

TEST_CASE("generator invariants") {
  TestRng rng(4);
  const SpinModel model = gapcert::testing::random_ising_chain(3, 0.5, rng);
  const GeneratorMatrix gen = build_generator(model);
  const Index n = gen.L.rows();

  for (Index a = 0; a < n; ++a) {
    CHECK(std::abs(gen.L.row(a).sum()) <= 1e-12);
    CHECK(gen.L(a, a) == doctest::Approx(-(gen.L.row(a).sum() - gen.L(a, a))).margin(1e-12));
    for (Index b = 0; b < n; ++b)
      if (a != b) CHECK(gen.L(a, b) >= 0.0);
  }
  CHECK((gen.mu.transpose() * gen.L).cwiseAbs().maxCoeff() <= 1e-10);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      CHECK(std::abs(gen.mu[a] * gen.L(a, b) - gen.mu[b] * gen.L(b, a)) <= 1e-10);
}

TEST_CASE("single free site is a rank-one jump") {
  Vec w(3);
  w << 0.2, 0.3, 0.5;
  const SpinModel model = make_free_product({w});
  const GeneratorMatrix gen = build_generator(model);
  // L = mu 1^T - I row-wise.
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b)
      CHECK(gen.L(a, b) == doctest::Approx(w[b] - (a == b ? 1.0 : 0.0)).margin(1e-13));
}

TEST_CASE("exact gaps") {
  SUBCASE("free products have unit gap") {
    TestRng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
      const SpinModel model = gapcert::testing::random_free_product(2 + trial % 3, 3, rng);
      CHECK(exact_spectral_gap(build_generator(model)) == doctest::Approx(1.0).margin(1e-9));
    }
  }

  SUBCASE("two-site ising gap meets the certificate") {
    const SpinModel model = make_ising({0, 1}, {{{0, 1}, 0.5}});
    const Real gap = exact_spectral_gap(build_generator(model));
    CHECK(gap >= 1.0 - std::tanh(0.5) - 1e-9);
  }

  SUBCASE("gaussian linear restriction") {
    for (Real rho : {0.3, -0.6}) {
      const GaussianPair model(rho);
      Eigen::SelfAdjointEigenSolver<Mat> solver(model.linear_restriction());
      CHECK(-solver.eigenvalues().maxCoeff() ==
            doctest::Approx(1.0 - std::abs(rho)).margin(1e-12));
    }
  }
}

TEST_CASE("semigroup evaluation") {
  TestRng rng(9);
  const SpinModel model = gapcert::testing::random_ising_chain(2, 0.6, rng);
  const GeneratorMatrix gen = build_generator(model);
  const Vec f = gapcert::testing::random_table(gen.L.rows(), rng);

  SUBCASE("t = 0 is the identity") {
    CHECK((semigroup_apply(gen, f, 0.0) - f).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("constants are preserved") {
    const Vec c = Vec::Constant(gen.L.rows(), 1.7);
    CHECK((semigroup_apply(gen, c, 2.0) - c).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("range of f is preserved") {
    const Vec ptf = semigroup_apply(gen, f, 1.3);
    CHECK(ptf.maxCoeff() <= f.maxCoeff() + 1e-12);
    CHECK(ptf.minCoeff() >= f.minCoeff() - 1e-12);
  }

  SUBCASE("agreement with the dense exponential oracle") {
    for (Real t : {0.25, 1.0, 3.0}) {
      const Vec via_uniformization = semigroup_apply(gen, f, t);
      const Vec via_oracle = gapcert::testing::expm_oracle(t * gen.L) * f;
      CHECK((via_uniformization - via_oracle).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  SUBCASE("negative time is rejected") {
    CHECK_THROWS_AS(semigroup_apply(gen, f, -0.1), InvalidInput);
  }
}

TEST_CASE("matrix exponential properties") {
  TestRng rng(13);
  SUBCASE("zero matrix") {
    CHECK((matexp_small(Mat::Zero(3, 3), 2.0) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <=
          1e-15);
  }
  SUBCASE("diagonal matrices exponentiate entrywise") {
    Mat d = Mat::Zero(3, 3);
    d.diagonal() << -0.5, 0.0, 1.5;
    const Mat e = matexp_small(d, 2.0);
    for (int k = 0; k < 3; ++k)
      CHECK(e(k, k) == doctest::Approx(std::exp(2.0 * d(k, k))).epsilon(1e-13));
  }

  SUBCASE("random matrices against the oracle") {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + rng.uniform_int(3);
      Mat M(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = rng.uniform(-2.0, 2.0);
      const Real t = rng.uniform(0.1, 3.0);
      const Mat mine = matexp_small(M, t);
      const Mat oracle = gapcert::testing::expm_oracle(t * M);
      CHECK((mine - oracle).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + oracle.cwiseAbs().maxCoeff()));
    }
  }

  SUBCASE("decay semigroups of nonnegative matrices stay nonnegative") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 3;
      Mat C(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = i == j ? 0.0 : rng.uniform(0.0, 0.9);
      for (Real t : {0.5, 2.0, 8.0}) {
        CHECK(matexp_small(C - Mat::Identity(n, n), t).minCoeff() >= 0.0);
        CHECK(matexp_small(C - 1.7 * Mat::Identity(n, n), t).minCoeff() >= 0.0);
      }
    }
  }
}

TEST_CASE("oscillation contraction under the semigroup") {
  TestRng rng(21);

  SUBCASE("free product decays at unit rate per site") {
    const SpinModel model = gapcert::testing::random_free_product(2, 2, rng);
    const DobrushinMatrix matrix = interdependence_matrix(model);
    const Vec f = gapcert::testing::random_table(static_cast<Index>(model.space().size()), rng);
    const Vec delta_f = lipschitz_vector(f, model.space(), model.site_metrics());
    const ContractionReport report = check_contraction(model, matrix, f, {0.5, 1.0});
    REQUIRE(report.pass(1e-9));
    for (const auto& row : report.rows)
      CHECK(row.delta_bound ==
            doctest::Approx(std::exp(-row.t) * delta_f[row.site]).epsilon(1e-10));
  }

  SUBCASE("t = 0 bound equals the oscillation vector") {
    const SpinModel model = gapcert::testing::random_ising_chain(3, 0.4, rng);
    const DobrushinMatrix matrix = interdependence_matrix(model);
    const Vec f = gapcert::testing::random_table(static_cast<Index>(model.space().size()), rng);
    const Vec delta_f = lipschitz_vector(f, model.space(), model.site_metrics());
    const ContractionReport report = check_contraction(model, matrix, f, {0.0});
    for (const auto& row : report.rows)
      CHECK(row.delta_bound == doctest::Approx(delta_f[row.site]).epsilon(1e-12));
  }

  SUBCASE("randomized suite holds with margin") {
    for (int trial = 0; trial < 10; ++trial) {
      SpinModel model = trial % 2 ? gapcert::testing::random_ising_chain(3, 0.3, rng)
                                  : gapcert::testing::random_potts_chain(2, 5, 1.0, rng);
      const DobrushinMatrix matrix = interdependence_matrix(model);
      const Vec f = gapcert::testing::random_table(static_cast<Index>(model.space().size()), rng);
      const ContractionReport report =
          check_contraction(model, matrix, f, {0.5, 1.0, 2.0});
      CHECK(report.pass(1e-9));
    }
  }
}

TEST_CASE("variance decays at twice the certified rate") {
  TestRng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    const SpinModel model = gapcert::testing::random_ising_chain(3, 0.35, rng);
    const GeneratorMatrix gen = build_generator(model);
    const GapCertificate cert = gap_certificate(model);
    REQUIRE(cert.valid);
    const Vec f = gapcert::testing::random_table(gen.L.rows(), rng);
    const Real mean = gen.mu.dot(f);
    const Real var0 = gen.mu.dot(f.cwiseProduct(f)) - mean * mean;
    for (Real t : {0.5, 1.0, 2.0}) {
      const Vec ptf = semigroup_apply(gen, f, t);
      const Real mt = gen.mu.dot(ptf);
      const Real vart = gen.mu.dot(ptf.cwiseProduct(ptf)) - mt * mt;
      CHECK(vart <= var0 * std::exp(-2.0 * cert.lambda1_bound * t) + 1e-9);
    }
  }
}

namespace {

JumpRateFamily random_pair_family(const StateSpace& space, const std::vector<Metric>& metrics,
                                  TestRng& rng) {
  JumpRateFamily family;
  family.space = space;
  family.metrics = metrics;
  const int nsites = space.num_sites();
  // Singletons plus adjacent pairs, random rates with state-independent mass.
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < nsites; ++i) blocks.push_back({i});
  for (int i = 0; i + 1 < nsites; ++i)
    if (rng.uniform(0.0, 1.0) < 0.7) blocks.push_back({i, i + 1});
  for (const auto& block : blocks) {
    JumpRateFamily::Member member;
    member.sites = block;
    std::size_t cols = 1;
    for (int s : block) cols *= static_cast<std::size_t>(space.radix(s));
    member.rates = Mat(static_cast<Index>(space.size()), static_cast<Index>(cols));
    const Real mass = rng.uniform(0.5, 1.5);
    for (Index x = 0; x < member.rates.rows(); ++x) {
      Vec row(static_cast<Index>(cols));
      for (Index z = 0; z < row.size(); ++z) row[z] = rng.uniform(0.05, 1.0);
      member.rates.row(x) = mass * row.transpose() / row.sum();
    }
    family.members.push_back(std::move(member));
  }
  return family;
}

}  // namespace

TEST_CASE("jump-rate families") {
  TestRng rng(55);

  SUBCASE("constant rates have zero constants") {
    const StateSpace space({2, 2});
    JumpRateFamily family;
    family.space = space;
    family.metrics = {Metric::trivial(2), Metric::trivial(2)};
    JumpRateFamily::Member member;
    member.sites = {0};
    member.rates = Mat::Constant(4, 2, 0.5);
    family.members.push_back(member);
    const IPSConstants constants = ips_constants(family);
    CHECK(constants.c_exact.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(constants.eta == doctest::Approx(1.0).margin(1e-12));
  }

  SUBCASE("single-site heat bath reduces to the interdependence matrix") {
    const SpinModel model = gapcert::testing::random_ising_chain(3, 0.4, rng);
    std::vector<std::vector<int>> singletons = {{0}, {1}, {2}};
    const JumpRateFamily family = heat_bath_family(model, singletons);
    const IPSConstants constants = ips_constants(family);
    const Mat C = interdependence_matrix(model).C;
    CHECK((constants.c_exact - C).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(constants.eta == doctest::Approx(1.0).margin(1e-12));
    CHECK(constants.mass_uniform);

    // The family contraction then coincides with the heat-bath contraction.
    const Vec f = gapcert::testing::random_table(static_cast<Index>(model.space().size()), rng);
    const ContractionReport glauber =
        check_contraction(model, interdependence_matrix(model), f, {0.5, 1.5});
    const ContractionReport ips =
        check_ips_contraction(family, constants.c_exact, constants.eta, f, {0.5, 1.5});
    REQUIRE(glauber.rows.size() == ips.rows.size());
    for (std::size_t k = 0; k < ips.rows.size(); ++k) {
      CHECK(ips.rows[k].delta_actual ==
            doctest::Approx(glauber.rows[k].delta_actual).margin(1e-10));
      CHECK(ips.rows[k].delta_bound ==
            doctest::Approx(glauber.rows[k].delta_bound).margin(1e-10));
    }
  }

  SUBCASE("empty family gives the zero generator") {
    JumpRateFamily family;
    family.space = StateSpace({2, 2});
    family.metrics = {Metric::trivial(2), Metric::trivial(2)};
    const GeneratorMatrix gen = build_ips_generator(family);
    CHECK(gen.L.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("exact constants never exceed the tv bound and contraction holds") {
    for (int trial = 0; trial < 6; ++trial) {
      const int radix = 2 + trial % 2;
      const StateSpace space({radix, radix, radix});
      const std::vector<Metric> metrics(3, Metric::trivial(radix));
      const JumpRateFamily family = random_pair_family(space, metrics, rng);
      const IPSConstants constants = ips_constants(family);
      CHECK(constants.mass_uniform);
      for (std::size_t m = 0; m < family.members.size(); ++m)
        for (int j = 0; j < 3; ++j)
          CHECK(constants.member_exact[m][j] <= constants.member_tv[m][j] + 1e-10);

      const Vec f = gapcert::testing::random_table(static_cast<Index>(space.size()), rng);
      CHECK(check_ips_contraction(family, constants.c_exact, constants.eta, f, {0.5, 1.0})
                .pass(1e-9));
      CHECK(check_ips_contraction(family, constants.c_tv, constants.eta, f, {0.5, 1.0})
                .pass(1e-9));
    }
  }

  SUBCASE("varying total mass is flagged") {
    const StateSpace space({2});
    JumpRateFamily family;
    family.space = space;
    family.metrics = {Metric::trivial(2)};
    JumpRateFamily::Member member;
    member.sites = {0};
    member.rates = Mat(2, 2);
    member.rates << 0.5, 0.5, 0.9, 0.9;  // mass 1 vs 1.8
    family.members.push_back(member);
    const IPSConstants constants = ips_constants(family);
    CHECK_FALSE(constants.mass_uniform);
    CHECK(constants.nonuniform_members == std::vector<int>{0});
    CHECK(std::isinf(constants.c_exact(0, 0)));
  }
}

TEST_CASE("transport decay toward the invariant measure") {
  TestRng rng(66);
  const SpinModel model = make_ising({0, 1}, {{{0, 1}, 0.3}});
  const JumpRateFamily family = heat_bath_family(model, {{0}, {1}});
  const IPSConstants constants = ips_constants(family);

  for (std::size_t x0 = 0; x0 < 4; ++x0) {
    const InvariantDecayReport report =
        invariant_w1_decay(family, constants.c_exact, constants.eta, x0, {0.0, 1.0, 2.0, 4.0});
    REQUIRE(report.unique);
    CHECK((report.invariant - model.joint_table()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(report.pass(1e-9));
    // Large t drives the left side toward zero.
    CHECK(report.rows.back().lhs <= report.rows.front().lhs + 1e-9);
  }
}
