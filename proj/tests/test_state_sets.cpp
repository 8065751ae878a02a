#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/state_sets.hpp"
#include "test_util.hpp"

using namespace steinlab;
using namespace steinlab::linalg;
using namespace steinlab::states;
using namespace steinlab::state_sets;

TEST_CASE("ppt_set membership") {
  const auto set = ppt_set({2, 2});

  const auto mm = 0.25 * HermOperator::identity({2, 2});
  CHECK(set->membership(mm, 1e-9).verdict == Membership::kMember);

  const auto bell = testutil::bell_state();
  const auto rep = set->membership(bell, 1e-6);
  CHECK(rep.verdict == Membership::kNotMember);
  CHECK(rep.distance == doctest::Approx(0.5).epsilon(1e-6));

  Rng rng(7);
  const auto prod = kron_op(testutil::random_density(2, rng),
                            testutil::random_density(2, rng));
  CHECK(set->membership(prod, 1e-9).verdict == Membership::kMember);

  CHECK_THROWS_AS(ppt_set({4}), std::invalid_argument);
}

TEST_CASE("ppt_set projection: Dykstra") {
  const auto set = ppt_set({2, 2});
  Rng rng(11);

  SUBCASE("projection of the Bell state is a PPT state") {
    const auto proj = set->project(testutil::bell_state());
    CHECK(set->membership(proj.op, 1e-7).verdict == Membership::kMember);
  }

  SUBCASE("idempotence and nonexpansiveness") {
    for (int t = 0; t < 5; ++t) {
      const auto x = testutil::random_density(4, rng, {2, 2});
      const auto y = testutil::random_density(4, rng, {2, 2});
      const auto px = set->project(x);
      const auto py = set->project(y);
      const auto pxx = set->project(px.op);
      CHECK(frobenius_norm(pxx.mat() - px.mat()) <= 1e-7);
      CHECK(frobenius_norm(px.mat() - py.mat()) <=
            frobenius_norm(x.mat() - y.mat()) + 1e-9);
    }
  }
}

TEST_CASE("ppt_set linear_min finds the maximal Bell overlap") {
  const auto set = ppt_set({2, 2});
  const auto h = -1.0 * testutil::bell_state();
  const auto sigma = set->linear_min(h);
  const double val = trace(matmul(h.mat(), sigma.mat())).real();
  CHECK(val == doctest::Approx(-0.5).epsilon(2e-3));
  CHECK(set->membership(sigma.op, 1e-6).verdict == Membership::kMember);
}

TEST_CASE("seesaw on the Bell witness direction") {
  const auto h = -1.0 * testutil::bell_state();
  const auto res = seesaw_min_product(h, {2, 2}, 16, 42);
  CHECK(res.value == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(res.local_vectors.size() == 2);
}

TEST_CASE("sep_inner_set") {
  const auto set = sep_inner_set({2, 2}, 40, 5);
  Rng rng(13);

  SUBCASE("mixed product states are members") {
    const auto prod = kron_op(testutil::random_density(2, rng),
                              testutil::random_density(2, rng));
    const auto rep = set->membership(prod, 1e-6);
    CHECK(rep.verdict == Membership::kMember);
  }

  SUBCASE("Bell state is rejected with a witness") {
    const auto rep = set->membership(testutil::bell_state(), 1e-6);
    CHECK(rep.verdict == Membership::kNotMember);
    CHECK(rep.distance > 0.1);
    CHECK(rep.detail.find("witness") != std::string::npos);
  }

  SUBCASE("linear_min against the Bell projector reaches overlap 1/2") {
    const auto h = -1.0 * testutil::bell_state();
    const auto sigma = set->linear_min(h);
    CHECK(trace(matmul(h.mat(), sigma.mat())).real() ==
          doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(set->membership(sigma.op, 1e-6).verdict == Membership::kMember);
  }

  SUBCASE("hull members pass the PPT test (Peres direction)") {
    const auto outer = ppt_set({2, 2});
    const auto desc = set->descriptor();
    for (int t = 0; t < 10; ++t) {
      Matrix mix(4);
      double total = 0.0;
      for (const auto& a : desc.anchors) {
        const double w = rng.uniform();
        mix += w * a;
        total += w;
      }
      mix = (1.0 / total) * mix;
      CHECK(outer->membership(HermOperator(mix, {2, 2}), 1e-8).verdict ==
            Membership::kMember);
    }
  }
}

TEST_CASE("k_extendible_embed") {
  Rng rng(17);

  SUBCASE("k = 1 returns the input") {
    const auto rho = DensityMatrix(testutil::bell_state());
    const auto res = k_extendible_embed(rho, 1);
    CHECK(max_abs(res.reduction.mat() - rho.mat()) <= 1e-12);
    CHECK(res.rel_entropy == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("Bell state, k = 2: at most one bit") {
    const auto rho = DensityMatrix(testutil::bell_state());
    const auto res = k_extendible_embed(rho, 2);
    CHECK(res.rel_entropy <= 1.0 + 1e-6);
    CHECK(res.operator_bound_min_eig >= -1e-9);
  }

  SUBCASE("operator bound and B-permutation invariance for k = 3") {
    const auto rho = DensityMatrix(testutil::random_density(4, rng, {2, 2}));
    const auto res = k_extendible_embed(rho, 3);
    CHECK(res.operator_bound_min_eig >= -1e-9);
    CHECK(res.rel_entropy <= res.log2k + 1e-6);

    // invariance under permutations of the B systems, exactly
    const auto moved = permute_subsystems(res.extension.op, {0, 2, 3, 1});
    CHECK(max_abs(moved.mat() - res.extension.mat()) <= 1e-13);
  }

  CHECK_THROWS_AS(
      k_extendible_embed(DensityMatrix(testutil::bell_state()), 12),
      CapacityError);
}

TEST_CASE("family_property_check") {
  SUBCASE("PPT family on qubit pairs passes all five clauses") {
    const auto base = DensityMatrix(0.25 * HermOperator::identity({2, 2}));
    const auto fam = ppt_family({2, 2}, base);
    const auto report = family_property_check(fam, 2, 4, 23);
    for (const auto& c : report.clauses) {
      INFO(c.clause, ": ", c.witness);
      CHECK(c.passed);
    }
    CHECK(report.all_passed);
  }

  SUBCASE("singleton family (original Stein setting) passes") {
    Rng rng(29);
    // full-rank base
    const auto sigma = DensityMatrix(testutil::random_density(4, rng, {2, 2}));
    const auto fam = singleton_family(sigma);
    const auto report = family_property_check(fam, 2, 4, 31);
    CHECK(report.all_passed);
  }

  SUBCASE("fixed-anchor family without tensor closure fails clause 4") {
    Rng rng(37);
    const auto a = DensityMatrix(testutil::random_density(2, rng));
    // M_1 = {a}, M_2 = {b (x) b} with b != a, so a (x) a is outside M_2
    const auto b = DensityMatrix(testutil::random_density(2, rng));
    auto set_for = [a, b](int n) {
      const auto base = n == 1 ? a : b;
      const auto power = linalg::kron_power(base.op, n)
                             .with_dims(std::vector<int>(n, 2));
      return singleton_set(DensityMatrix(power));
    };
    const SetFamily fam{"broken", {2}, a, std::move(set_for)};
    const auto report = family_property_check(fam, 2, 4, 41);
    CHECK_FALSE(report.all_passed);
    bool clause4_failed = false;
    for (const auto& c : report.clauses)
      if (c.clause.rfind("4:", 0) == 0 && !c.passed && !c.witness.empty())
        clause4_failed = true;
    CHECK(clause4_failed);
  }
}
