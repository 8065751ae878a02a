#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/divergences.hpp"
#include "steinlab/measures.hpp"
#include "test_util.hpp"

using namespace steinlab;
using namespace steinlab::linalg;
using namespace steinlab::states;
using namespace steinlab::state_sets;
using namespace steinlab::measures;

namespace {

HermOperator positive_part_of(const HermOperator& x) {
  const auto sp = herm_eig(x);
  Matrix m(x.dim());
  for (int k = 0; k < x.dim(); ++k) {
    const double lam = std::max(sp.eigenvalues[static_cast<std::size_t>(k)], 0.0);
    if (lam == 0.0) continue;
    for (int i = 0; i < x.dim(); ++i)
      for (int j = 0; j < x.dim(); ++j)
        m.at(i, j) += sp.vectors.at(i, k) * lam * std::conj(sp.vectors.at(j, k));
  }
  hermitize(m);
  return HermOperator(std::move(m), x.subsystem_dims());
}

}  // namespace

TEST_CASE("rel_ent_to_set") {
  const auto ppt = ppt_set({2, 2});

  SUBCASE("member input gives zero") {
    Rng rng(3);
    const auto member = kron_op(testutil::random_density(2, rng),
                                testutil::random_density(2, rng));
    const auto res = rel_ent_to_set(DensityMatrix(member), *ppt);
    CHECK(res.value <= 1e-5);
  }

  SUBCASE("Bell state against PPT is one bit") {
    const auto res = rel_ent_to_set(DensityMatrix(testutil::bell_state()), *ppt);
    CHECK(res.value == doctest::Approx(1.0).epsilon(0.02));
    CHECK(ppt->membership(res.certificate.op, 1e-5).verdict == Membership::kMember);
    CHECK(res.lower <= res.value);
  }

  SUBCASE("pure product state gives zero") {
    CVector v00(4, Complex{});
    v00[0] = 1.0;
    const auto res =
        rel_ent_to_set(DensityMatrix(HermOperator(Matrix::outer(v00), {2, 2})), *ppt);
    CHECK(res.value <= 1e-6);
  }
}

TEST_CASE("log_robustness") {
  const auto ppt = ppt_set({2, 2});

  SUBCASE("member gives zero") {
    Rng rng(5);
    const auto member = kron_op(testutil::random_density(2, rng),
                                testutil::random_density(2, rng));
    CHECK(log_robustness(DensityMatrix(member), *ppt).value == doctest::Approx(0.0));
  }

  SUBCASE("Bell state: exactly one bit") {
    const auto res = log_robustness(DensityMatrix(testutil::bell_state()), *ppt);
    CHECK(res.value == doctest::Approx(1.0).epsilon(0.01));
    // the certificate dominates 2^-s rho and is (close to) a member
    CHECK(ppt->membership(res.certificate.op, 1e-5).verdict == Membership::kMember);
  }

  SUBCASE("product pure state gives zero") {
    CVector v(4, Complex{});
    v[0] = 1.0;
    const auto res =
        log_robustness(DensityMatrix(HermOperator(Matrix::outer(v), {2, 2})), *ppt);
    CHECK(res.value <= 1e-4);
  }
}

TEST_CASE("dr_smooth") {
  Rng rng(7);

  SUBCASE("Delta = 0 reproduces the input") {
    const auto rho = DensityMatrix(testutil::random_density(3, rng));
    const auto y = rho.op + 0.1 * HermOperator::identity({3});
    const auto [sm, rep] = dr_smooth(rho, y, HermOperator::zero({3}));
    CHECK(max_abs(sm.mat() - rho.mat()) <= 1e-9);
    CHECK(rep.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.operator_bound_holds);
  }

  SUBCASE("Y = rho/2, Delta = rho/2") {
    const auto rho = DensityMatrix(testutil::random_density(2, rng));
    const auto [sm, rep] = dr_smooth(rho, 0.5 * rho.op, 0.5 * rho.op);
    CHECK(max_abs(sm.mat() - rho.mat()) <= 1e-9);
    CHECK(rep.tr_delta == doctest::Approx(0.5));
    CHECK(rep.fidelity_holds);
  }

  SUBCASE("random preconditioned instances satisfy all three postconditions") {
    for (int t = 0; t < 25; ++t) {
      const int d = 2 + rng.uniform_int(7);  // 2..8
      const auto rho = DensityMatrix(testutil::random_density(d, rng));
      const double tau = 0.02 + 0.3 * rng.uniform();
      const auto delta = tau * testutil::random_density(d, rng);
      const auto y = positive_part_of(rho.op - delta);
      const auto [sm, rep] = dr_smooth(rho, y, delta);
      CHECK(rep.operator_bound_holds);
      CHECK(rep.fidelity_holds);
      CHECK(rep.trace_distance_holds);
    }
  }

  SUBCASE("violated precondition is rejected with the offending eigenvalue") {
    const auto rho = DensityMatrix(testutil::random_density(2, rng));
    CHECK_THROWS_AS(dr_smooth(rho, 0.25 * rho.op, HermOperator::zero({2})),
                    NumericalError);
  }
}

TEST_CASE("fw_min_positive_part against a singleton oracle") {
  Rng rng(11);
  const auto sigma = DensityMatrix(testutil::random_density(4, rng, {2, 2}));
  const auto set = singleton_set(sigma);
  const auto x = testutil::random_density(4, rng, {2, 2});
  const double c = 1.7;
  const auto res = fw_min_positive_part(x, c, *set);
  const double direct = positive_part_trace(x - c * sigma.op);
  CHECK(res.value == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("smooth_log_robustness") {
  const auto ppt = ppt_set({2, 2});
  const auto bell = DensityMatrix(testutil::bell_state());

  const auto plain = log_robustness(bell, *ppt);
  const auto at0 = smooth_log_robustness(bell, *ppt, 0.0);
  CHECK(at0.value == doctest::Approx(plain.value).epsilon(1e-3));
  CHECK(at0.upper_bound_only);

  const auto at01 = smooth_log_robustness(bell, *ppt, 0.1);
  CHECK(at01.value <= plain.value + 1e-6);

  const auto at03 = smooth_log_robustness(bell, *ppt, 0.3);
  CHECK(at03.value <= at01.value + 1e-9);

  CHECK_THROWS_AS(smooth_log_robustness(bell, *ppt, 2.5), std::invalid_argument);
}

TEST_CASE("regularized_curve") {
  SUBCASE("product state: all entries zero") {
    Rng rng(13);
    const auto prod = DensityMatrix(kron_op(testutil::random_density(2, rng),
                                            testutil::random_density(2, rng)));
    const auto base = DensityMatrix(0.25 * HermOperator::identity({2, 2}));
    const auto fam = ppt_family({2, 2}, base);
    const auto curve = regularized_curve(prod, fam, 1);
    CHECK(curve.points[0].value_per_copy <= 1e-5);
  }

  SUBCASE("n = 1 entry equals rel_ent_to_set") {
    const auto bell = DensityMatrix(testutil::bell_state());
    const auto base = DensityMatrix(0.25 * HermOperator::identity({2, 2}));
    const auto fam = ppt_family({2, 2}, base);
    const auto curve = regularized_curve(bell, fam, 1);
    const auto direct = rel_ent_to_set(bell, *fam.set_for(1));
    CHECK(curve.points[0].raw_value == doctest::Approx(direct.value).epsilon(1e-6));
  }
}

TEST_CASE("ordering invariant E <= LR") {
  Rng rng(17);
  const auto ppt = ppt_set({2, 2});
  for (int t = 0; t < 3; ++t) {
    const auto rho = DensityMatrix(testutil::random_density(4, rng, {2, 2}));
    const auto e = rel_ent_to_set(rho, *ppt);
    const auto lr = log_robustness(rho, *ppt);
    CHECK(e.value <= lr.value + 1e-6);
    // certificate of LR is a member whose relative entropy dominates E
    CHECK(divergences::relative_entropy(rho, lr.certificate).value >=
          e.value - 1e-4);
  }
}
