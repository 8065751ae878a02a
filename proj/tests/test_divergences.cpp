#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/divergences.hpp"
#include "test_util.hpp"

using namespace steinlab;
using namespace steinlab::linalg;
using namespace steinlab::states;
using namespace steinlab::divergences;

namespace {

DensityMatrix dm(const HermOperator& op) { return DensityMatrix(op); }

DensityMatrix random_dm(int d, Rng& rng) {
  return DensityMatrix(testutil::random_density(d, rng));
}

// independent oracle: smallest s with rho <= 2^s sigma, by bisection on the
// minimum eigenvalue
double smax_bisection(const DensityMatrix& rho, const DensityMatrix& sigma) {
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const HermOperator gap = std::exp2(mid) * sigma.op - rho.op;
    if (lambda_min(gap) >= -1e-13)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

TEST_CASE("relative entropy basics") {
  Rng rng(51);
  const auto rho = random_dm(3, rng);
  CHECK(relative_entropy(rho, rho).value == doctest::Approx(0.0).epsilon(1e-9));

  // commuting case equals classical KL
  const auto p = dm(HermOperator::diag({0.7, 0.2, 0.1}));
  const auto q = dm(HermOperator::diag({0.25, 0.25, 0.5}));
  double kl = 0.0;
  for (auto [pi, qi] : {std::pair{0.7, 0.25}, {0.2, 0.25}, {0.1, 0.5}})
    kl += pi * std::log2(pi / qi);
  CHECK(relative_entropy(p, q).value == doctest::Approx(kl).epsilon(1e-10));

  const auto pure = dm(HermOperator::diag({1.0, 0.0}));
  const auto mixed = dm(0.5 * HermOperator::identity({2}));
  CHECK(relative_entropy(pure, mixed).value == doctest::Approx(1.0).epsilon(1e-10));

  // support violation
  const auto r2 = dm(HermOperator::diag({0.5, 0.5}));
  const auto narrow = dm(HermOperator::diag({1.0, 0.0}));
  const auto rep = relative_entropy(r2, narrow);
  CHECK_FALSE(rep.support_ok);
  CHECK(std::isinf(rep.value));
}

TEST_CASE("max relative entropy") {
  Rng rng(53);
  const auto rho = random_dm(4, rng);
  CHECK(max_relative_entropy(rho, rho).value == doctest::Approx(0.0).epsilon(1e-8));

  // pure state vs maximally mixed: log2 d
  for (int d : {2, 3, 5}) {
    const auto psi = testutil::random_pure(d, rng);
    const auto pure = dm(testutil::pure_op(psi, {d}));
    const auto mm = dm((1.0 / d) * HermOperator::identity({d}));
    CHECK(max_relative_entropy(pure, mm).value ==
          doctest::Approx(std::log2(d)).epsilon(1e-9));
  }

  // bisection oracle on random qubit pairs
  for (int t = 0; t < 10; ++t) {
    const auto a = random_dm(2, rng);
    const auto b = random_dm(2, rng);
    const double got = max_relative_entropy(a, b).value;
    CHECK(got == doctest::Approx(smax_bisection(a, b)).epsilon(1e-6));
  }
}

TEST_CASE("psi function") {
  Rng rng(57);
  const auto rho = random_dm(2, rng);
  const auto sig = random_dm(2, rng);
  CHECK(psi(rho, sig, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

  // finite-difference slope at 0 equals S(rho||sigma)
  const double h = 1e-4;
  const double slope = (psi(rho, sig, h) - psi(rho, sig, 0.0)) / h;
  CHECK(slope == doctest::Approx(relative_entropy(rho, sig).value).epsilon(1e-3));

  // commuting diagonal pair closed form
  const auto p = dm(HermOperator::diag({0.6, 0.4}));
  const auto q = dm(HermOperator::diag({0.3, 0.7}));
  const double s = 0.42;
  const double direct = std::log2(std::pow(0.6, 1 + s) * std::pow(0.3, -s) +
                                  std::pow(0.4, 1 + s) * std::pow(0.7, -s));
  CHECK(psi(p, q, s) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("stein upper bound") {
  Rng rng(59);
  const auto rho = random_dm(2, rng);
  const auto sig = random_dm(2, rng);

  CHECK(stein_upper_bound(rho, sig, 5, 0.0) == doctest::Approx(1.0));

  const double s = relative_entropy(rho, sig).value;
  const double lam = s + 0.4;
  double prev = 1.0;
  for (int n = 1; n <= 8; ++n) {
    const double b = stein_upper_bound(rho, sig, n, lam);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev < 1.0);

  // dominates the exact positive-part trace (64-dim eigendecomposition oracle)
  for (int n = 1; n <= 6; ++n) {
    const auto rn = kron_power(rho.op, n);
    const auto sn = kron_power(sig.op, n);
    const double exact =
        positive_part_trace(rn - std::exp2(lam * n) * sn);
    CHECK(exact <= stein_upper_bound(rho, sig, n, lam) + 1e-12);
  }
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == doctest::Approx(0.0));
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(std::abs(binary_entropy(0.11) - 0.5) <= 2e-4);
  CHECK_THROWS_AS(binary_entropy(1.5), std::invalid_argument);
}

TEST_CASE("han inequality") {
  const std::vector<double> p{0.5, 0.5};
  CHECK(han_inequality_check(p, p, {1.0, 1.0}, 0.0).lhs == doctest::Approx(0.0));
  CHECK(han_inequality_check(p, p, {1.0, 1.0}, 0.0).holds);
  CHECK(han_inequality_check(p, p, {0.0, 0.0}, -2.0).lhs == doctest::Approx(0.0));

  Rng rng(61);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + rng.uniform_int(6);
    std::vector<double> pp(n), qq(n), ll(n);
    double sp = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      pp[i] = rng.uniform() + 1e-3;
      qq[i] = rng.uniform() + 1e-3;
      ll[i] = rng.uniform();
      sp += pp[i];
      sq += qq[i];
    }
    for (int i = 0; i < n; ++i) {
      pp[i] /= sp;
      qq[i] /= sq;
    }
    const double mu = 4.0 * (rng.uniform() - 0.5);
    CHECK(han_inequality_check(pp, qq, ll, mu).holds);
  }

  CHECK_THROWS_AS(han_inequality_check({0.5, 0.6}, p, {1, 1}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("cramer exponent") {
  // a below the mean: exponent 0
  CHECK(cramer_exponent({0.5, 0.5}, {-1.0, 1.0}, -0.5) == doctest::Approx(0.0));

  // two-point closed-form Legendre oracle
  const double r = 0.3, x1 = 2.0, x2 = -1.0, a = 1.0;
  auto objective = [&](double s) {
    return a * s - std::log2(r * std::exp2(s * x1) + (1 - r) * std::exp2(s * x2));
  };
  // stationary point: 2^{s(x1-x2)} = (1-r)(a-x2) / (r(x1-a))
  const double u = ((1 - r) * (a - x2)) / (r * (x1 - a));
  double sstar = std::log2(u) / (x1 - x2);
  sstar = std::clamp(sstar, 0.0, 1.0);
  CHECK(cramer_exponent({r, 1 - r}, {x1, x2}, a) ==
        doctest::Approx(objective(sstar)).epsilon(1e-4));

  // deterministic X = c, a > c: grows linearly until the s cap
  const double c = 0.5;
  for (double aa : {1.0, 1.5, 2.0})
    CHECK(cramer_exponent({1.0}, {c}, aa) == doctest::Approx(aa - c).epsilon(1e-9));

  // tail bound invariant Pr(X >= a) <= 2^{-Lambda}
  Rng rng(67);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + rng.uniform_int(5);
    std::vector<double> rr(n), xx(n);
    double s = 0;
    for (int i = 0; i < n; ++i) {
      rr[i] = rng.uniform() + 1e-3;
      s += rr[i];
      xx[i] = 4.0 * (rng.uniform() - 0.5);
    }
    for (auto& v : rr) v /= s;
    const double aa = 4.0 * (rng.uniform() - 0.5);
    double tail = 0.0;
    for (int i = 0; i < n; ++i)
      if (xx[i] >= aa) tail += rr[i];
    const double expo = cramer_exponent(rr, xx, aa);
    CHECK(tail <= std::exp2(-expo) + 1e-12);
  }
}

TEST_CASE("ordering and additivity invariants") {
  Rng rng(71);
  for (int t = 0; t < 25; ++t) {
    const int d = 2 + rng.uniform_int(3);
    const auto rho = random_dm(d, rng);
    const auto sig = random_dm(d, rng);
    const double s = relative_entropy(rho, sig).value;
    const double smax = max_relative_entropy(rho, sig).value;
    CHECK(s <= smax + 1e-8);

    // additivity on two copies
    const auto r2 = DensityMatrix(kron_power(rho.op, 2));
    const auto s2 = DensityMatrix(kron_power(sig.op, 2));
    CHECK(relative_entropy(r2, s2).value == doctest::Approx(2.0 * s).epsilon(1e-8));
  }

  // joint convexity spot-check
  for (int t = 0; t < 20; ++t) {
    const auto r1 = random_dm(3, rng);
    const auto r2 = random_dm(3, rng);
    const auto s1 = random_dm(3, rng);
    const auto s2 = random_dm(3, rng);
    const double lam = rng.uniform();
    const auto rmix = DensityMatrix(lam * r1.op + (1 - lam) * r2.op);
    const auto smix = DensityMatrix(lam * s1.op + (1 - lam) * s2.op);
    CHECK(relative_entropy(rmix, smix).value <=
          lam * relative_entropy(r1, s1).value +
              (1 - lam) * relative_entropy(r2, s2).value + 1e-8);
  }

  // Klein inequality: nonnegative when support_ok
  for (int t = 0; t < 20; ++t) {
    const auto rho = random_dm(3, rng);
    const auto sig = random_dm(3, rng);
    const auto rep = relative_entropy(rho, sig);
    CHECK(rep.support_ok);
    CHECK(rep.value >= -1e-10);
  }
}
