#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/divergences.hpp"
#include "steinlab/symmetry.hpp"
#include "test_util.hpp"

using namespace steinlab;
using namespace steinlab::linalg;
using namespace steinlab::states;
using namespace steinlab::symmetry;

namespace {

CVector tensor_power(const CVector& v, int n) {
  CVector r(1, Complex(1.0, 0.0));
  for (int k = 0; k < n; ++k) r = kron_vec(r, v);
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// random symmetric pure state on (C^2)^(x)n with the required overlap floor
CVector random_symmetric_with_overlap(int n, const CVector& theta, double floor,
                                      Rng& rng) {
  const SymBasis sb = sym_basis(2, n);
  CVector v(sb.vectors.front().size(), Complex{});
  for (const auto& b : sb.vectors) {
    const Complex c = rng.cgaussian();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * b[i];
  }
  double nn = vnorm(v);
  for (auto& x : v) x /= nn;
  const CVector tn = tensor_power(theta, n);
  double mix = 0.0;
  while (std::abs(vdot(tn, v)) < floor) {
    mix = mix == 0.0 ? 0.5 : mix * 2.0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += mix * tn[i];
    nn = vnorm(v);
    for (auto& x : v) x /= nn;
  }
  return v;
}

}  // namespace

TEST_CASE("sym_basis") {
  const SymBasis b22 = sym_basis(2, 2);
  CHECK(b22.vectors.size() == 3);
  CHECK(sym_basis(2, 5).vectors.size() == 6);

  const SymBasis b33 = sym_basis(3, 3);
  CHECK(b33.vectors.size() == 10);
  // Gram matrix is the identity
  for (std::size_t i = 0; i < b33.vectors.size(); ++i)
    for (std::size_t j = 0; j < b33.vectors.size(); ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs(vdot(b33.vectors[i], b33.vectors[j]) - expect) <= 1e-10);
    }

  // invariance under adjacent transpositions
  for (const auto& v : b33.vectors)
    for (int k = 0; k + 1 < 3; ++k) {
      std::vector<int> perm{0, 1, 2};
      std::swap(perm[k], perm[k + 1]);
      const auto moved = apply_permutation(v, 3, perm);
      for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(std::abs(moved[i] - v[i]) <= 1e-10);
    }
}

TEST_CASE("sym_vector") {
  Rng rng(81);
  // |01> -> (|01>+|10>)/sqrt(2)
  CVector v(4, Complex{});
  v[1] = 1.0;
  const auto s = sym_vector(make_pure(v, {2, 2}));
  CHECK(std::abs(s.amplitudes[1] - Complex(std::sqrt(0.5), 0)) <= 1e-12);
  CHECK(std::abs(s.amplitudes[2] - Complex(std::sqrt(0.5), 0)) <= 1e-12);

  // already symmetric input is reproduced up to phase
  const auto sym_again = sym_vector(s);
  CHECK(std::abs(std::abs(vdot(sym_again.amplitudes, s.amplitudes)) - 1.0) <= 1e-12);

  // random 3-qubit symmetrization is permutation-invariant
  const auto psi = make_pure(testutil::random_pure(8, rng), {2, 2, 2});
  const auto sp = sym_vector(psi);
  std::vector<int> perm{0, 1, 2};
  std::sort(perm.begin(), perm.end());
  do {
    const auto moved = apply_permutation(sp.amplitudes, 2, perm);
    for (std::size_t i = 0; i < moved.size(); ++i)
      CHECK(std::abs(moved[i] - sp.amplitudes[i]) <= 1e-9);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // antisymmetric input rejected
  CVector anti(4, Complex{});
  anti[1] = std::sqrt(0.5);
  anti[2] = -std::sqrt(0.5);
  CHECK_THROWS_AS(sym_vector(make_pure(anti, {2, 2})), NumericalError);
}

TEST_CASE("orth_complement_basis") {
  Rng rng(83);
  for (int d : {2, 3, 5}) {
    const auto theta = testutil::random_pure(d, rng);
    const auto comp = orth_complement_basis(theta);
    REQUIRE(static_cast<int>(comp.size()) == d - 1);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      CHECK(std::abs(vdot(theta, comp[i])) <= 1e-12);
      for (std::size_t j = 0; j < comp.size(); ++j)
        CHECK(std::abs(vdot(comp[i], comp[j]) - (i == j ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("almost_power_basis") {
  Rng rng(87);
  const auto theta = testutil::random_pure(2, rng);

  const auto b0 = almost_power_basis(theta, 4, 0);
  REQUIRE(b0.vectors.size() == 1);
  const auto t4 = tensor_power(theta, 4);
  CHECK(std::abs(std::abs(vdot(b0.vectors[0], t4)) - 1.0) <= 1e-10);

  const auto b2 = almost_power_basis(theta, 4, 2);
  CHECK(b2.vectors.size() == 3);  // r+1 for qubits

  // orthonormal
  for (std::size_t i = 0; i < b2.vectors.size(); ++i)
    for (std::size_t j = 0; j < b2.vectors.size(); ++j)
      CHECK(std::abs(vdot(b2.vectors[i], b2.vectors[j]) - (i == j ? 1.0 : 0.0)) <=
            1e-10);

  // every vector lies in the symmetric subspace, and the span projector
  // commutes with transpositions
  Matrix proj(16);
  for (const auto& v : b2.vectors) proj += Matrix::outer(v);
  for (int k = 0; k + 1 < 4; ++k) {
    std::vector<int> perm{0, 1, 2, 3};
    std::swap(perm[k], perm[k + 1]);
    const Matrix p = permutation_operator(4, 2, perm);
    CHECK(max_abs(matmul(p, proj) - matmul(proj, p)) <= 1e-9);
  }
}

TEST_CASE("postselect_power") {
  Rng rng(91);
  const auto theta = testutil::random_pure(2, rng);

  SUBCASE("tensor power input: zero distance") {
    const auto psi = make_pure(tensor_power(theta, 5), {2, 2, 2, 2, 2});
    const auto res = postselect_power(psi, theta, 2, 1);
    CHECK(res.report.trace_distance <= 1e-9);
    CHECK(res.report.op_bound_holds);
    const auto t3 = tensor_power(theta, 3);
    CHECK(std::abs(std::abs(vdot(res.psi_nm.amplitudes, t3)) - 1.0) <= 1e-10);
  }

  SUBCASE("random symmetric 6-qubit states: both lemma bounds hold") {
    for (int t = 0; t < 8; ++t) {
      const auto th = testutil::random_pure(2, rng);
      const auto v = random_symmetric_with_overlap(6, th, 0.3, rng);
      const auto psi = make_pure(v, std::vector<int>(6, 2));
      for (int m = 0; m <= 6; ++m)
        for (int r = 0; m + r <= 6; ++r) {
          const auto res = postselect_power(psi, th, m, r);
          CHECK(res.report.op_bound_holds);
          CHECK(res.report.distance_bound_holds);
        }
    }
  }

  SUBCASE("inputs already in the truncated span: no truncation error") {
    const auto apb = almost_power_basis(theta, 5, 2);
    REQUIRE(apb.vectors.size() == 3);
    CVector v(32, Complex{});
    // mix of layers k = 0..2
    const double w[3] = {0.6, 0.5, std::sqrt(1 - 0.36 - 0.25)};
    for (std::size_t i = 0; i < apb.vectors.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) v[j] += w[i] * apb.vectors[i][j];
    const double nn = vnorm(v);
    for (auto& x : v) x /= nn;
    const auto psi = make_pure(v, std::vector<int>(5, 2));
    // m = 0 keeps the expansion; truncation at r = 2 is lossless
    const auto res = postselect_power(psi, theta, 0, 2);
    CHECK(std::abs(std::abs(vdot(res.psi_nm.amplitudes, res.psi_nmr.amplitudes)) -
                   1.0) <= 1e-10);
  }

  CHECK_THROWS_AS(postselect_power(make_pure(tensor_power(theta, 3), {2, 2, 2}),
                                   theta, 2, 2),
                  std::invalid_argument);
}

TEST_CASE("typical projector") {
  SUBCASE("maximally mixed: identity") {
    const auto rho = DensityMatrix(0.5 * HermOperator::identity({2}));
    const auto pi = typical_projector(rho, 3, 0.1);
    CHECK(max_abs(pi.mat() - Matrix::identity(8)) <= 1e-10);
  }
  SUBCASE("pure state: support power") {
    const auto rho = DensityMatrix(HermOperator::diag({1.0, 0.0}));
    const auto pi = typical_projector(rho, 3, 0.1);
    CHECK(trace(pi.mat()).real() == doctest::Approx(1.0));
    CHECK(pi.at(0, 0).real() == doctest::Approx(1.0));
  }
  SUBCASE("binomial enumeration oracle") {
    const auto rho = DensityMatrix(HermOperator::diag({0.9, 0.1}));
    const int n = 10;
    const double delta = 0.2;
    const double got = typical_mass(rho, n, delta);
    // independent binomial sum
    const double entropy = -(0.9 * std::log2(0.9) + 0.1 * std::log2(0.1));
    double expect = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double nlog = -( (n - j) * std::log2(0.9) + j * std::log2(0.1));
      if (std::abs(nlog - n * entropy) <= n * delta)
        expect += binom(n, j) * std::pow(0.9, n - j) * std::pow(0.1, j);
    }
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));

    // projector trace mass agrees with the classical mass at small n
    const auto pi = typical_projector(rho, 4, delta);
    const auto rho4 = kron_power(rho.op, 4);
    CHECK(trace(matmul(rho4.mat(), pi.mat())).real() ==
          doctest::Approx(typical_mass(rho, 4, delta)).epsilon(1e-10));
  }
}

TEST_CASE("superposition lemma on random orthonormal systems") {
  Rng rng(95);
  for (int t = 0; t < 40; ++t) {
    const int dim = 6 + rng.uniform_int(6);
    const int k = 2 + rng.uniform_int(4);  // up to 5
    // random orthonormal set by Gram-Schmidt
    std::vector<CVector> vs;
    while (static_cast<int>(vs.size()) < k) {
      CVector v = testutil::random_pure(dim, rng);
      for (const auto& b : vs) {
        const Complex c = vdot(b, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
      const double nn = vnorm(v);
      if (nn < 0.1) continue;
      for (auto& x : v) x /= nn;
      vs.push_back(std::move(v));
    }
    CVector big(static_cast<std::size_t>(dim), Complex{});
    Matrix sum(dim);
    for (const auto& v : vs) {
      for (std::size_t i = 0; i < big.size(); ++i) big[i] += v[i];
      sum += Matrix::outer(v);
    }
    const HermOperator slack(static_cast<double>(k) * sum - Matrix::outer(big), {dim});
    CHECK(lambda_min(slack) >= -1e-9);
  }
}

TEST_CASE("trace bound lemma on constructed almost power states") {
  Rng rng(99);
  for (int total_n : {6, 8}) {
    const auto theta = testutil::random_pure(2, rng);
    const int m = 1;
    const int nn = total_n - m;  // lemma's H^(x)(n-m)
    const int r = nn / 2 >= 2 ? 2 : 1;
    const auto apb = almost_power_basis(theta, nn, r);
    REQUIRE(static_cast<int>(apb.vectors.size()) == r + 1);
    // equal coefficients with the 1/n floor satisfied
    std::vector<double> beta(apb.vectors.size(),
                             1.0 / std::sqrt(static_cast<double>(r + 1)));
    for (double b : beta) CHECK(b >= 1.0 / total_n);
    const CVector phi = almost_power_combination(apb, beta);

    std::vector<int> dims(static_cast<std::size_t>(nn), 2);
    const HermOperator phiop(Matrix::outer(phi), dims);
    std::vector<int> keep;
    for (int k = r; k < nn; ++k) keep.push_back(k);
    const auto reduced = partial_trace(phiop, keep);

    const auto lhs = kron_power(testutil::pure_op(theta, {2}), nn - r);
    const double factor =
        std::exp2(total_n * divergences::binary_entropy(static_cast<double>(r) / nn)) *
        total_n * total_n;
    const HermOperator slack = factor * reduced - lhs;
    CHECK(lambda_min(slack) >= -1e-9);
  }
}

TEST_CASE("binomial entropy bound up to n = 30") {
  for (int n = 1; n <= 30; ++n)
    for (int k = 0; k <= n; ++k) {
      const double b = binom(n, k);
      const double bound =
          std::exp2(n * divergences::binary_entropy(static_cast<double>(k) / n));
      CHECK(b <= bound * (1.0 + 1e-12));
    }
}
