#include "steinlab/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "steinlab/parallel.hpp"
#include "steinlab/rng.hpp"

namespace steinlab::states {

using linalg::Complex;

namespace {

// Uniform local dimension of an n-fold tensor space; throws otherwise.
std::pair<int, int> uniform_copies(const std::vector<int>& dims) {
  if (dims.empty()) throw std::invalid_argument("empty subsystem list");
  const int d = dims.front();
  for (int x : dims)
    if (x != d)
      throw std::invalid_argument("operation requires identical subsystem dims");
  return {static_cast<int>(dims.size()), d};
}

std::int64_t ipow(int base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Index map of P_pi on the computational basis: P|e_I> = |e_{map[I]}>.
std::vector<std::int64_t> permutation_index_map(int n, int d,
                                                const std::vector<int>& perm) {
  std::vector<int> inv(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = k;
  const std::int64_t dim = ipow(d, n);
  std::vector<std::int64_t> strides(static_cast<std::size_t>(n));
  std::int64_t s = 1;
  for (int k = n - 1; k >= 0; --k) {
    strides[static_cast<std::size_t>(k)] = s;
    s *= d;
  }
  std::vector<std::int64_t> map(static_cast<std::size_t>(dim));
  std::vector<int> digit(static_cast<std::size_t>(n));
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rem = idx;
    for (int k = 0; k < n; ++k) {
      digit[static_cast<std::size_t>(k)] =
          static_cast<int>(rem / strides[static_cast<std::size_t>(k)]);
      rem %= strides[static_cast<std::size_t>(k)];
    }
    // new digit at position k is the old digit at pi^-1(k)
    std::int64_t out = 0;
    for (int k = 0; k < n; ++k)
      out += static_cast<std::int64_t>(
                 digit[static_cast<std::size_t>(inv[static_cast<std::size_t>(k)])]) *
             strides[static_cast<std::size_t>(k)];
    map[static_cast<std::size_t>(idx)] = out;
  }
  return map;
}

void check_perm(int n, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permutation has wrong length");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("malformed permutation");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Matrix conjugate_by_map(const Matrix& x, const std::vector<std::int64_t>& map) {
  const int n = x.n;
  Matrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.a[static_cast<std::size_t>(map[static_cast<std::size_t>(i)]) * n +
          map[static_cast<std::size_t>(j)]] = x.at(i, j);
  return r;
}

}  // namespace

DensityMatrix::DensityMatrix(HermOperator o) : op(std::move(o)) {
  const StateCheck c = check_state(op);
  if (!c.ok) throw NumericalError("invalid density matrix: " + c.violation);
}

StateCheck check_state(const HermOperator& op) {
  const double tr = linalg::trace(op.mat()).real();
  if (std::abs(tr - 1.0) > 1e-10)
    return {false,
            "trace deviates from 1 by " + std::to_string(std::abs(tr - 1.0)),
            std::abs(tr - 1.0)};
  const auto ev = linalg::herm_eigvals(op);
  const double lmin = ev.back();
  const double lmax = ev.front();
  const double tol = linalg::kPsdTol * std::max(1.0, lmax);
  if (lmin < -tol)
    return {false, "lambda_min = " + std::to_string(lmin) + " below -" +
                       std::to_string(tol),
            -lmin};
  return {true, "", 0.0};
}

DensityMatrix validate_state(const HermOperator& op) { return DensityMatrix(op); }

HermOperator PureState::projector() const {
  return HermOperator(Matrix::outer(amplitudes), subsystem_dims);
}

PureState make_pure(CVector amplitudes, std::vector<int> subsystem_dims) {
  PureState p;
  p.dim = static_cast<int>(amplitudes.size());
  std::int64_t prod = 1;
  for (int d : subsystem_dims) prod *= d;
  if (prod != p.dim)
    throw std::invalid_argument("pure state dims do not match amplitude length");
  const double n = linalg::vnorm(amplitudes);
  if (std::abs(n - 1.0) > 1e-10)
    throw NumericalError("pure state norm deviates from 1 by " +
                         std::to_string(std::abs(n - 1.0)));
  p.amplitudes = std::move(amplitudes);
  p.subsystem_dims = std::move(subsystem_dims);
  return p;
}

PureState purify(const DensityMatrix& rho) {
  const int d = rho.dim();
  const Matrix root = linalg::matrix_sqrt(rho.op).mat();
  CVector amp(static_cast<std::size_t>(d) * d);
  for (int k = 0; k < d; ++k)
    for (int m = 0; m < d; ++m)
      amp[static_cast<std::size_t>(k) * d + m] = root.at(m, k);
  // norm is sqrt(tr rho) = 1 up to roundoff; renormalize exactly
  const double n = linalg::vnorm(amp);
  for (auto& v : amp) v /= n;
  return make_pure(std::move(amp), {d, d});
}

DensityMatrix random_state(int d, int rank, std::uint64_t seed) {
  if (rank < 1 || rank > d)
    throw std::invalid_argument("random_state: rank must be in [1, d]");
  Rng rng(seed);
  std::vector<CVector> cols;
  Matrix g(d);
  // d x rank Gaussian block
  std::vector<Complex> gm(static_cast<std::size_t>(d) * rank);
  for (auto& v : gm) v = rng.cgaussian();
  Matrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Complex s{};
      for (int k = 0; k < rank; ++k)
        s += gm[static_cast<std::size_t>(i) * rank + k] *
             std::conj(gm[static_cast<std::size_t>(j) * rank + k]);
      m.at(i, j) = s;
    }
  const double tr = linalg::trace(m).real();
  for (auto& v : m.a) v /= tr;
  return DensityMatrix(HermOperator(std::move(m), {d}));
}

Matrix permutation_operator(int n, int d, const std::vector<int>& perm) {
  check_perm(n, perm);
  const auto map = permutation_index_map(n, d, perm);
  Matrix p(static_cast<int>(map.size()));
  for (std::size_t i = 0; i < map.size(); ++i)
    p.a[static_cast<std::size_t>(map[i]) * p.n + static_cast<std::int64_t>(i)] = 1.0;
  return p;
}

CVector apply_permutation(const CVector& v, int d, const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  check_perm(n, perm);
  const auto map = permutation_index_map(n, d, perm);
  if (map.size() != v.size())
    throw std::invalid_argument("apply_permutation: dimension mismatch");
  CVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[static_cast<std::size_t>(map[i])] = v[i];
  return r;
}

HermOperator symmetrize(const HermOperator& x) {
  const auto [n, d] = uniform_copies(x.subsystem_dims());
  if (n > 8)
    throw CapacityError(
        "symmetrize: exact S_n average limited to n <= 8 (" + std::to_string(n) +
        " requested); use symmetrize_sampled");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Matrix acc(x.dim());
  double count = 0;
  do {
    const auto map = permutation_index_map(n, d, perm);
    acc += conjugate_by_map(x.mat(), map);
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc = (1.0 / count) * acc;
  return HermOperator(std::move(acc), x.subsystem_dims());
}

HermOperator symmetrize_sampled(const HermOperator& x, int trials,
                                std::uint64_t seed) {
  const auto [n, d] = uniform_copies(x.subsystem_dims());
  if (trials < 1) throw std::invalid_argument("symmetrize_sampled: trials >= 1");
  Rng rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(n));
  Matrix acc(x.dim());
  for (int t = 0; t < trials; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    const auto map = permutation_index_map(n, d, perm);
    acc += conjugate_by_map(x.mat(), map);
  }
  acc = (1.0 / trials) * acc;
  linalg::hermitize(acc);
  return HermOperator(std::move(acc), x.subsystem_dims());
}

double permutation_residual(const HermOperator& x) {
  const auto [n, d] = uniform_copies(x.subsystem_dims());
  double worst = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(k + 1)]);
    const auto map = permutation_index_map(n, d, perm);
    const Matrix moved = conjugate_by_map(x.mat(), map);
    worst = std::max(worst, linalg::max_abs(moved - x.mat()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Symmetric purification

namespace {

// Complete a partial isometry U0 (with initial/final support projectors pd,
// pr) to a full unitary, pairing deterministic orthonormal bases of the two
// null spaces.
Matrix complete_to_unitary(const Matrix& u0, const Matrix& pd, const Matrix& pr) {
  const int n = u0.n;
  auto null_basis = [&](const Matrix& proj) {
    std::vector<CVector> basis;
    for (int j = 0; j < n; ++j) {
      CVector v(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = (i == j ? 1.0 : 0.0) - proj.at(i, j);
      // modified Gram-Schmidt against collected basis
      for (const auto& b : basis) {
        const Complex c = linalg::vdot(b, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
      const double nn = linalg::vnorm(v);
      if (nn > 1e-8) {
        for (auto& z : v) z /= nn;
        basis.push_back(std::move(v));
      }
    }
    return basis;
  };
  const auto dn = null_basis(pd);
  const auto rn = null_basis(pr);
  Matrix u = u0;
  const std::size_t pairs = std::min(dn.size(), rn.size());
  for (std::size_t k = 0; k < pairs; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        u.at(i, j) += rn[k][static_cast<std::size_t>(i)] *
                      std::conj(dn[k][static_cast<std::size_t>(j)]);
  return u;
}

}  // namespace

std::pair<PureState, double> purify_symmetric(const DensityMatrix& rho_n,
                                              const DensityMatrix& rho) {
  const auto [n, d] = uniform_copies(rho_n.subsystem_dims());
  if (d != rho.dim())
    throw std::invalid_argument("purify_symmetric: local dimension mismatch");
  const double res = permutation_residual(rho_n.op);
  if (res > 1e-9)
    throw NumericalError("purify_symmetric: input not permutation-invariant "
                         "(residual " + std::to_string(res) + ")");

  const HermOperator rho_pow = linalg::kron_power(rho.op, n);
  const double fid = linalg::fidelity(rho_n.op, rho_pow);

  // Polar factor of sqrt(rho_n) sqrt(rho^n) through the Gram form.
  const Matrix sn = linalg::matrix_sqrt(rho_n.op).mat();
  const Matrix sp = linalg::matrix_sqrt(rho_pow).mat();
  const Matrix m = linalg::matmul(sn, sp);
  Matrix gram = linalg::matmul(linalg::adjoint(m), m);
  linalg::hermitize(gram);
  const HermOperator gram_op(std::move(gram), rho_n.subsystem_dims());
  const Matrix ginv_sqrt = linalg::matrix_pow(gram_op, -0.5).mat();
  const Matrix u0 = linalg::matmul(m, ginv_sqrt);
  const Matrix pd = linalg::support_projector(gram_op).mat();
  Matrix pr = linalg::matmul(u0, linalg::adjoint(u0));
  linalg::hermitize(pr);
  const Matrix u = complete_to_unitary(u0, pd, pr);
  const Matrix w = linalg::matmul(sn, u);

  // Pair layout (S_1 E_1)(S_2 E_2)...: amplitude of s-string I, e-string J is
  // W[J, I].
  const std::int64_t bigd = ipow(d, n);
  const std::int64_t full = bigd * bigd;
  CVector psi(static_cast<std::size_t>(full));
  std::vector<std::int64_t> sstr(static_cast<std::size_t>(n)), estr(static_cast<std::size_t>(n));
  for (std::int64_t is = 0; is < bigd; ++is) {
    // digits of is
    std::int64_t rem = is;
    for (int k = n - 1; k >= 0; --k) {
      sstr[static_cast<std::size_t>(k)] = rem % d;
      rem /= d;
    }
    for (std::int64_t je = 0; je < bigd; ++je) {
      std::int64_t r2 = je;
      for (int k = n - 1; k >= 0; --k) {
        estr[static_cast<std::size_t>(k)] = r2 % d;
        r2 /= d;
      }
      std::int64_t pos = 0;
      for (int k = 0; k < n; ++k)
        pos = pos * d * d + (sstr[static_cast<std::size_t>(k)] * d +
                             estr[static_cast<std::size_t>(k)]);
      psi[static_cast<std::size_t>(pos)] =
          w.a[static_cast<std::size_t>(je) * bigd + is];
    }
  }

  // Symmetrize over the n pair slots and renormalize.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CVector sym(psi.size(), Complex{});
  double terms = 0;
  do {
    const CVector moved = apply_permutation(psi, d * d, perm);
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] += moved[i];
    terms += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double nn = linalg::vnorm(sym);
  if (nn < 1e-12)
    throw NumericalError("purify_symmetric: symmetrization annihilated the purification");
  for (auto& v : sym) v /= nn;

  const PureState theta = purify(DensityMatrix(rho.op));
  CVector theta_n = theta.amplitudes;
  for (int k = 1; k < n; ++k) theta_n = linalg::kron_vec(theta_n, theta.amplitudes);
  const double overlap = std::abs(linalg::vdot(theta_n, sym));
  if (std::abs(overlap - fid) > 1e-8)
    throw NumericalError(
        "purify_symmetric: overlap " + std::to_string(overlap) +
        " deviates from fidelity " + std::to_string(fid) +
        " beyond 1e-8 (symmetrization degraded the purification)");

  std::vector<int> dims(static_cast<std::size_t>(n), d * d);
  return {make_pure(std::move(sym), dims), overlap};
}

}  // namespace steinlab::states
