#include "steinlab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace steinlab::symmetry {

using linalg::Complex;
using linalg::Matrix;

namespace {

std::int64_t ipow(int b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_capacity(int d, int n, int budget) {
  double dm = 1.0;
  for (int i = 0; i < n; ++i) {
    dm *= d;
    if (dm > budget)
      throw CapacityError("symmetric-subspace construction: dim " +
                          std::to_string(d) + "^" + std::to_string(n) +
                          " exceeds budget " + std::to_string(budget));
  }
}

// Modified Gram-Schmidt with one re-orthogonalization pass; drops candidates
// below the 1e-10 tolerance.
void mgs_append(std::vector<CVector>& basis, CVector v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      const Complex c = linalg::vdot(b, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  const double n = linalg::vnorm(v);
  if (n <= 1e-10) return;
  for (auto& x : v) x /= n;
  basis.push_back(std::move(v));
}

void enumerate_occupations(int d, int n, std::vector<int>& cur,
                           std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == d - 1) {
    int used = 0;
    for (int x : cur) used += x;
    cur.push_back(n - used);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  int used = 0;
  for (int x : cur) used += x;
  for (int k = 0; k <= n - used; ++k) {
    cur.push_back(k);
    enumerate_occupations(d, n, cur, out);
    cur.pop_back();
  }
}

}  // namespace

SymBasis sym_basis(int d, int n) {
  if (d < 1 || n < 1) throw std::invalid_argument("sym_basis: d, n >= 1");
  check_capacity(d, n, linalg::kDefaultDimBudget);
  SymBasis sb;
  sb.d = d;
  sb.n = n;
  std::vector<int> cur;
  enumerate_occupations(d, n, cur, sb.occupations);

  const std::int64_t dim = ipow(d, n);
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (const auto& occ : sb.occupations) {
    CVector v(static_cast<std::size_t>(dim), Complex{});
    std::int64_t count = 0;
    for (std::int64_t idx = 0; idx < dim; ++idx) {
      std::int64_t rem = idx;
      for (int k = n - 1; k >= 0; --k) {
        digits[static_cast<std::size_t>(k)] = static_cast<int>(rem % d);
        rem /= d;
      }
      std::vector<int> o(static_cast<std::size_t>(d), 0);
      for (int k = 0; k < n; ++k) ++o[static_cast<std::size_t>(digits[static_cast<std::size_t>(k)])];
      if (o == occ) {
        v[static_cast<std::size_t>(idx)] = 1.0;
        ++count;
      }
    }
    const double norm = std::sqrt(static_cast<double>(count));
    for (auto& x : v) x /= norm;
    sb.vectors.push_back(std::move(v));
  }
  return sb;
}

PureState sym_vector(const PureState& psi) {
  const auto& dims = psi.subsystem_dims;
  const int n = static_cast<int>(dims.size());
  const int d = dims.front();
  for (int x : dims)
    if (x != d) throw std::invalid_argument("sym_vector: uniform dims required");
  if (n > 8) throw CapacityError("sym_vector: n <= 8");

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CVector acc(psi.amplitudes.size(), Complex{});
  double terms = 0.0;
  do {
    const CVector moved = states::apply_permutation(psi.amplitudes, d, perm);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += moved[i];
    terms += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& x : acc) x /= terms;
  const double norm = linalg::vnorm(acc);
  if (norm <= 1e-10)
    throw NumericalError("sym_vector: input orthogonal to the symmetric subspace");
  for (auto& x : acc) x /= norm;
  return states::make_pure(std::move(acc), dims);
}

std::vector<CVector> orth_complement_basis(const CVector& theta) {
  const int d = static_cast<int>(theta.size());
  // Householder reflection H with H theta = e_0 (up to phase); columns 1..d-1
  // of H^dagger span the complement.
  const Complex t0 = theta[0];
  const double m0 = std::abs(t0);
  const Complex phase = m0 > 0 ? t0 / m0 : Complex(1.0, 0.0);
  // u = theta - phase e_0 ; H = I - 2 u u^dag / ||u||^2 maps theta -> phase e_0
  CVector u = theta;
  u[0] -= phase;
  const double un = linalg::vnorm(u);
  std::vector<CVector> basis;
  for (int j = 1; j < d; ++j) {
    CVector v(static_cast<std::size_t>(d), Complex{});
    v[static_cast<std::size_t>(j)] = 1.0;
    if (un > 1e-14) {
      // v <- H^dag e_j = e_j - 2 u (u^dag e_j)/||u||^2 (H Hermitian)
      const Complex c = 2.0 * std::conj(u[static_cast<std::size_t>(j)]) / (un * un);
      for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] -= c * u[static_cast<std::size_t>(i)];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace {

// Place eta (a vector on H^(x)k supported on the theta-complement) at the
// positions of subset, theta elsewhere; accumulate into out.
void place_eta(const CVector& eta, const CVector& theta, int d, int n,
               const std::vector<int>& subset, CVector& out) {
  const std::int64_t dim = ipow(d, n);
  const int k = static_cast<int>(subset.size());
  std::vector<int> digits(static_cast<std::size_t>(n));
  std::vector<bool> in_subset(static_cast<std::size_t>(n), false);
  for (int s : subset) in_subset[static_cast<std::size_t>(s)] = true;
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rem = idx;
    for (int p = n - 1; p >= 0; --p) {
      digits[static_cast<std::size_t>(p)] = static_cast<int>(rem % d);
      rem /= d;
    }
    Complex coeff(1.0, 0.0);
    std::int64_t eta_idx = 0;
    for (int p = 0, kk = 0; p < n; ++p) {
      if (in_subset[static_cast<std::size_t>(p)]) {
        eta_idx = eta_idx * d + digits[static_cast<std::size_t>(p)];
        ++kk;
      } else {
        coeff *= theta[static_cast<std::size_t>(digits[static_cast<std::size_t>(p)])];
      }
    }
    if (k > 0 && std::abs(eta[static_cast<std::size_t>(eta_idx)]) == 0.0) continue;
    out[static_cast<std::size_t>(idx)] +=
        coeff * (k > 0 ? eta[static_cast<std::size_t>(eta_idx)] : Complex(1.0, 0.0));
  }
}

void subsets_of_size(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace

AlmostPowerBasis almost_power_basis(const CVector& theta, int n, int r) {
  const int d = static_cast<int>(theta.size());
  if (r < 0 || r > n) throw std::invalid_argument("almost_power_basis: 0 <= r <= n");
  check_capacity(d, n, linalg::kDefaultDimBudget);
  AlmostPowerBasis apb;
  apb.theta = theta;
  apb.d = d;
  apb.n = n;
  apb.r = r;

  const auto comp = orth_complement_basis(theta);
  const std::int64_t dim = ipow(d, n);

  for (int k = 0; k <= r; ++k) {
    std::vector<CVector> etas;
    if (k == 0) {
      etas.push_back(CVector{});  // placeholder: pure theta power
    } else if (d < 2) {
      break;  // no complement directions
    } else {
      // symmetric basis of (H perp theta)^(x)k, embedded in H^(x)k
      const SymBasis sb = sym_basis(d - 1, k);
      const std::int64_t ek = ipow(d - 1, k);
      for (const auto& small : sb.vectors) {
        CVector eta(static_cast<std::size_t>(ipow(d, k)), Complex{});
        std::vector<int> digs(static_cast<std::size_t>(k));
        for (std::int64_t idx = 0; idx < ek; ++idx) {
          if (std::abs(small[static_cast<std::size_t>(idx)]) == 0.0) continue;
          std::int64_t rem = idx;
          for (int p = k - 1; p >= 0; --p) {
            digs[static_cast<std::size_t>(p)] = static_cast<int>(rem % (d - 1));
            rem /= (d - 1);
          }
          // tensor of complement vectors
          CVector term(static_cast<std::size_t>(1), Complex(1.0, 0.0));
          for (int p = 0; p < k; ++p)
            term = linalg::kron_vec(term, comp[static_cast<std::size_t>(digs[static_cast<std::size_t>(p)])]);
          for (std::size_t i = 0; i < term.size(); ++i)
            eta[i] += small[static_cast<std::size_t>(idx)] * term[i];
        }
        etas.push_back(std::move(eta));
      }
    }

    std::vector<std::vector<int>> subsets;
    subsets_of_size(n, k, subsets);
    for (const auto& eta : etas) {
      CVector v(static_cast<std::size_t>(dim), Complex{});
      for (const auto& s : subsets) place_eta(eta, theta, d, n, s, v);
      const double norm = linalg::vnorm(v);
      if (norm <= 1e-10) continue;
      for (auto& x : v) x /= norm;
      const std::size_t before = apb.vectors.size();
      mgs_append(apb.vectors, std::move(v));
      if (apb.vectors.size() > before) apb.layer.push_back(k);
    }
  }
  return apb;
}

CVector almost_power_combination(const AlmostPowerBasis& basis,
                                 const std::vector<double>& beta) {
  if (beta.size() != basis.vectors.size())
    throw std::invalid_argument("almost_power_combination: length mismatch");
  CVector v(basis.vectors.front().size(), Complex{});
  for (std::size_t i = 0; i < beta.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] += beta[i] * basis.vectors[i][j];
  return v;
}

PostselectResult postselect_power(const PureState& psi_n, const CVector& theta,
                                  int m, int r) {
  const int n = static_cast<int>(psi_n.subsystem_dims.size());
  const int d = static_cast<int>(theta.size());
  for (int x : psi_n.subsystem_dims)
    if (x != d) throw std::invalid_argument("postselect_power: dim mismatch");
  if (m < 0 || r < 0 || m + r > n)
    throw std::invalid_argument("postselect_power: need m + r <= n");

  CVector theta_n(static_cast<std::size_t>(1), Complex(1.0, 0.0));
  for (int k = 0; k < n; ++k) theta_n = linalg::kron_vec(theta_n, theta);
  const double overlap = std::abs(linalg::vdot(theta_n, psi_n.amplitudes));
  if (overlap <= 1e-10)
    throw NumericalError("postselect_power: vanishing overlap with theta^n");

  // slice the first m factors against theta
  const std::int64_t dim_rest = ipow(d, n - m);
  const std::int64_t dim_front = ipow(d, m);
  CVector sliced(static_cast<std::size_t>(dim_rest), Complex{});
  for (std::int64_t f = 0; f < dim_front; ++f) {
    Complex coeff(1.0, 0.0);
    std::int64_t rem = f;
    for (int p = m - 1; p >= 0; --p) {
      coeff *= std::conj(theta[static_cast<std::size_t>(rem % d)]);
      rem /= d;
    }
    for (std::int64_t j = 0; j < dim_rest; ++j)
      sliced[static_cast<std::size_t>(j)] +=
          coeff * psi_n.amplitudes[static_cast<std::size_t>(f * dim_rest + j)];
  }
  const double snorm = linalg::vnorm(sliced);
  if (snorm <= 1e-12)
    throw NumericalError("postselect_power: post-selected component vanished");
  CVector nm = sliced;
  for (auto& x : nm) x /= snorm;

  // truncation: project the sliced vector onto the almost power span
  const AlmostPowerBasis apb = almost_power_basis(theta, n - m, r);
  CVector trunc(sliced.size(), Complex{});
  for (const auto& b : apb.vectors) {
    const Complex c = linalg::vdot(b, sliced);
    for (std::size_t i = 0; i < trunc.size(); ++i) trunc[i] += c * b[i];
  }
  const double tnorm = linalg::vnorm(trunc);
  if (tnorm <= 1e-12)
    throw NumericalError("postselect_power: truncated component vanished");
  for (auto& x : trunc) x /= tnorm;

  PostselectResult res;
  std::vector<int> dims_rest(static_cast<std::size_t>(n - m), d);
  res.psi_nm = states::make_pure(nm, dims_rest);
  res.psi_nmr = states::make_pure(trunc, dims_rest);

  // operator bound: |nm><nm| <= overlap^-2 tr_{1..m}(|Psi_n><Psi_n|)
  HermOperator full = psi_n.projector();
  HermOperator reduced = [&] {
    if (m == 0) return full;
    if (m == n) {  // everything traced out: scalar remainder
      Matrix one(1);
      one.at(0, 0) = linalg::trace(full.mat());
      return HermOperator(std::move(one), std::vector<int>{});
    }
    std::vector<int> keep;
    for (int k = m; k < n; ++k) keep.push_back(k);
    return linalg::partial_trace(full, keep);
  }();
  const HermOperator slack =
      (1.0 / (overlap * overlap)) * reduced - res.psi_nm.projector();
  res.report.overlap = overlap;
  res.report.op_bound_min_eig = linalg::lambda_min(slack);
  res.report.op_bound_holds = res.report.op_bound_min_eig >= -1e-9;

  const double inner = std::abs(linalg::vdot(nm, trunc));
  res.report.trace_distance = 2.0 * std::sqrt(std::max(0.0, 1.0 - inner * inner));
  res.report.trace_distance_bound =
      2.0 * std::sqrt(2.0) / overlap *
      std::exp(-static_cast<double>(m) * r / (2.0 * n));
  res.report.distance_bound_holds =
      res.report.trace_distance <= res.report.trace_distance_bound + 1e-12;
  return res;
}

HermOperator typical_projector(const DensityMatrix& rho, int n, double delta,
                               int dim_budget) {
  const int d = rho.dim();
  check_capacity(d, n, dim_budget);
  const auto sp = linalg::herm_eig(rho.op);

  double entropy = 0.0;
  for (double p : sp.eigenvalues)
    if (p > linalg::kSupportClip) entropy -= p * std::log2(p);

  const std::int64_t dim = ipow(d, n);
  std::vector<double> f(static_cast<std::size_t>(dim), 0.0);
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rem = idx;
    double nlog = 0.0;
    bool dead = false;
    for (int k = n - 1; k >= 0; --k) {
      const int dg = static_cast<int>(rem % d);
      rem /= d;
      const double p = sp.eigenvalues[static_cast<std::size_t>(dg)];
      if (p <= linalg::kSupportClip) {
        dead = true;
        break;
      }
      nlog -= std::log2(p);
    }
    if (!dead && std::abs(nlog - n * entropy) <= n * delta)
      f[static_cast<std::size_t>(idx)] = 1.0;
  }

  // Pi = (V^(x)n) diag(f) (V^(x)n)^dag
  Matrix w = sp.vectors;
  for (int k = 1; k < n; ++k) w = linalg::kron(w, sp.vectors);
  Matrix diag(static_cast<int>(dim));
  for (std::int64_t i = 0; i < dim; ++i)
    diag.at(static_cast<int>(i), static_cast<int>(i)) = f[static_cast<std::size_t>(i)];
  Matrix pi = linalg::matmul(linalg::matmul(w, diag), linalg::adjoint(w));
  linalg::hermitize(pi);
  std::vector<int> dims(static_cast<std::size_t>(n), d);
  return HermOperator(std::move(pi), dims);
}

double typical_mass(const DensityMatrix& rho, int n, double delta) {
  const auto ev = linalg::herm_eigvals(rho.op);
  const int d = rho.dim();
  double entropy = 0.0;
  for (double p : ev)
    if (p > linalg::kSupportClip) entropy -= p * std::log2(p);
  const std::int64_t dim = ipow(d, n);
  double mass = 0.0;
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rem = idx;
    double nlog = 0.0, weight = 1.0;
    bool dead = false;
    for (int k = 0; k < n; ++k) {
      const int dg = static_cast<int>(rem % d);
      rem /= d;
      const double p = ev[static_cast<std::size_t>(dg)];
      if (p <= linalg::kSupportClip) {
        dead = true;
        break;
      }
      nlog -= std::log2(p);
      weight *= p;
    }
    if (!dead && std::abs(nlog - n * entropy) <= n * delta) mass += weight;
  }
  return mass;
}

}  // namespace steinlab::symmetry
