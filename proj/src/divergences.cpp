#include "steinlab/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steinlab::divergences {

using linalg::Complex;
using linalg::HermOperator;
using linalg::Matrix;
using linalg::Spectrum;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mass of rho outside the support of sigma above this is a support violation.
constexpr double kLeakTol = 1e-9;

struct EigPair {
  Spectrum rho;
  Spectrum sigma;
  // w[i][j] = |<u_i|v_j>|^2
  std::vector<std::vector<double>> w;
  double rho_cut = 0.0;
  double sigma_cut = 0.0;
};

EigPair overlap_table(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("divergence: dimension mismatch");
  EigPair e;
  e.rho = linalg::herm_eig(rho.op);
  e.sigma = linalg::herm_eig(sigma.op);
  const int d = rho.dim();
  e.w.assign(static_cast<std::size_t>(d),
             std::vector<double>(static_cast<std::size_t>(d), 0.0));
  const Matrix g = linalg::matmul(linalg::adjoint(e.rho.vectors), e.sigma.vectors);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      e.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::norm(g.at(i, j));
  e.rho_cut = linalg::kSupportClip * std::max(1.0, std::abs(e.rho.eigenvalues.front()));
  e.sigma_cut = linalg::kSupportClip * std::max(1.0, std::abs(e.sigma.eigenvalues.front()));
  return e;
}

// rho-mass escaping supp(sigma)
double support_leak(const EigPair& e) {
  const int d = static_cast<int>(e.rho.eigenvalues.size());
  double leak = 0.0;
  for (int i = 0; i < d; ++i) {
    const double a = e.rho.eigenvalues[static_cast<std::size_t>(i)];
    if (a <= e.rho_cut) continue;
    for (int j = 0; j < d; ++j) {
      if (e.sigma.eigenvalues[static_cast<std::size_t>(j)] <= e.sigma_cut)
        leak += a * e.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return leak;
}

}  // namespace

DivergenceReport relative_entropy(const DensityMatrix& rho,
                                  const DensityMatrix& sigma) {
  const EigPair e = overlap_table(rho, sigma);
  if (support_leak(e) > kLeakTol) return {kInf, false, std::nullopt};
  const int d = rho.dim();
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double a = e.rho.eigenvalues[static_cast<std::size_t>(i)];
    if (a <= e.rho_cut) continue;
    s += a * std::log2(a);
    for (int j = 0; j < d; ++j) {
      const double b = e.sigma.eigenvalues[static_cast<std::size_t>(j)];
      if (b <= e.sigma_cut) continue;
      s -= a * e.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * std::log2(b);
    }
  }
  return {s, true, std::nullopt};
}

DivergenceReport max_relative_entropy(const DensityMatrix& rho,
                                      const DensityMatrix& sigma) {
  const EigPair e = overlap_table(rho, sigma);
  if (support_leak(e) > kLeakTol) return {kInf, false, std::nullopt};
  const HermOperator si = linalg::matrix_pow(sigma.op, -0.5);
  Matrix m = linalg::matmul(linalg::matmul(si.mat(), rho.mat()), si.mat());
  linalg::hermitize(m);
  const double lmax = linalg::lambda_max(HermOperator(std::move(m), rho.subsystem_dims()));
  return {std::log2(std::max(lmax, 1e-300)), true, std::nullopt};
}

double psi(const DensityMatrix& rho, const DensityMatrix& sigma, double s) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("psi: s must lie in [0,1]");
  const EigPair e = overlap_table(rho, sigma);
  if (support_leak(e) > kLeakTol)
    throw NumericalError("psi: supp(rho) not contained in supp(sigma)");
  const int d = rho.dim();
  double t = 0.0;
  for (int i = 0; i < d; ++i) {
    const double a = e.rho.eigenvalues[static_cast<std::size_t>(i)];
    if (a <= e.rho_cut) continue;
    for (int j = 0; j < d; ++j) {
      const double b = e.sigma.eigenvalues[static_cast<std::size_t>(j)];
      if (b <= e.sigma_cut) continue;
      t += std::pow(a, 1.0 + s) * std::pow(b, -s) *
           e.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return std::log2(t);
}

double stein_upper_bound(const DensityMatrix& rho, const DensityMatrix& sigma,
                         int n, double lambda) {
  const EigPair e = overlap_table(rho, sigma);
  if (support_leak(e) > kLeakTol)
    throw NumericalError("stein_upper_bound: support violation");
  const int d = rho.dim();
  // psi(s) from the precomputed overlap table, O(d^2) per grid point
  auto psi_at = [&](double s) {
    double t = 0.0;
    for (int i = 0; i < d; ++i) {
      const double a = e.rho.eigenvalues[static_cast<std::size_t>(i)];
      if (a <= e.rho_cut) continue;
      for (int j = 0; j < d; ++j) {
        const double b = e.sigma.eigenvalues[static_cast<std::size_t>(j)];
        if (b <= e.sigma_cut) continue;
        t += std::pow(a, 1.0 + s) * std::pow(b, -s) *
             e.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    return std::log2(t);
  };
  double best = 1.0;
  for (int k = 0; k <= 1000; ++k) {
    const double s = k * 1e-3;
    const double expo = n * (lambda * s - psi_at(s));
    best = std::min(best, std::exp2(-expo));
  }
  return best;
}

double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("binary_entropy: x in [0,1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

namespace {

void check_distribution(const std::vector<double>& p, const char* name) {
  double s = 0.0;
  for (double v : p) {
    if (v < -1e-12) throw std::invalid_argument(std::string(name) + ": negative mass");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(name) + ": mass sums to " + std::to_string(s));
}

}  // namespace

HanCheck han_inequality_check(const std::vector<double>& p,
                              const std::vector<double>& q,
                              const std::vector<double>& lambda, double mu) {
  if (p.size() != q.size() || p.size() != lambda.size())
    throw std::invalid_argument("han_inequality_check: length mismatch");
  check_distribution(p, "p");
  check_distribution(q, "q");
  for (double l : lambda)
    if (l < 0.0 || l > 1.0)
      throw std::invalid_argument("han_inequality_check: lambda_i in [0,1]");
  const double pow_mu = std::exp2(mu);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    lhs += lambda[i] * (p[i] - pow_mu * q[i]);
    if (p[i] >= pow_mu * q[i]) rhs += p[i];
  }
  return {lhs, rhs, lhs <= rhs + 1e-12};
}

double cramer_exponent(const std::vector<double>& r,
                       const std::vector<double>& x, double a) {
  if (r.size() != x.size())
    throw std::invalid_argument("cramer_exponent: length mismatch");
  check_distribution(r, "r");
  double best = 0.0;  // s = 0 always gives 0
  for (int k = 0; k <= 1000; ++k) {
    const double s = k * 1e-3;
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) m += r[i] * std::exp2(s * x[i]);
    best = std::max(best, a * s - std::log2(m));
  }
  return best;
}

}  // namespace steinlab::divergences
