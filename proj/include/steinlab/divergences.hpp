#pragma once

#include <optional>
#include <vector>

#include "steinlab/states.hpp"

namespace steinlab::divergences {

using states::DensityMatrix;

// All values are in bits (log base 2), matching the 2^{yn} threshold
// convention used throughout.

struct DivergenceReport {
  double value = 0.0;      // +infinity when the support condition fails
  bool support_ok = true;  // supp(rho) inside supp(sigma)
  std::optional<double> gap_to_bound;
};

// Quantum relative entropy tr(rho (log2 rho - log2 sigma)).
DivergenceReport relative_entropy(const DensityMatrix& rho,
                                  const DensityMatrix& sigma);

// Max relative entropy inf{s : rho <= 2^s sigma} via
// log2 lambda_max(sigma^{-1/2} rho sigma^{-1/2}) with generalized inverses.
DivergenceReport max_relative_entropy(const DensityMatrix& rho,
                                      const DensityMatrix& sigma);

// psi(s) = log2 tr(rho^{1+s} sigma^{-s}), s in [0,1]; requires
// supp(rho) inside supp(sigma).
double psi(const DensityMatrix& rho, const DensityMatrix& sigma, double s);

// min over an s-grid of 2^{-n (lambda s - psi(s))}, clamped to <= 1. Bounds
// tr(rho^(x)n - 2^{lambda n} sigma^(x)n)_+ from above.
double stein_upper_bound(const DensityMatrix& rho, const DensityMatrix& sigma,
                         int n, double lambda);

double binary_entropy(double x);

struct HanCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// sum_i lambda_i (p_i - 2^mu q_i) <= Pr_p(log2 p/q >= mu)
HanCheck han_inequality_check(const std::vector<double>& p,
                              const std::vector<double>& q,
                              const std::vector<double>& lambda, double mu);

// Grid-maximized Chernoff/Cramer exponent
// sup_{0<=s<=1} (a s - log2 sum_i r_i 2^{s X_i}); Pr_r(X >= a) <= 2^{-result}.
double cramer_exponent(const std::vector<double>& r,
                       const std::vector<double>& x, double a);

}  // namespace steinlab::divergences
