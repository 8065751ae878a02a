#include "steinlab/convex.hpp"

#include <algorithm>
#include <cmath>

namespace steinlab::convex {

using linalg::Complex;
using linalg::HermOperator;

DykstraResult dykstra(const Matrix& start, const std::vector<Projector>& sets,
                      int max_iter, double tol) {
  DykstraResult res;
  Matrix x = start;
  std::vector<Matrix> incr(sets.size(), Matrix(start.n));
  double plateau_mark = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Matrix prev = x;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const Matrix y = sets[i](x + incr[i]);
      incr[i] = x + incr[i] - y;
      x = y;
    }
    res.iterations = it + 1;
    res.residual = linalg::frobenius_norm(x - prev);
    if (res.residual < tol) {
      res.converged = true;
      break;
    }
    // tangential-face tail: abandon early once progress has flattened so the
    // caller can decide what a near-feasible stall means
    if (it % 300 == 299) {
      if (res.residual > 0.9 * plateau_mark) break;
      plateau_mark = res.residual;
    }
  }
  res.point = std::move(x);
  return res;
}

Matrix project_psd(const Matrix& x) {
  Matrix h = x;
  linalg::hermitize(h);
  const auto sp = h.n <= 32 ? linalg::herm_eig_jacobi(h) : linalg::herm_eig_ql(h);
  const int n = h.n;
  Matrix r(n);
  for (int k = 0; k < n; ++k) {
    const double lam = sp.eigenvalues[static_cast<std::size_t>(k)];
    if (lam <= 0.0) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r.at(i, j) += sp.vectors.at(i, k) * lam * std::conj(sp.vectors.at(j, k));
  }
  linalg::hermitize(r);
  return r;
}

Matrix project_trace_one_hermitian(const Matrix& x) {
  Matrix h = x;
  linalg::hermitize(h);
  const double tr = linalg::trace(h).real();
  const double shift = (1.0 - tr) / h.n;
  for (int i = 0; i < h.n; ++i) h.at(i, i) += shift;
  return h;
}

Matrix project_density(const Matrix& x) {
  Matrix h = x;
  linalg::hermitize(h);
  const auto sp = h.n <= 32 ? linalg::herm_eig_jacobi(h) : linalg::herm_eig_ql(h);
  // eigenvalues onto the probability simplex: theta from the largest k with
  // lam_k - (cum_k - 1)/(k+1) > 0
  const int n = h.n;
  const std::vector<double>& lam = sp.eigenvalues;  // descending
  double cum = 0.0;
  double theta = 0.0;
  for (int k = 0; k < n; ++k) {
    cum += lam[static_cast<std::size_t>(k)];
    const double t = (cum - 1.0) / (k + 1);
    if (lam[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  Matrix r(n);
  for (int k = 0; k < n; ++k) {
    const double p = std::max(lam[static_cast<std::size_t>(k)] - theta, 0.0);
    if (p == 0.0) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r.at(i, j) += sp.vectors.at(i, k) * p * std::conj(sp.vectors.at(j, k));
  }
  linalg::hermitize(r);
  return r;
}

Matrix admm_linear_min(const Matrix& h, const std::vector<Projector>& sets,
                       int max_iter, double tol) {
  const int n = h.n;
  const std::size_t ns = sets.size();
  const double hnorm = std::max(linalg::frobenius_norm(h), 1e-12);
  Matrix hs = (1.0 / hnorm) * h;

  Matrix z(n);
  for (int i = 0; i < n; ++i) z.at(i, i) = 1.0 / n;
  std::vector<Matrix> x(ns, z), u(ns, Matrix(n));
  const double rho = 1.0;

  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < ns; ++i) x[i] = sets[i](z - u[i]);
    Matrix mean(n);
    for (std::size_t i = 0; i < ns; ++i) mean += x[i] + u[i];
    mean = (1.0 / static_cast<double>(ns)) * mean;
    const Matrix znew = mean - (1.0 / (rho * static_cast<double>(ns))) * hs;
    double primal = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
      primal = std::max(primal, linalg::frobenius_norm(x[i] - znew));
    const double dz = linalg::frobenius_norm(znew - z);
    z = znew;
    for (std::size_t i = 0; i < ns; ++i) u[i] = u[i] + x[i] - z;
    if (primal < tol && dz < tol) break;
  }
  return z;
}

namespace {

// Solve the normal equations over the passive set by Cholesky.
std::vector<double> ls_solve(const std::vector<std::vector<double>>& cols,
                             const std::vector<double>& b,
                             const std::vector<int>& passive) {
  const int m = static_cast<int>(passive.size());
  std::vector<double> g(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const auto& ci = cols[static_cast<std::size_t>(passive[static_cast<std::size_t>(i)])];
    for (int j = i; j < m; ++j) {
      const auto& cj = cols[static_cast<std::size_t>(passive[static_cast<std::size_t>(j)])];
      double s = 0.0;
      for (std::size_t k = 0; k < ci.size(); ++k) s += ci[k] * cj[k];
      g[static_cast<std::size_t>(i) * m + j] = s;
      g[static_cast<std::size_t>(j) * m + i] = s;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < ci.size(); ++k) s += ci[k] * b[k];
    rhs[static_cast<std::size_t>(i)] = s;
  }
  // Cholesky with a tiny ridge for numerical safety
  for (int i = 0; i < m; ++i) g[static_cast<std::size_t>(i) * m + i] += 1e-12;
  std::vector<double> l(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g[static_cast<std::size_t>(i) * m + j];
      for (int k = 0; k < j; ++k)
        s -= l[static_cast<std::size_t>(i) * m + k] * l[static_cast<std::size_t>(j) * m + k];
      if (i == j)
        l[static_cast<std::size_t>(i) * m + i] = std::sqrt(std::max(s, 1e-300));
      else
        l[static_cast<std::size_t>(i) * m + j] = s / l[static_cast<std::size_t>(j) * m + j];
    }
  }
  std::vector<double> y(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double s = rhs[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i) * m + k] * y[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * m + i];
  }
  std::vector<double> z(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    double s = y[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < m; ++k) s -= l[static_cast<std::size_t>(k) * m + i] * z[static_cast<std::size_t>(k)];
    z[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * m + i];
  }
  return z;
}

}  // namespace

std::vector<double> nnls(const std::vector<std::vector<double>>& cols,
                         const std::vector<double>& b, int max_iter) {
  const int ncols = static_cast<int>(cols.size());
  std::vector<double> w(static_cast<std::size_t>(ncols), 0.0);
  std::vector<bool> in_passive(static_cast<std::size_t>(ncols), false);
  std::vector<int> passive;

  auto residual = [&] {
    std::vector<double> r = b;
    for (int c = 0; c < ncols; ++c) {
      if (w[static_cast<std::size_t>(c)] == 0.0) continue;
      const auto& col = cols[static_cast<std::size_t>(c)];
      for (std::size_t k = 0; k < r.size(); ++k)
        r[k] -= w[static_cast<std::size_t>(c)] * col[k];
    }
    return r;
  };

  for (int it = 0; it < max_iter; ++it) {
    const auto r = residual();
    int best = -1;
    double best_g = 1e-10;
    for (int c = 0; c < ncols; ++c) {
      if (in_passive[static_cast<std::size_t>(c)]) continue;
      double g = 0.0;
      const auto& col = cols[static_cast<std::size_t>(c)];
      for (std::size_t k = 0; k < r.size(); ++k) g += col[k] * r[k];
      if (g > best_g) {
        best_g = g;
        best = c;
      }
    }
    if (best < 0) break;
    in_passive[static_cast<std::size_t>(best)] = true;
    passive.push_back(best);

    for (int inner = 0; inner < max_iter; ++inner) {
      const auto z = ls_solve(cols, b, passive);
      bool all_pos = true;
      for (double v : z)
        if (v <= 0.0) all_pos = false;
      if (all_pos) {
        for (std::size_t i = 0; i < passive.size(); ++i)
          w[static_cast<std::size_t>(passive[i])] = z[i];
        break;
      }
      double alpha = 1.0;
      for (std::size_t i = 0; i < passive.size(); ++i) {
        if (z[i] <= 0.0) {
          const double wi = w[static_cast<std::size_t>(passive[i])];
          if (wi - z[i] > 0) alpha = std::min(alpha, wi / (wi - z[i]));
        }
      }
      std::vector<int> next;
      for (std::size_t i = 0; i < passive.size(); ++i) {
        const int c = passive[i];
        double nw = w[static_cast<std::size_t>(c)] +
                    alpha * (z[i] - w[static_cast<std::size_t>(c)]);
        if (nw <= 1e-14) {
          nw = 0.0;
          in_passive[static_cast<std::size_t>(c)] = false;
        } else {
          next.push_back(c);
        }
        w[static_cast<std::size_t>(c)] = nw;
      }
      passive = std::move(next);
      if (passive.empty()) break;
    }
  }
  return w;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  int iters) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace steinlab::convex
