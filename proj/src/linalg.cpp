#include "steinlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

#include "steinlab/parallel.hpp"

namespace steinlab::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string dims_to_string(const std::vector<int>& dims) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < dims.size(); ++i)
    os << (i ? "," : "") << dims[i];
  os << "]";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix basics

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(const std::vector<double>& d) {
  Matrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n; ++i) m.at(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::outer(const CVector& v) {
  Matrix m(static_cast<int>(v.size()));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      m.at(i, j) = v[static_cast<std::size_t>(i)] *
                   std::conj(v[static_cast<std::size_t>(j)]);
  return m;
}

Matrix operator+(const Matrix& x, const Matrix& y) {
  Matrix r = x;
  r += y;
  return r;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
  Matrix r = x;
  r -= y;
  return r;
}

Matrix operator*(Complex s, const Matrix& x) {
  Matrix r = x;
  for (auto& v : r.a) v *= s;
  return r;
}

Matrix operator*(double s, const Matrix& x) { return Complex(s, 0.0) * x; }

Matrix& operator+=(Matrix& x, const Matrix& y) {
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
  return x;
}

Matrix& operator-=(Matrix& x, const Matrix& y) {
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
  return x;
}

Matrix matmul_serial(const Matrix& x, const Matrix& y) {
  const int n = x.n;
  Matrix r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Complex a = x.at(i, k);
      if (a == Complex{}) continue;
      const Complex* yrow = &y.a[static_cast<std::size_t>(k) * n];
      Complex* rrow = &r.a[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) rrow[j] += a * yrow[j];
    }
  return r;
}

Matrix matmul(const Matrix& x, const Matrix& y) {
  const int n = x.n;
  Matrix r(n);
  parallel_for(0, n, [&](std::int64_t i) {
    Complex* rrow = &r.a[static_cast<std::size_t>(i) * n];
    for (int k = 0; k < n; ++k) {
      const Complex a = x.at(static_cast<int>(i), k);
      if (a == Complex{}) continue;
      const Complex* yrow = &y.a[static_cast<std::size_t>(k) * n];
      for (int j = 0; j < n; ++j) rrow[j] += a * yrow[j];
    }
  });
  return r;
}

Matrix kron_serial(const Matrix& x, const Matrix& y) {
  const int n = x.n * y.n;
  Matrix r(n);
  for (int i1 = 0; i1 < x.n; ++i1)
    for (int j1 = 0; j1 < x.n; ++j1) {
      const Complex a = x.at(i1, j1);
      if (a == Complex{}) continue;
      for (int i2 = 0; i2 < y.n; ++i2)
        for (int j2 = 0; j2 < y.n; ++j2)
          r.at(i1 * y.n + i2, j1 * y.n + j2) = a * y.at(i2, j2);
    }
  return r;
}

Matrix kron(const Matrix& x, const Matrix& y) {
  const int n = x.n * y.n;
  Matrix r(n);
  parallel_for(0, x.n, [&](std::int64_t i1) {
    for (int j1 = 0; j1 < x.n; ++j1) {
      const Complex a = x.at(static_cast<int>(i1), j1);
      if (a == Complex{}) continue;
      for (int i2 = 0; i2 < y.n; ++i2)
        for (int j2 = 0; j2 < y.n; ++j2)
          r.at(static_cast<int>(i1) * y.n + i2, j1 * y.n + j2) =
              a * y.at(i2, j2);
    }
  });
  return r;
}

Matrix adjoint(const Matrix& x) {
  Matrix r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) r.at(i, j) = std::conj(x.at(j, i));
  return r;
}

Complex trace(const Matrix& x) {
  Complex t{};
  for (int i = 0; i < x.n; ++i) t += x.at(i, i);
  return t;
}

double max_abs(const Matrix& x) {
  double m = 0.0;
  for (const auto& v : x.a) m = std::max(m, std::abs(v));
  return m;
}

double frobenius_norm(const Matrix& x) {
  double s = 0.0;
  for (const auto& v : x.a) s += std::norm(v);
  return std::sqrt(s);
}

double max_asymmetry(const Matrix& x) {
  double m = 0.0;
  for (int i = 0; i < x.n; ++i)
    for (int j = i; j < x.n; ++j)
      m = std::max(m, std::abs(x.at(i, j) - std::conj(x.at(j, i))));
  return m;
}

void hermitize(Matrix& x) {
  for (int i = 0; i < x.n; ++i) {
    x.at(i, i) = Complex(x.at(i, i).real(), 0.0);
    for (int j = i + 1; j < x.n; ++j) {
      const Complex v = 0.5 * (x.at(i, j) + std::conj(x.at(j, i)));
      x.at(i, j) = v;
      x.at(j, i) = std::conj(v);
    }
  }
}

CVector mat_vec(const Matrix& x, const CVector& v) {
  CVector r(static_cast<std::size_t>(x.n));
  for (int i = 0; i < x.n; ++i) {
    Complex s{};
    const Complex* row = &x.a[static_cast<std::size_t>(i) * x.n];
    for (int j = 0; j < x.n; ++j) s += row[j] * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

Complex vdot(const CVector& x, const CVector& y) {
  Complex s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double vnorm(const CVector& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

CVector kron_vec(const CVector& x, const CVector& y) {
  CVector r(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) r[i * y.size() + j] = x[i] * y[j];
  return r;
}

// ---------------------------------------------------------------------------
// HermOperator

HermOperator::HermOperator(Matrix m, std::vector<int> subsystem_dims)
    : m_(std::move(m)), dims_(std::move(subsystem_dims)) {
  std::int64_t prod = 1;
  for (int d : dims_) {
    if (d <= 0) throw std::invalid_argument("subsystem dimension must be positive");
    prod *= d;
  }
  if (prod != m_.n)
    throw std::invalid_argument("subsystem dims " + dims_to_string(dims_) +
                                " do not multiply to matrix dim " +
                                std::to_string(m_.n));
  const double tol = 1e-12 * std::max(1.0, max_abs(m_));
  const double asym = max_asymmetry(m_);
  if (asym > tol)
    throw NumericalError("matrix is not Hermitian: max asymmetry " +
                         std::to_string(asym) + " exceeds tolerance " +
                         std::to_string(tol));
  hermitize(m_);
}

HermOperator HermOperator::zero(const std::vector<int>& subsystem_dims) {
  std::int64_t prod = 1;
  for (int d : subsystem_dims) prod *= d;
  return HermOperator(Matrix(static_cast<int>(prod)), subsystem_dims);
}

HermOperator HermOperator::identity(const std::vector<int>& subsystem_dims) {
  std::int64_t prod = 1;
  for (int d : subsystem_dims) prod *= d;
  return HermOperator(Matrix::identity(static_cast<int>(prod)), subsystem_dims);
}

HermOperator HermOperator::diag(const std::vector<double>& d) {
  return HermOperator(Matrix::diag(d), {static_cast<int>(d.size())});
}

HermOperator HermOperator::from_diag(const std::vector<double>& d,
                                     const std::vector<int>& subsystem_dims) {
  return HermOperator(Matrix::diag(d), subsystem_dims);
}

HermOperator HermOperator::with_dims(std::vector<int> dims) const {
  return HermOperator(m_, std::move(dims));
}

HermOperator operator+(const HermOperator& x, const HermOperator& y) {
  return HermOperator(x.mat() + y.mat(), x.subsystem_dims());
}

HermOperator operator-(const HermOperator& x, const HermOperator& y) {
  return HermOperator(x.mat() - y.mat(), x.subsystem_dims());
}

HermOperator operator*(double s, const HermOperator& x) {
  return HermOperator(s * x.mat(), x.subsystem_dims());
}

// ---------------------------------------------------------------------------
// Eigensolvers.
//
// Real symmetric inputs (exact zero imaginary parts, as produced by tensor
// powers of real operators) are routed through a double-precision path with
// a quarter of the flops; both paths run the same templated algorithms.

namespace {

template <typename S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double conjugate(double x) { return x; }
  static double phase(double x) { return x >= 0.0 ? 1.0 : -1.0; }
  static double abs2(double x) { return x * x; }
  static double re(double x) { return x; }
  static double from_real(double x) { return x; }
};

template <>
struct ScalarOps<Complex> {
  static Complex conjugate(Complex x) { return std::conj(x); }
  static Complex phase(Complex x) {
    const double m = std::abs(x);
    return m == 0.0 ? Complex(1.0, 0.0) : x / m;
  }
  static double abs2(Complex x) { return std::norm(x); }
  static double re(Complex x) { return x.real(); }
  static Complex from_real(double x) { return Complex(x, 0.0); }
};

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
// form. On return d holds the diagonal, e the (nonnegative) subdiagonal, and
// q (when non-null) the accumulated unitary with A = Q T Q^dagger.
template <typename S>
void tridiagonalize(int n, std::vector<S>& a, std::vector<double>& d,
                    std::vector<double>& e, std::vector<S>* q) {
  using Ops = ScalarOps<S>;
  d.assign(static_cast<std::size_t>(n), 0.0);
  e.assign(static_cast<std::size_t>(n > 0 ? n - 1 : 0), 0.0);
  if (q) {
    q->assign(static_cast<std::size_t>(n) * n, S{});
    for (int i = 0; i < n; ++i) (*q)[static_cast<std::size_t>(i) * n + i] = Ops::from_real(1.0);
  }
  if (n == 0) return;

  std::vector<S> u(static_cast<std::size_t>(n));
  std::vector<S> p(static_cast<std::size_t>(n));
  std::vector<S> w(static_cast<std::size_t>(n));

  auto at = [&](int i, int j) -> S& {
    return a[static_cast<std::size_t>(i) * n + j];
  };

  for (int k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (int i = k + 2; i < n; ++i) tail += Ops::abs2(at(i, k));
    if (tail == 0.0) continue;  // column already tridiagonal

    const S x0 = at(k + 1, k);
    const double xnorm = std::sqrt(Ops::abs2(x0) + tail);
    const S alpha = S{} - Ops::phase(x0) * Ops::from_real(xnorm);

    u[static_cast<std::size_t>(k + 1)] = x0 - alpha;
    for (int i = k + 2; i < n; ++i) u[static_cast<std::size_t>(i)] = at(i, k);
    const double unorm2 = Ops::abs2(u[static_cast<std::size_t>(k + 1)]) + tail;
    if (unorm2 < 1e-290) continue;
    const double beta = 2.0 / unorm2;

    // p = beta * A_sub * u over rows k+1..n-1
    parallel_for(k + 1, n, [&](std::int64_t i) {
      S s{};
      const S* row = &a[static_cast<std::size_t>(i) * n];
      for (int j = k + 1; j < n; ++j)
        s += row[j] * u[static_cast<std::size_t>(j)];
      p[static_cast<std::size_t>(i)] = Ops::from_real(beta) * s;
    });

    double kscale = 0.0;
    for (int i = k + 1; i < n; ++i)
      kscale += Ops::re(Ops::conjugate(u[static_cast<std::size_t>(i)]) *
                        p[static_cast<std::size_t>(i)]);
    kscale *= 0.5 * beta;
    for (int i = k + 1; i < n; ++i)
      w[static_cast<std::size_t>(i)] =
          p[static_cast<std::size_t>(i)] -
          Ops::from_real(kscale) * u[static_cast<std::size_t>(i)];

    // A_sub <- A_sub - u w^dag - w u^dag
    parallel_for(k + 1, n, [&](std::int64_t i) {
      S* row = &a[static_cast<std::size_t>(i) * n];
      const S ui = u[static_cast<std::size_t>(i)];
      const S wi = w[static_cast<std::size_t>(i)];
      for (int j = k + 1; j < n; ++j) {
        row[j] -= ui * Ops::conjugate(w[static_cast<std::size_t>(j)]) +
                  wi * Ops::conjugate(u[static_cast<std::size_t>(j)]);
      }
    });

    at(k + 1, k) = alpha;
    at(k, k + 1) = Ops::conjugate(alpha);
    for (int i = k + 2; i < n; ++i) {
      at(i, k) = S{};
      at(k, i) = S{};
    }

    if (q) {
      // Q <- Q (I - beta u u^dag)
      parallel_for(0, n, [&](std::int64_t r) {
        S* row = &(*q)[static_cast<std::size_t>(r) * n];
        S s{};
        for (int j = k + 1; j < n; ++j)
          s += row[j] * u[static_cast<std::size_t>(j)];
        s = Ops::from_real(beta) * s;
        for (int j = k + 1; j < n; ++j)
          row[j] -= s * Ops::conjugate(u[static_cast<std::size_t>(j)]);
      });
    }
  }

  // Absorb subdiagonal phases so the tridiagonal matrix is real nonnegative.
  S t = Ops::from_real(1.0);
  for (int k = 0; k < n; ++k) {
    d[static_cast<std::size_t>(k)] = Ops::re(at(k, k));
    if (k + 1 < n) {
      const S sub = at(k + 1, k) * t;
      const double mag = std::sqrt(Ops::abs2(sub));
      e[static_cast<std::size_t>(k)] = mag;
      const S tnext = Ops::phase(sub);
      if (q) {
        for (int r = 0; r < n; ++r)
          (*q)[static_cast<std::size_t>(r) * n + (k + 1)] *= tnext;
      }
      t = tnext;
    }
  }
}

// Implicit-shift QL on a real symmetric tridiagonal matrix; rotations are
// optionally accumulated into zt, which stores the transformation TRANSPOSED
// (row k of zt = k-th accumulated vector) so each rotation streams over two
// contiguous rows.
template <typename S>
void tql2(int n, std::vector<double>& d, std::vector<double>& e,
          std::vector<S>* zt) {
  if (n <= 1) return;
  std::vector<double> ework(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i + 1 < n; ++i) ework[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)];

  auto rotate = [&](int i, double c, double s) {
    if (!zt) return;
    S* zi = &(*zt)[static_cast<std::size_t>(i) * n];
    S* zj = &(*zt)[static_cast<std::size_t>(i + 1) * n];
    for (int r = 0; r < n; ++r) {
      const S a = zi[r];
      const S b = zj[r];
      zj[r] = ScalarOps<S>::from_real(s) * a + ScalarOps<S>::from_real(c) * b;
      zi[r] = ScalarOps<S>::from_real(c) * a - ScalarOps<S>::from_real(s) * b;
    }
  };

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[static_cast<std::size_t>(m)]) +
                          std::abs(d[static_cast<std::size_t>(m + 1)]);
        if (std::abs(ework[static_cast<std::size_t>(m)]) <= kEps * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw NumericalError("tridiagonal QL failed to converge");
        double g = (d[static_cast<std::size_t>(l + 1)] - d[static_cast<std::size_t>(l)]) /
                   (2.0 * ework[static_cast<std::size_t>(l)]);
        double r = std::hypot(g, 1.0);
        g = d[static_cast<std::size_t>(m)] - d[static_cast<std::size_t>(l)] +
            ework[static_cast<std::size_t>(l)] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * ework[static_cast<std::size_t>(i)];
          const double b = c * ework[static_cast<std::size_t>(i)];
          r = std::hypot(f, g);
          ework[static_cast<std::size_t>(i + 1)] = r;
          if (r == 0.0) {
            d[static_cast<std::size_t>(i + 1)] -= p;
            ework[static_cast<std::size_t>(m)] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[static_cast<std::size_t>(i + 1)] - p;
          r = (d[static_cast<std::size_t>(i)] - g) * s + 2.0 * c * b;
          p = s * r;
          d[static_cast<std::size_t>(i + 1)] = g + p;
          g = c * r - b;
          rotate(i, c, s);
        }
        if (underflow) continue;
        d[static_cast<std::size_t>(l)] -= p;
        ework[static_cast<std::size_t>(l)] = g;
        ework[static_cast<std::size_t>(m)] = 0.0;
      }
    } while (m != l);
  }
}

// Cyclic Jacobi for Hermitian matrices; the serial reference used at small
// dimensions.
template <typename S>
void jacobi_eig(int n, std::vector<S>& a, std::vector<double>& d,
                std::vector<S>* v) {
  using Ops = ScalarOps<S>;
  if (v) {
    v->assign(static_cast<std::size_t>(n) * n, S{});
    for (int i = 0; i < n; ++i) (*v)[static_cast<std::size_t>(i) * n + i] = Ops::from_real(1.0);
  }
  auto at = [&](int i, int j) -> S& {
    return a[static_cast<std::size_t>(i) * n + j];
  };

  double scale = 0.0;
  for (const auto& x : a) scale = std::max(scale, std::sqrt(Ops::abs2(x)));
  if (scale == 0.0) scale = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += Ops::abs2(at(i, j));
    if (off <= (1e-26 * scale * scale)) break;

    for (int pi = 0; pi < n; ++pi) {
      for (int qi = pi + 1; qi < n; ++qi) {
        const S apq = at(pi, qi);
        const double mag = std::sqrt(Ops::abs2(apq));
        if (mag <= 1e-300) continue;
        const double app = Ops::re(at(pi, pi));
        const double aqq = Ops::re(at(qi, qi));
        const double tau = (aqq - app) / (2.0 * mag);
        const double tt = (tau >= 0.0 ? 1.0 : -1.0) /
                          (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + tt * tt);
        const double smag = tt * c;
        const S ph = Ops::phase(apq);
        const S s = Ops::from_real(smag) * ph;
        const S sc = Ops::conjugate(s);

        // column update: col_p' = c col_p - conj(s) col_q ; col_q' = s col_p + c col_q
        for (int r = 0; r < n; ++r) {
          const S arp = at(r, pi);
          const S arq = at(r, qi);
          at(r, pi) = Ops::from_real(c) * arp - sc * arq;
          at(r, qi) = s * arp + Ops::from_real(c) * arq;
        }
        // row update: row_p' = c row_p - s row_q ; row_q' = conj(s) row_p + c row_q
        for (int col = 0; col < n; ++col) {
          const S apr = at(pi, col);
          const S aqr = at(qi, col);
          at(pi, col) = Ops::from_real(c) * apr - s * aqr;
          at(qi, col) = sc * apr + Ops::from_real(c) * aqr;
        }
        if (v) {
          for (int r = 0; r < n; ++r) {
            const S vrp = (*v)[static_cast<std::size_t>(r) * n + pi];
            const S vrq = (*v)[static_cast<std::size_t>(r) * n + qi];
            (*v)[static_cast<std::size_t>(r) * n + pi] = Ops::from_real(c) * vrp - sc * vrq;
            (*v)[static_cast<std::size_t>(r) * n + qi] = s * vrp + Ops::from_real(c) * vrq;
          }
        }
      }
    }
  }
  d.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = Ops::re(at(i, i));
}

// Shared post-processing: sort descending and fix column phases so the
// largest-modulus entry of each eigenvector is real positive.
template <typename S>
void sort_and_normalize(int n, std::vector<double>& d, std::vector<S>* v) {
  using Ops = ScalarOps<S>;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return d[static_cast<std::size_t>(i)] > d[static_cast<std::size_t>(j)];
  });
  std::vector<double> ds(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ds[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  d = std::move(ds);
  if (!v) return;
  std::vector<S> vs(static_cast<std::size_t>(n) * n);
  for (int c = 0; c < n; ++c) {
    const int src = order[static_cast<std::size_t>(c)];
    // phase convention
    double best = -1.0;
    int bi = 0;
    for (int r = 0; r < n; ++r) {
      const double m = Ops::abs2((*v)[static_cast<std::size_t>(r) * n + src]);
      if (m > best * (1.0 + 1e-12)) {
        best = m;
        bi = r;
      }
    }
    S ph = Ops::phase((*v)[static_cast<std::size_t>(bi) * n + src]);
    ph = Ops::conjugate(ph);
    for (int r = 0; r < n; ++r)
      vs[static_cast<std::size_t>(r) * n + c] =
          ph * (*v)[static_cast<std::size_t>(r) * n + src];
  }
  *v = std::move(vs);
}

bool all_real(const Matrix& m) {
  for (const auto& v : m.a)
    if (v.imag() != 0.0) return false;
  return true;
}

template <typename S>
void transpose_square(int n, const std::vector<S>& in, std::vector<S>& out) {
  out.resize(in.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j) * n + i] = in[static_cast<std::size_t>(i) * n + j];
}

template <typename S>
void eig_dispatch(int n, std::vector<S> a, std::vector<double>& evals,
                  std::vector<S>* evecs, bool use_jacobi) {
  if (use_jacobi) {
    jacobi_eig<S>(n, a, evals, evecs);
  } else {
    std::vector<double> d, e;
    tridiagonalize<S>(n, a, d, e, evecs);
    if (evecs) {
      std::vector<S> qt;
      transpose_square<S>(n, *evecs, qt);
      tql2<S>(n, d, e, &qt);
      transpose_square<S>(n, qt, *evecs);
    } else {
      tql2<S>(n, d, e, nullptr);
    }
    evals = std::move(d);
  }
  sort_and_normalize<S>(n, evals, evecs);
}

Spectrum eig_matrix(const Matrix& m, bool with_vectors, bool use_jacobi) {
  const int n = m.n;
  Spectrum sp;
  if (all_real(m)) {
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = m.a[i].real();
    std::vector<double> v;
    eig_dispatch<double>(n, std::move(a), sp.eigenvalues,
                         with_vectors ? &v : nullptr, use_jacobi);
    if (with_vectors) {
      sp.vectors = Matrix(n);
      for (std::size_t i = 0; i < v.size(); ++i) sp.vectors.a[i] = v[i];
    }
  } else {
    std::vector<Complex> a = m.a;
    std::vector<Complex> v;
    eig_dispatch<Complex>(n, std::move(a), sp.eigenvalues,
                          with_vectors ? &v : nullptr, use_jacobi);
    if (with_vectors) {
      sp.vectors = Matrix(n);
      sp.vectors.a = std::move(v);
    }
  }
  return sp;
}

}  // namespace

Spectrum herm_eig_ql(const Matrix& m) { return eig_matrix(m, true, false); }

Spectrum herm_eig_jacobi(const Matrix& m) { return eig_matrix(m, true, true); }

std::vector<double> herm_eigvals_ql(const Matrix& m) {
  return eig_matrix(m, false, false).eigenvalues;
}

Spectrum herm_eig(const HermOperator& op) {
  return eig_matrix(op.mat(), true, op.dim() <= 32);
}

std::vector<double> herm_eigvals(const HermOperator& op) {
  return eig_matrix(op.mat(), false, op.dim() <= 32).eigenvalues;
}

double lambda_max(const HermOperator& op) {
  const auto ev = herm_eigvals(op);
  return ev.empty() ? 0.0 : ev.front();
}

double lambda_min(const HermOperator& op) {
  const auto ev = herm_eigvals(op);
  return ev.empty() ? 0.0 : ev.back();
}

// ---------------------------------------------------------------------------
// Matrix functionals

namespace {

Matrix rebuild(const Spectrum& sp, const std::vector<double>& f) {
  const int n = sp.vectors.n;
  std::vector<int> active;
  for (int k = 0; k < n; ++k)
    if (f[static_cast<std::size_t>(k)] != 0.0) active.push_back(k);
  Matrix r(n);
  // r = V diag(f) V^dag over the nonzero eigenvalues only
  parallel_for(0, n, [&](std::int64_t i) {
    for (int j = 0; j < n; ++j) {
      Complex s{};
      for (int k : active)
        s += sp.vectors.at(static_cast<int>(i), k) * f[static_cast<std::size_t>(k)] *
             std::conj(sp.vectors.at(j, k));
      r.at(static_cast<int>(i), j) = s;
    }
  });
  hermitize(r);
  return r;
}

double support_cut(const std::vector<double>& ev) {
  double amax = 0.0;
  for (double v : ev) amax = std::max(amax, std::abs(v));
  return kSupportClip * std::max(1.0, amax);
}

void require_near_psd(const std::vector<double>& ev, const char* what) {
  if (ev.empty()) return;
  const double lmin = ev.back();
  const double lmax = ev.front();
  if (lmin < -kPsdTol * std::max(1.0, std::abs(lmax)))
    throw NumericalError(std::string(what) +
                         ": negative eigenvalue " + std::to_string(lmin));
}

}  // namespace

HermOperator matrix_log2(const HermOperator& op) {
  const Spectrum sp = herm_eig(op);
  require_near_psd(sp.eigenvalues, "matrix_log2");
  const double cut = support_cut(sp.eigenvalues);
  std::vector<double> f(sp.eigenvalues.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = sp.eigenvalues[i];
    f[i] = v <= cut ? 0.0 : std::log2(v);
  }
  return HermOperator(rebuild(sp, f), op.subsystem_dims());
}

HermOperator matrix_sqrt(const HermOperator& op) {
  const Spectrum sp = herm_eig(op);
  require_near_psd(sp.eigenvalues, "matrix_sqrt");
  std::vector<double> f(sp.eigenvalues.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = sp.eigenvalues[i] > 0.0 ? std::sqrt(sp.eigenvalues[i]) : 0.0;
  return HermOperator(rebuild(sp, f), op.subsystem_dims());
}

HermOperator matrix_pow(const HermOperator& op, double s) {
  const Spectrum sp = herm_eig(op);
  require_near_psd(sp.eigenvalues, "matrix_pow");
  const double cut = support_cut(sp.eigenvalues);
  std::vector<double> f(sp.eigenvalues.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = sp.eigenvalues[i];
    if (v <= cut)
      f[i] = 0.0;  // generalized inverse convention for s < 0
    else
      f[i] = std::pow(v, s);
  }
  return HermOperator(rebuild(sp, f), op.subsystem_dims());
}

HermOperator matrix_pinv(const HermOperator& op) { return matrix_pow(op, -1.0); }

HermOperator support_projector(const HermOperator& op) {
  const Spectrum sp = herm_eig(op);
  const double cut = support_cut(sp.eigenvalues);
  std::vector<double> f(sp.eigenvalues.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::abs(sp.eigenvalues[i]) > cut ? 1.0 : 0.0;
  return HermOperator(rebuild(sp, f), op.subsystem_dims());
}

double positive_part_trace(const HermOperator& op) {
  double s = 0.0;
  for (double v : herm_eigvals(op))
    if (v > 0.0) s += v;
  return s;
}

double trace_norm(const HermOperator& op) {
  double s = 0.0;
  for (double v : herm_eigvals(op)) s += std::abs(v);
  return s;
}

HermOperator positive_part_projector(const HermOperator& op) {
  const Spectrum sp = herm_eig(op);
  std::vector<double> f(sp.eigenvalues.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = sp.eigenvalues[i] > 0.0 ? 1.0 : 0.0;
  return HermOperator(rebuild(sp, f), op.subsystem_dims());
}

double fidelity(const HermOperator& x, const HermOperator& y) {
  if (x.dim() != y.dim())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const HermOperator sx = matrix_sqrt(x);
  Matrix m = matmul(matmul(sx.mat(), y.mat()), sx.mat());
  hermitize(m);
  const HermOperator inner(std::move(m), x.subsystem_dims());
  // inner is PSD up to roundoff; verify and clip.
  const auto ev = herm_eigvals(inner);
  require_near_psd(ev, "fidelity");
  double f = 0.0;
  for (double v : ev)
    if (v > 0.0) f += std::sqrt(v);
  return f;
}

bool is_psd(const HermOperator& op, double tol) {
  const auto ev = herm_eigvals(op);
  if (ev.empty()) return true;
  return ev.back() >= -tol * std::max(1.0, std::abs(ev.front()));
}

// ---------------------------------------------------------------------------
// Tensor structure

std::vector<std::int64_t> subsystem_strides(const std::vector<int>& dims) {
  std::vector<std::int64_t> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[static_cast<std::size_t>(i)] =
        s[static_cast<std::size_t>(i + 1)] * dims[static_cast<std::size_t>(i + 1)];
  return s;
}

namespace {

void check_subset(const std::vector<int>& subset, std::size_t nsys,
                  const char* what) {
  if (subset.empty()) throw std::invalid_argument(std::string(what) + ": empty index set");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= static_cast<int>(nsys))
      throw std::invalid_argument(std::string(what) + ": subsystem index out of range");
    if (i > 0 && subset[i] <= subset[i - 1])
      throw std::invalid_argument(std::string(what) + ": indices must be strictly increasing");
  }
}

}  // namespace

HermOperator partial_trace(const HermOperator& op, const std::vector<int>& keep) {
  const auto& dims = op.subsystem_dims();
  check_subset(keep, dims.size(), "partial_trace");
  const auto strides = subsystem_strides(dims);

  std::vector<int> traced;
  for (int s = 0; s < static_cast<int>(dims.size()); ++s)
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) traced.push_back(s);

  std::vector<int> kdims, tdims;
  for (int s : keep) kdims.push_back(dims[static_cast<std::size_t>(s)]);
  for (int s : traced) tdims.push_back(dims[static_cast<std::size_t>(s)]);

  std::int64_t dk = 1, dt = 1;
  for (int d : kdims) dk *= d;
  for (int d : tdims) dt *= d;

  // offsets of each keep/traced multi-index in the full index space
  auto offsets = [&](const std::vector<int>& sys, const std::vector<int>& sdims,
                     std::int64_t count) {
    std::vector<std::int64_t> off(static_cast<std::size_t>(count), 0);
    for (std::int64_t x = 0; x < count; ++x) {
      std::int64_t rem = x, o = 0;
      for (int i = static_cast<int>(sys.size()) - 1; i >= 0; --i) {
        const std::int64_t digit = rem % sdims[static_cast<std::size_t>(i)];
        rem /= sdims[static_cast<std::size_t>(i)];
        o += digit * strides[static_cast<std::size_t>(sys[static_cast<std::size_t>(i)])];
      }
      off[static_cast<std::size_t>(x)] = o;
    }
    return off;
  };
  const auto koff = offsets(keep, kdims, dk);
  const auto toff = offsets(traced, tdims, dt);

  Matrix r(static_cast<int>(dk));
  const int n = op.dim();
  parallel_for(0, dk, [&](std::int64_t i) {
    for (std::int64_t j = 0; j < dk; ++j) {
      Complex s{};
      for (std::int64_t t = 0; t < dt; ++t) {
        const std::int64_t row = koff[static_cast<std::size_t>(i)] + toff[static_cast<std::size_t>(t)];
        const std::int64_t col = koff[static_cast<std::size_t>(j)] + toff[static_cast<std::size_t>(t)];
        s += op.mat().a[static_cast<std::size_t>(row) * n + col];
      }
      r.at(static_cast<int>(i), static_cast<int>(j)) = s;
    }
  });
  return HermOperator(std::move(r), kdims);
}

HermOperator partial_transpose(const HermOperator& op,
                               const std::vector<int>& subset) {
  const auto& dims = op.subsystem_dims();
  check_subset(subset, dims.size(), "partial_transpose");
  const auto strides = subsystem_strides(dims);
  const int n = op.dim();

  Matrix r(n);
  parallel_for(0, n, [&](std::int64_t i) {
    for (std::int64_t j = 0; j < n; ++j) {
      std::int64_t ii = i, jj = j;
      for (int s : subset) {
        const std::int64_t st = strides[static_cast<std::size_t>(s)];
        const int d = dims[static_cast<std::size_t>(s)];
        const std::int64_t di = (i / st) % d;
        const std::int64_t dj = (j / st) % d;
        ii += (dj - di) * st;
        jj += (di - dj) * st;
      }
      r.a[static_cast<std::size_t>(ii) * n + jj] =
          op.mat().a[static_cast<std::size_t>(i) * n + j];
    }
  });
  return HermOperator(std::move(r), dims);
}

HermOperator permute_subsystems(const HermOperator& op,
                                const std::vector<int>& perm) {
  const auto& dims = op.subsystem_dims();
  const int ns = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != ns)
    throw std::invalid_argument("permute_subsystems: permutation length mismatch");
  std::vector<int> seen(static_cast<std::size_t>(ns), 0);
  for (int p : perm) {
    if (p < 0 || p >= ns || seen[static_cast<std::size_t>(p)]++)
      throw std::invalid_argument("permute_subsystems: malformed permutation");
  }
  std::vector<int> new_dims(static_cast<std::size_t>(ns));
  for (int s = 0; s < ns; ++s)
    new_dims[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])] =
        dims[static_cast<std::size_t>(s)];

  const auto old_strides = subsystem_strides(dims);
  const auto new_strides = subsystem_strides(new_dims);
  const std::int64_t n = op.dim();
  std::vector<std::int64_t> map(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t out = 0;
    for (int s = 0; s < ns; ++s) {
      const std::int64_t digit =
          (i / old_strides[static_cast<std::size_t>(s)]) % dims[static_cast<std::size_t>(s)];
      out += digit * new_strides[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
    }
    map[static_cast<std::size_t>(i)] = out;
  }
  Matrix r(static_cast<int>(n));
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      r.a[static_cast<std::size_t>(map[static_cast<std::size_t>(i)]) * n +
          map[static_cast<std::size_t>(j)]] =
          op.mat().a[static_cast<std::size_t>(i) * n + j];
  return HermOperator(std::move(r), new_dims);
}

HermOperator kron_op(const HermOperator& x, const HermOperator& y) {
  std::vector<int> dims = x.subsystem_dims();
  dims.insert(dims.end(), y.subsystem_dims().begin(), y.subsystem_dims().end());
  return HermOperator(kron(x.mat(), y.mat()), dims);
}

HermOperator kron_power(const HermOperator& op, int n, int dim_budget) {
  if (n < 1) throw std::invalid_argument("kron_power: n must be positive");
  double dm = 1.0;
  for (int i = 0; i < n; ++i) {
    dm *= op.dim();
    if (dm > static_cast<double>(dim_budget))
      throw CapacityError("kron_power: dim " + std::to_string(op.dim()) + "^" +
                          std::to_string(n) + " exceeds budget " +
                          std::to_string(dim_budget));
  }
  HermOperator r = op;
  for (int i = 1; i < n; ++i) r = kron_op(r, op);
  return r;
}

}  // namespace steinlab::linalg
