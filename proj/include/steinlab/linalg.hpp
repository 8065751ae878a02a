#pragma once

#include <complex>
#include <vector>

#include "steinlab/errors.hpp"

namespace steinlab::linalg {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Support threshold shared by every support-sensitive operation (log, pinv,
// relative entropies): eigenvalues below kSupportClip * max(1, lambda_max|A|)
// are treated as exactly zero.
inline constexpr double kSupportClip = 1e-12;

// PSD acceptance: lambda_min >= -kPsdTol * max(1, lambda_max).
inline constexpr double kPsdTol = 1e-9;

// Default cap on dense operator dimension (kron_power and friends).
inline constexpr int kDefaultDimBudget = 4096;

// ---------------------------------------------------------------------------
// Dense square complex matrix, row-major.

struct Matrix {
  int n = 0;
  std::vector<Complex> a;

  Matrix() = default;
  explicit Matrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim) {}

  Complex& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const Complex& at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }

  static Matrix identity(int dim);
  static Matrix diag(const std::vector<double>& d);
  static Matrix outer(const CVector& v);  // |v><v|
};

Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);
Matrix operator*(Complex s, const Matrix& x);
Matrix operator*(double s, const Matrix& x);
Matrix& operator+=(Matrix& x, const Matrix& y);
Matrix& operator-=(Matrix& x, const Matrix& y);

// Parallel kernels and their serial reference counterparts (kept for tests
// and the benchmark target).
Matrix matmul(const Matrix& x, const Matrix& y);
Matrix matmul_serial(const Matrix& x, const Matrix& y);
Matrix kron(const Matrix& x, const Matrix& y);
Matrix kron_serial(const Matrix& x, const Matrix& y);

Matrix adjoint(const Matrix& x);
Complex trace(const Matrix& x);
double max_abs(const Matrix& x);
double frobenius_norm(const Matrix& x);
double max_asymmetry(const Matrix& x);  // max |a_ij - conj(a_ji)|
void hermitize(Matrix& x);              // x <- (x + x^dagger)/2

CVector mat_vec(const Matrix& x, const CVector& v);
Complex vdot(const CVector& x, const CVector& y);  // conjugate-linear in x
double vnorm(const CVector& x);
CVector kron_vec(const CVector& x, const CVector& y);

// ---------------------------------------------------------------------------
// HermOperator: Hermitian matrix plus subsystem-dimension metadata. The
// constructor rejects inputs whose asymmetry exceeds 1e-12 (relative to the
// largest entry) and exactly hermitizes accepted ones.

class HermOperator {
 public:
  HermOperator() = default;
  HermOperator(Matrix m, std::vector<int> subsystem_dims);

  static HermOperator zero(const std::vector<int>& subsystem_dims);
  static HermOperator identity(const std::vector<int>& subsystem_dims);
  static HermOperator diag(const std::vector<double>& d);
  static HermOperator from_diag(const std::vector<double>& d,
                                const std::vector<int>& subsystem_dims);

  int dim() const { return m_.n; }
  const std::vector<int>& subsystem_dims() const { return dims_; }
  const Matrix& mat() const { return m_; }
  Matrix& mat() { return m_; }

  Complex at(int i, int j) const { return m_.at(i, j); }

  HermOperator with_dims(std::vector<int> dims) const;

 private:
  Matrix m_;
  std::vector<int> dims_;
};

HermOperator operator+(const HermOperator& x, const HermOperator& y);
HermOperator operator-(const HermOperator& x, const HermOperator& y);
HermOperator operator*(double s, const HermOperator& x);

// ---------------------------------------------------------------------------
// Spectral decomposition. Eigenvalues sorted descending; vectors are the
// matching orthonormal columns with a fixed phase convention (largest entry
// real positive), so identical input bytes give identical output bytes.

struct Spectrum {
  std::vector<double> eigenvalues;
  Matrix vectors;
};

Spectrum herm_eig(const HermOperator& op);
std::vector<double> herm_eigvals(const HermOperator& op);  // no vectors

// Direct entry points, exposed for cross-validation and the benchmark:
// Householder tridiagonalization + implicit QL (used for n > 32) and the
// cyclic Jacobi reference (used for n <= 32).
Spectrum herm_eig_ql(const Matrix& m);
Spectrum herm_eig_jacobi(const Matrix& m);
std::vector<double> herm_eigvals_ql(const Matrix& m);

double lambda_max(const HermOperator& op);
double lambda_min(const HermOperator& op);

// ---------------------------------------------------------------------------
// Matrix functionals (eigenvalue-wise in the eigenbasis, shared support
// convention via kSupportClip).

HermOperator matrix_log2(const HermOperator& op);
HermOperator matrix_sqrt(const HermOperator& op);
HermOperator matrix_pow(const HermOperator& op, double s);
HermOperator matrix_pinv(const HermOperator& op);
HermOperator support_projector(const HermOperator& op);

double positive_part_trace(const HermOperator& op);
double trace_norm(const HermOperator& op);
// Projector onto the strictly positive part; boundary width 0 by default.
HermOperator positive_part_projector(const HermOperator& op);

// Fidelity tr sqrt(A^{1/2} B A^{1/2}); both arguments PSD up to kPsdTol.
double fidelity(const HermOperator& x, const HermOperator& y);

bool is_psd(const HermOperator& op, double tol = kPsdTol);

// ---------------------------------------------------------------------------
// Tensor structure.

HermOperator partial_trace(const HermOperator& op, const std::vector<int>& keep);
HermOperator partial_transpose(const HermOperator& op,
                               const std::vector<int>& subset);
HermOperator kron_op(const HermOperator& x, const HermOperator& y);
HermOperator kron_power(const HermOperator& op, int n,
                        int dim_budget = kDefaultDimBudget);

// Offsets of every multi-index over the given subsystem dims, in row-major
// enumeration order; strides[s] = product of dims after s.
std::vector<std::int64_t> subsystem_strides(const std::vector<int>& dims);

// Conjugate by the subsystem reordering that places old slot s at new
// position perm[s]; dims may be non-uniform as long as the reordering is
// shape-consistent.
HermOperator permute_subsystems(const HermOperator& op,
                                const std::vector<int>& perm);

}  // namespace steinlab::linalg
