#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "steinlab/linalg.hpp"

namespace steinlab::states {

using linalg::CVector;
using linalg::HermOperator;
using linalg::Matrix;

// Density matrix: PSD within tolerance, unit trace within 1e-10. The
// constructor enforces both; check_state gives the non-throwing report.
struct DensityMatrix {
  HermOperator op;

  explicit DensityMatrix(HermOperator o);

  int dim() const { return op.dim(); }
  const Matrix& mat() const { return op.mat(); }
  const std::vector<int>& subsystem_dims() const { return op.subsystem_dims(); }
};

struct StateCheck {
  bool ok = false;
  std::string violation;  // which invariant failed and by how much
  double magnitude = 0.0;
};

StateCheck check_state(const HermOperator& op);
DensityMatrix validate_state(const HermOperator& op);

struct PureState {
  int dim = 0;
  CVector amplitudes;
  std::vector<int> subsystem_dims;

  HermOperator projector() const;
};

PureState make_pure(CVector amplitudes, std::vector<int> subsystem_dims);

// Standard purification (1 (x) sqrt(rho)) |phi+>, subsystem dims {d, d};
// tracing out the first factor recovers rho.
PureState purify(const DensityMatrix& rho);

// Permutation-symmetric purification of a permutation-invariant state on
// H^(x)n together with the overlap |<Psi_n | theta^(x)n>|, which equals
// F(rho_n, rho^(x)n) within 1e-8 (verified; a larger discrepancy throws).
std::pair<PureState, double> purify_symmetric(const DensityMatrix& rho_n,
                                              const DensityMatrix& rho);

// Gaussian-induced random state of the given rank, deterministic per seed.
DensityMatrix random_state(int d, int rank, std::uint64_t seed);

// Representation of a permutation on H^(x)n: P (psi_1 (x) ... (x) psi_n) =
// psi_{pi^-1(1)} (x) ... (x) psi_{pi^-1(n)}. perm[k] = pi(k), 0-based.
Matrix permutation_operator(int n, int d, const std::vector<int>& perm);

// Apply P_pi to a vector on H^(x)n without materializing the matrix.
CVector apply_permutation(const CVector& v, int d, const std::vector<int>& perm);

// Exact symmetrization superoperator average over S_n (n <= 8); above that
// use symmetrize_sampled.
HermOperator symmetrize(const HermOperator& x);
HermOperator symmetrize_sampled(const HermOperator& x, int trials,
                                std::uint64_t seed);

// Max deviation under adjacent transpositions (generators of S_n); zero iff
// permutation invariant.
double permutation_residual(const HermOperator& x);

}  // namespace steinlab::states
