#pragma once

#include <vector>

#include "steinlab/states.hpp"

namespace steinlab::symmetry {

using linalg::CVector;
using linalg::HermOperator;
using states::DensityMatrix;
using states::PureState;

// Orthonormal occupation-number basis of Sym(H^(x)n).
struct SymBasis {
  int d = 0;
  int n = 0;
  std::vector<CVector> vectors;
  std::vector<std::vector<int>> occupations;
};

SymBasis sym_basis(int d, int n);

// Normalized projection of psi onto the symmetric subspace (group average);
// rejects inputs orthogonal to it.
PureState sym_vector(const PureState& psi);

// Orthonormal basis of the subspace of H orthogonal to theta, built from the
// Householder reflection taking theta to the first coordinate axis.
std::vector<CVector> orth_complement_basis(const CVector& theta);

// Orthonormal basis of the almost power states |theta>^[x,n,r]: layer k holds
// Sym(eta_k (x) theta^(x)(n-k)) with eta_k running over a symmetric basis of
// the theta-complement.
struct AlmostPowerBasis {
  CVector theta;
  int d = 0;
  int n = 0;
  int r = 0;
  std::vector<CVector> vectors;
  std::vector<int> layer;  // k index per vector
};

AlmostPowerBasis almost_power_basis(const CVector& theta, int n, int r);

// Build sum_k beta[k] * (layer-k basis vector picked by eta_index[k]) without
// normalizing; the raw material of the trace-bound lemma checks.
CVector almost_power_combination(const AlmostPowerBasis& basis,
                                 const std::vector<double>& beta);

struct PostselectReport {
  double overlap = 0.0;             // |<Psi_n | theta^(x)n>|
  double op_bound_min_eig = 0.0;    // lambda_min of the operator-bound slack
  double trace_distance = 0.0;      // || |nm><nm| - |nmr><nmr| ||_1
  double trace_distance_bound = 0.0;
  bool op_bound_holds = false;
  bool distance_bound_holds = false;
};

struct PostselectResult {
  PureState psi_nm;   // (<theta|^(x)m (x) 1) Psi_n, normalized
  PureState psi_nmr;  // truncation of the k-expansion to k <= r, normalized
  PostselectReport report;
};

PostselectResult postselect_power(const PureState& psi_n, const CVector& theta,
                                  int m, int r);

// Projector onto eigen-sequences with |-log2 p - n S(rho)| <= n delta.
HermOperator typical_projector(const DensityMatrix& rho, int n, double delta,
                               int dim_budget = linalg::kDefaultDimBudget);

// tr(rho^(x)n Pi) computed classically from the spectrum.
double typical_mass(const DensityMatrix& rho, int n, double delta);

}  // namespace steinlab::symmetry
