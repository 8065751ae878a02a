#pragma once

#include <functional>
#include <vector>

#include "steinlab/linalg.hpp"

namespace steinlab::convex {

using linalg::Matrix;

using Projector = std::function<Matrix(const Matrix&)>;

struct DykstraResult {
  Matrix point;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // Frobenius distance between successive cycles
};

// Dykstra's alternating projection onto the intersection of closed convex
// sets. Converges to the projection of `start` when the intersection is
// nonempty; non-convergence is reported, never coerced.
DykstraResult dykstra(const Matrix& start, const std::vector<Projector>& sets,
                      int max_iter = 5000, double tol = 1e-9);

// Elementary projections used to assemble set lists.
Matrix project_psd(const Matrix& x);
Matrix project_trace_one_hermitian(const Matrix& x);

// Exact nearest density matrix in Frobenius norm: eigenvalues projected onto
// the probability simplex.
Matrix project_density(const Matrix& x);

// Consensus ADMM for min tr(H x) over the intersection of the given sets;
// returns the consensus point (caller certifies feasibility).
Matrix admm_linear_min(const Matrix& h, const std::vector<Projector>& sets,
                       int max_iter = 1500, double tol = 1e-7);

// Lawson-Hanson active-set nonnegative least squares:
// min ||A w - b||_2 s.t. w >= 0, with A given column-major as `cols`.
std::vector<double> nnls(const std::vector<std::vector<double>>& cols,
                         const std::vector<double>& b, int max_iter = 400);

// Golden-section minimization of a unimodal function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 60);

}  // namespace steinlab::convex
