#pragma once

#include <string>
#include <utility>
#include <vector>

#include "steinlab/state_sets.hpp"

namespace steinlab::measures {

using states::DensityMatrix;
using state_sets::ConvexStateSet;
using state_sets::SetFamily;

struct MeasureResult {
  double value = 0.0;  // bits
  DensityMatrix certificate;
  double lower = 0.0;  // bracket
  double upper = 0.0;
  int iterations = 0;
  bool upper_bound_only = false;
  std::string notes;
};

// Frank-Wolfe minimization of S(rho || sigma) over sigma in M, driven by the
// set's linear-minimization oracle; the returned bracket is
// [value - stopping gap, value].
MeasureResult rel_ent_to_set(const DensityMatrix& rho, const ConvexStateSet& set,
                             int max_iter = 400, double tol = 1e-4);

// Smallest s with rho <= 2^s sigma for some sigma in M, by bisection over s
// with Dykstra alternating-projection feasibility.
MeasureResult log_robustness(const DensityMatrix& rho, const ConvexStateSet& set,
                             double tol = 1e-5);

struct DrReport {
  double precondition_min_eig = 0.0;  // lambda_min(Y + Delta - rho)
  double tr_delta = 0.0;
  double operator_bound_min_eig = 0.0;  // lambda_min((1-trD)^-1 Y - rho~)
  double fidelity = 0.0;
  double fidelity_floor = 0.0;  // 1 - tr Delta
  double trace_distance = 0.0;
  double trace_distance_ceiling = 0.0;  // 4 sqrt(tr Delta)
  bool operator_bound_holds = false;
  bool fidelity_holds = false;
  bool trace_distance_holds = false;
};

// Constructive smoothing rho~ = T rho T^dag / tr, T = Y^{1/2}(Y+Delta)^{-1/2};
// all three lemma postconditions are evaluated and reported.
std::pair<DensityMatrix, DrReport> dr_smooth(const DensityMatrix& rho,
                                             const linalg::HermOperator& y,
                                             const linalg::HermOperator& delta);

enum class SmoothStrategy { kDrRoute, kMixingRoute, kBest };

// Certified upper bound on the smooth log robustness LR^eps; the exact
// minimum over the trace-norm ball is out of scope, so results carry the
// upper-bound label.
MeasureResult smooth_log_robustness(const DensityMatrix& rho,
                                    const ConvexStateSet& set, double eps,
                                    SmoothStrategy strategy = SmoothStrategy::kBest);

// Frank-Wolfe minimization of tr(X - c omega)_+ over omega in M.
struct PositivePartMin {
  double value = 0.0;
  DensityMatrix omega;
  double gap = 0.0;  // Frank-Wolfe stopping gap
};

PositivePartMin fw_min_positive_part(const linalg::HermOperator& x, double c,
                                     const ConvexStateSet& set,
                                     int max_iter = 150);

struct RegularizedPoint {
  int n = 0;
  double value_per_copy = 0.0;
  double raw_value = 0.0;
};

struct RegularizedCurve {
  std::vector<RegularizedPoint> points;
  // subadditivity diagnostic a_{n+m} <= a_n + a_m on available triples
  std::vector<std::string> subadditivity_notes;
  bool subadditive = true;
};

RegularizedCurve regularized_curve(const DensityMatrix& rho,
                                   const SetFamily& family, int n_max,
                                   int dim_budget = linalg::kDefaultDimBudget);

}  // namespace steinlab::measures
