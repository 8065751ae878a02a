#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "steinlab/convex.hpp"
#include "steinlab/states.hpp"

namespace steinlab::state_sets {

using linalg::HermOperator;
using linalg::Matrix;
using states::DensityMatrix;

enum class Membership { kMember, kNotMember, kIndeterminate };

struct MembershipReport {
  Membership verdict = Membership::kIndeterminate;
  double distance = 0.0;  // distance evidence backing the verdict
  std::string detail;
};

// Serializable description of a set instance.
struct SetDescriptor {
  std::string label;
  std::string kind;  // "ppt" | "sep_inner" | "singleton"
  std::vector<int> subsystem_dims;
  std::vector<Matrix> anchors;  // sep_inner only
};

// Oracle bundle for one convex set of states: membership, Frobenius-nearest
// projection, and linear minimization tr(H sigma).
class ConvexStateSet {
 public:
  virtual ~ConvexStateSet() = default;

  virtual int dim() const = 0;
  virtual const std::vector<int>& subsystem_dims() const = 0;
  virtual const std::string& label() const = 0;

  virtual MembershipReport membership(const HermOperator& sigma,
                                      double tol) const = 0;
  virtual DensityMatrix project(const HermOperator& x) const = 0;
  virtual DensityMatrix linear_min(const HermOperator& h) const = 0;

  virtual SetDescriptor descriptor() const = 0;

  // Elementary projections whose intersection is the set; lets feasibility
  // searches run one flat Dykstra instead of nesting projections. Defaults to
  // the composite projection.
  virtual std::vector<convex::Projector> projector_list() const;
};

using SetPtr = std::shared_ptr<const ConvexStateSet>;

// States whose listed partial transposes are all PSD. Default cuts: every
// single subsystem.
SetPtr ppt_set(const std::vector<int>& subsystem_dims,
               std::vector<std::vector<int>> cuts = {});

// Inner approximation of the separable states: the convex hull of sampled
// and seesaw-optimized pure product states, with column generation deciding
// hull feasibility.
SetPtr sep_inner_set(const std::vector<int>& subsystem_dims,
                     int n_anchor_products, std::uint64_t seed);

// The singleton {sigma}.
SetPtr singleton_set(const DensityMatrix& sigma, std::string label = "singleton");

// Seesaw minimization of tr(H v v^dag) over pure product states; exposed for
// witness certification and tests.
struct SeesawResult {
  double value = 0.0;
  std::vector<linalg::CVector> local_vectors;
  Matrix product;  // |v><v| of the tensor product
};

SeesawResult seesaw_min_product(const HermOperator& h,
                                const std::vector<int>& subsystem_dims,
                                int restarts, std::uint64_t seed);

// Family {M_n}: generator of the n-copy set plus the full-rank base state
// sigma with sigma^(x)n a member.
struct SetFamily {
  std::string label;
  std::vector<int> base_dims;   // dims of one copy
  DensityMatrix base_state;     // full-rank sigma
  std::function<SetPtr(int)> set_for;
};

SetFamily ppt_family(const std::vector<int>& base_dims,
                     const DensityMatrix& base_state);
SetFamily singleton_family(const DensityMatrix& sigma);

struct ClauseResult {
  std::string clause;
  bool passed = false;
  std::string witness;  // populated on failure
};

struct FamilyCheckReport {
  std::vector<ClauseResult> clauses;
  bool all_passed = false;
};

// Randomized verification of the five closure properties (convexity,
// sigma^(x)n membership, partial-trace closure, tensor closure, permutation
// closure) up to n_max copies.
FamilyCheckReport family_property_check(const SetFamily& family, int n_max,
                                        int trials, std::uint64_t seed);

// k-extension of rho_AB: pad with maximally mixed B copies, symmetrize the B
// slots, and return the AB reduction together with the verified bounds.
struct KExtendibleResult {
  DensityMatrix extension;     // rho tilde on A B_1 ... B_k
  DensityMatrix reduction;     // tr_{B_2..B_k} of the extension
  double operator_bound_min_eig = 0.0;  // lambda_min(rho~ - rho (x) pad/k)
  double rel_entropy = 0.0;             // S(rho || reduction), bits
  double log2k = 0.0;
};

KExtendibleResult k_extendible_embed(const DensityMatrix& rho, int k,
                                     int dim_budget = linalg::kDefaultDimBudget);

}  // namespace steinlab::state_sets
