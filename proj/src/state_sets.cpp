#include "steinlab/state_sets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "steinlab/convex.hpp"
#include "steinlab/divergences.hpp"
#include "steinlab/rng.hpp"

namespace steinlab::state_sets {

using linalg::Complex;
using linalg::CVector;

namespace {

std::vector<int> repeat_dims(const std::vector<int>& base, int n) {
  std::vector<int> dims;
  for (int c = 0; c < n; ++c) dims.insert(dims.end(), base.begin(), base.end());
  return dims;
}

Matrix random_density_matrix(int d, Rng& rng) {
  Matrix g(d);
  for (auto& v : g.a) v = rng.cgaussian();
  Matrix m = linalg::matmul(g, linalg::adjoint(g));
  const double tr = linalg::trace(m).real();
  for (auto& v : m.a) v /= tr;
  return m;
}

std::vector<double> realify(const Matrix& m, double sum_weight) {
  std::vector<double> v;
  v.reserve(2 * m.a.size() + 1);
  for (const auto& z : m.a) v.push_back(z.real());
  for (const auto& z : m.a) v.push_back(z.imag());
  v.push_back(sum_weight);
  return v;
}

}  // namespace

std::vector<convex::Projector> ConvexStateSet::projector_list() const {
  return {[this](const Matrix& m) {
    Matrix h = m;
    linalg::hermitize(h);
    return project(linalg::HermOperator(std::move(h), subsystem_dims())).mat();
  }};
}

// ---------------------------------------------------------------------------
// Seesaw over pure product states

SeesawResult seesaw_min_product(const HermOperator& h,
                                const std::vector<int>& subsystem_dims,
                                int restarts, std::uint64_t seed) {
  const int nparty = static_cast<int>(subsystem_dims.size());
  const auto strides = linalg::subsystem_strides(subsystem_dims);
  const int dim = h.dim();

  SeesawResult best;
  best.value = std::numeric_limits<double>::infinity();

  for (int rs = 0; rs < restarts; ++rs) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(rs));
    std::vector<CVector> locals;
    for (int p = 0; p < nparty; ++p) {
      CVector v(static_cast<std::size_t>(subsystem_dims[static_cast<std::size_t>(p)]));
      for (auto& x : v) x = rng.cgaussian();
      const double n = linalg::vnorm(v);
      for (auto& x : v) x /= n;
      locals.push_back(std::move(v));
    }

    auto product_vector = [&] {
      CVector w(1, Complex(1.0, 0.0));
      for (const auto& v : locals) w = linalg::kron_vec(w, v);
      return w;
    };

    double value = 0.0;
    {
      const CVector w = product_vector();
      value = linalg::vdot(w, linalg::mat_vec(h.mat(), w)).real();
    }

    for (int it = 0; it < 300; ++it) {
      for (int p = 0; p < nparty; ++p) {
        const int dp = subsystem_dims[static_cast<std::size_t>(p)];
        // contraction weights over the other parties
        CVector u(static_cast<std::size_t>(dim), Complex(1.0, 0.0));
        for (int i = 0; i < dim; ++i) {
          Complex c(1.0, 0.0);
          for (int q = 0; q < nparty; ++q) {
            if (q == p) continue;
            const int digit = static_cast<int>(
                (i / strides[static_cast<std::size_t>(q)]) %
                subsystem_dims[static_cast<std::size_t>(q)]);
            c *= locals[static_cast<std::size_t>(q)][static_cast<std::size_t>(digit)];
          }
          u[static_cast<std::size_t>(i)] = c;
        }
        Matrix eff(dp);
        for (int i = 0; i < dim; ++i) {
          const int a = static_cast<int>((i / strides[static_cast<std::size_t>(p)]) % dp);
          for (int j = 0; j < dim; ++j) {
            const int b = static_cast<int>((j / strides[static_cast<std::size_t>(p)]) % dp);
            eff.at(a, b) += std::conj(u[static_cast<std::size_t>(i)]) *
                            h.mat().at(i, j) * u[static_cast<std::size_t>(j)];
          }
        }
        linalg::hermitize(eff);
        const auto sp = linalg::herm_eig_jacobi(eff);
        CVector v(static_cast<std::size_t>(dp));
        for (int i = 0; i < dp; ++i) v[static_cast<std::size_t>(i)] = sp.vectors.at(i, dp - 1);
        locals[static_cast<std::size_t>(p)] = std::move(v);
      }
      const CVector w = product_vector();
      const double next = linalg::vdot(w, linalg::mat_vec(h.mat(), w)).real();
      if (std::abs(next - value) < 1e-15 * std::max(1.0, std::abs(value))) {
        value = next;
        break;
      }
      value = next;
    }

    if (value < best.value) {
      best.value = value;
      best.local_vectors = locals;
      best.product = Matrix::outer(product_vector());
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// PPT set

namespace {

class PptSet final : public ConvexStateSet {
 public:
  PptSet(std::vector<int> dims, std::vector<std::vector<int>> cuts)
      : dims_(std::move(dims)), cuts_(std::move(cuts)) {
    if (dims_.size() < 2)
      throw std::invalid_argument("ppt_set: at least two subsystems required");
    dim_ = 1;
    for (int d : dims_) dim_ *= d;
    if (cuts_.empty())
      for (int s = 0; s < static_cast<int>(dims_.size()); ++s) cuts_.push_back({s});
    std::ostringstream os;
    os << "ppt(" << dims_.size() << " parties)";
    label_ = os.str();
  }

  int dim() const override { return dim_; }
  const std::vector<int>& subsystem_dims() const override { return dims_; }
  const std::string& label() const override { return label_; }

  MembershipReport membership(const HermOperator& sigma, double tol) const override {
    MembershipReport rep;
    const double tr_err = std::abs(linalg::trace(sigma.mat()).real() - 1.0);
    if (tr_err > tol) {
      rep.verdict = Membership::kNotMember;
      rep.distance = tr_err;
      rep.detail = "trace deviates by " + std::to_string(tr_err);
      return rep;
    }
    double worst = linalg::lambda_min(sigma);
    std::string which = "identity cut";
    for (const auto& cut : cuts_) {
      const double lm = linalg::lambda_min(linalg::partial_transpose(sigma, cut));
      if (lm < worst) {
        worst = lm;
        which = "partial transpose cut";
      }
    }
    if (worst >= -tol) {
      rep.verdict = Membership::kMember;
      rep.distance = std::max(0.0, -worst);
    } else {
      rep.verdict = Membership::kNotMember;
      rep.distance = -worst;
      rep.detail = which + " has eigenvalue " + std::to_string(worst);
    }
    return rep;
  }

  std::vector<convex::Projector> projector_list() const override {
    std::vector<convex::Projector> sets;
    sets.push_back([](const Matrix& m) { return convex::project_psd(m); });
    for (const auto& cut : cuts_) {
      const auto dims = dims_;
      sets.push_back([cut, dims](const Matrix& m) {
        const HermOperator h = [&] {
          Matrix mm = m;
          linalg::hermitize(mm);
          return HermOperator(std::move(mm), dims);
        }();
        const auto pt = linalg::partial_transpose(h, cut);
        const Matrix clipped = convex::project_psd(pt.mat());
        return linalg::partial_transpose(HermOperator(clipped, dims), cut).mat();
      });
    }
    sets.push_back([](const Matrix& m) { return convex::project_trace_one_hermitian(m); });
    return sets;
  }

  DensityMatrix project(const HermOperator& x) const override {
    const auto sets = projector_list();
    const auto res = convex::dykstra(x.mat(), sets, 5000, 1e-9);
    if (!res.converged) {
      // Accept a stalled iterate only when it is verifiably feasible; the
      // tangential-face tail of Dykstra can level off around 1e-8 without the
      // point being any less of a member.
      Matrix h = res.point;
      linalg::hermitize(h);
      const HermOperator cand(std::move(h), dims_);
      const auto rep = membership(cand, 1e-8);
      if (rep.verdict != Membership::kMember) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e", res.residual);
        throw NumericalError(
            std::string("ppt_set::project: Dykstra did not converge (residual ") +
            buf + ", infeasible by " + std::to_string(rep.distance) + ")");
      }
    }
    // polish within the Dykstra residual so the result is PSD and unit trace
    Matrix out = convex::project_density(res.point);
    return DensityMatrix(HermOperator(std::move(out), dims_));
  }

  DensityMatrix linear_min(const HermOperator& h) const override {
    // consensus ADMM over the elementary projections, then one exact
    // projection to certify feasibility
    const Matrix z = convex::admm_linear_min(h.mat(), projector_list());
    Matrix zz = z;
    linalg::hermitize(zz);
    return project(HermOperator(std::move(zz), dims_));
  }

  SetDescriptor descriptor() const override {
    return {label_, "ppt", dims_, {}};
  }

 private:
  std::vector<int> dims_;
  std::vector<std::vector<int>> cuts_;
  int dim_ = 0;
  std::string label_;
};

}  // namespace

SetPtr ppt_set(const std::vector<int>& subsystem_dims,
               std::vector<std::vector<int>> cuts) {
  return std::make_shared<PptSet>(subsystem_dims, std::move(cuts));
}

// ---------------------------------------------------------------------------
// Inner separable hull

namespace {

class SepInnerSet final : public ConvexStateSet {
 public:
  SepInnerSet(std::vector<int> dims, int n_anchors, std::uint64_t seed)
      : dims_(std::move(dims)), seed_(seed) {
    dim_ = 1;
    for (int d : dims_) dim_ *= d;
    Rng rng(seed);
    for (int a = 0; a < n_anchors; ++a) anchors_.push_back(random_product(rng));
    // a few seesaw-optimized anchors along random directions
    for (int a = 0; a < 8; ++a) {
      Matrix dir(dim_);
      for (int i = 0; i < dim_; ++i) {
        dir.at(i, i) = rng.gaussian();
        for (int j = i + 1; j < dim_; ++j) {
          const Complex z = 0.5 * rng.cgaussian();
          dir.at(i, j) = z;
          dir.at(j, i) = std::conj(z);
        }
      }
      const auto sw = seesaw_min_product(HermOperator(dir, dims_), dims_, 4,
                                         seed ^ (0x9e37ULL + a));
      anchors_.push_back(sw.product);
    }
    label_ = "sep_inner(" + std::to_string(anchors_.size()) + " anchors)";
  }

  int dim() const override { return dim_; }
  const std::vector<int>& subsystem_dims() const override { return dims_; }
  const std::string& label() const override { return label_; }

  MembershipReport membership(const HermOperator& sigma, double tol) const override {
    const auto [x, dist, stalled] = nearest_in_hull(sigma.mat(), tol);
    MembershipReport rep;
    rep.distance = dist;
    if (dist <= tol) {
      rep.verdict = Membership::kMember;
      return rep;
    }
    if (!stalled) {
      rep.verdict = Membership::kIndeterminate;
      rep.detail = "column generation still improving at iteration cap";
      return rep;
    }
    rep.verdict = Membership::kNotMember;
    // witness: the residual direction, certified by seesaw
    Matrix w = x - sigma.mat();
    linalg::hermitize(w);
    const auto sw = seesaw_min_product(HermOperator(w, dims_), dims_, 16, seed_ ^ 0xabcdULL);
    const double on_sigma = linalg::trace(linalg::matmul(w, sigma.mat())).real();
    rep.detail = "witness W with min_products tr(Wp) = " + std::to_string(sw.value) +
                 " > tr(W sigma) = " + std::to_string(on_sigma);
    return rep;
  }

  DensityMatrix project(const HermOperator& x) const override {
    const auto [pt, dist, stalled] = nearest_in_hull(x.mat(), 1e-9);
    Matrix out = pt;
    linalg::hermitize(out);
    return DensityMatrix(HermOperator(std::move(out), dims_));
  }

  DensityMatrix linear_min(const HermOperator& h) const override {
    const auto sw = seesaw_min_product(h, dims_, 32, seed_ ^ 0x5151ULL);
    return DensityMatrix(HermOperator(sw.product, dims_));
  }

  SetDescriptor descriptor() const override {
    return {label_, "sep_inner", dims_, anchors_};
  }

 private:
  Matrix random_product(Rng& rng) const {
    CVector w(1, Complex(1.0, 0.0));
    for (int d : dims_) {
      CVector v(static_cast<std::size_t>(d));
      for (auto& x : v) x = rng.cgaussian();
      const double n = linalg::vnorm(v);
      for (auto& x : v) x /= n;
      w = linalg::kron_vec(w, v);
    }
    return Matrix::outer(w);
  }

  // fully-corrective column generation for the hull distance
  std::tuple<Matrix, double, bool> nearest_in_hull(const Matrix& target,
                                                   double tol) const {
    const double kSumWeight = 64.0;
    std::vector<Matrix> cols = anchors_;
    // overlap-maximizing product state: exact when the target itself is a
    // product vertex
    {
      Matrix neg = -1.0 * target;
      linalg::hermitize(neg);
      const auto sw0 = seesaw_min_product(HermOperator(std::move(neg), dims_),
                                          dims_, 8, seed_ ^ 0x1fe3ULL);
      cols.push_back(sw0.product);
    }
    std::vector<std::vector<double>> rcols;
    for (const auto& c : cols) rcols.push_back(realify(c, kSumWeight));
    const std::vector<double> b = realify(target, kSumWeight);

    Matrix x(dim_);
    double dist = std::numeric_limits<double>::infinity();
    bool settled = false;
    for (int round = 0; round < 80; ++round) {
      const auto w = convex::nnls(rcols, b);
      double sum = 0.0;
      for (double v : w) sum += v;
      if (sum <= 1e-12) sum = 1.0;
      Matrix cand(dim_);
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (w[i] == 0.0) continue;
        cand += (w[i] / sum) * cols[i];
      }
      // a single column may beat the master solution when the Gram matrix is
      // ill-conditioned near a vertex
      double cand_dist = linalg::frobenius_norm(cand - target);
      for (const auto& c : cols) {
        const double d = linalg::frobenius_norm(c - target);
        if (d < cand_dist) {
          cand_dist = d;
          cand = c;
        }
      }
      x = std::move(cand);
      dist = cand_dist;
      if (dist <= tol) return {x, dist, true};

      Matrix g = x - target;
      linalg::hermitize(g);
      const auto sw = seesaw_min_product(HermOperator(g, dims_), dims_, 8,
                                         seed_ ^ (0x77ULL + round));
      const double on_x = linalg::trace(linalg::matmul(g, x)).real();
      // Frank-Wolfe gap of 0.5||x - target||^2 over the product hull; once it
      // cannot bridge dist down to tol, the verdict is settled
      const double gap = on_x - sw.value;
      if (gap <= 0.5 * std::max(0.0, dist * dist - tol * tol) + 1e-14) {
        settled = true;
        break;
      }
      // drop near-duplicates, they only poison the least-squares Gram
      bool duplicate = false;
      for (const auto& c : cols)
        if (linalg::frobenius_norm(c - sw.product) < 1e-9) {
          duplicate = true;
          break;
        }
      if (duplicate) {
        settled = true;
        break;
      }
      cols.push_back(sw.product);
      rcols.push_back(realify(sw.product, kSumWeight));
    }
    return {x, dist, settled};
  }

  std::vector<int> dims_;
  int dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Matrix> anchors_;
  std::string label_;
};

}  // namespace

SetPtr sep_inner_set(const std::vector<int>& subsystem_dims, int n_anchor_products,
                     std::uint64_t seed) {
  return std::make_shared<SepInnerSet>(subsystem_dims, n_anchor_products, seed);
}

// ---------------------------------------------------------------------------
// Singleton

namespace {

class SingletonSet final : public ConvexStateSet {
 public:
  SingletonSet(DensityMatrix sigma, std::string label)
      : sigma_(std::move(sigma)), label_(std::move(label)) {}

  int dim() const override { return sigma_.dim(); }
  const std::vector<int>& subsystem_dims() const override {
    return sigma_.subsystem_dims();
  }
  const std::string& label() const override { return label_; }

  MembershipReport membership(const HermOperator& s, double tol) const override {
    const double d = linalg::frobenius_norm(s.mat() - sigma_.mat());
    if (d <= tol) return {Membership::kMember, d, ""};
    return {Membership::kNotMember, d, "distance to the singleton"};
  }

  DensityMatrix project(const HermOperator&) const override { return sigma_; }
  DensityMatrix linear_min(const HermOperator&) const override { return sigma_; }

  SetDescriptor descriptor() const override {
    return {label_, "singleton", sigma_.subsystem_dims(), {}};
  }

 private:
  DensityMatrix sigma_;
  std::string label_;
};

}  // namespace

SetPtr singleton_set(const DensityMatrix& sigma, std::string label) {
  return std::make_shared<SingletonSet>(sigma, std::move(label));
}

// ---------------------------------------------------------------------------
// Families

SetFamily ppt_family(const std::vector<int>& base_dims,
                     const DensityMatrix& base_state) {
  const int nparty = static_cast<int>(base_dims.size());
  auto set_for = [base_dims, nparty](int n) {
    std::vector<std::vector<int>> cuts;
    for (int p = 1; p < nparty; ++p) {
      std::vector<int> cut;
      for (int c = 0; c < n; ++c) cut.push_back(c * nparty + p);
      cuts.push_back(std::move(cut));
    }
    return ppt_set(repeat_dims(base_dims, n), std::move(cuts));
  };
  return SetFamily{"ppt_family", base_dims, base_state, std::move(set_for)};
}

SetFamily singleton_family(const DensityMatrix& sigma) {
  auto set_for = [sigma](int n) {
    const auto dims = repeat_dims(sigma.subsystem_dims(), n);
    const auto power = linalg::kron_power(sigma.op, n).with_dims(dims);
    return singleton_set(DensityMatrix(power), "singleton(sigma^" + std::to_string(n) + ")");
  };
  return SetFamily{"singleton_family", sigma.subsystem_dims(), sigma,
                   std::move(set_for)};
}

// ---------------------------------------------------------------------------
// Family property check

namespace {

constexpr double kCheckTol = 1e-7;

std::string describe_failure(const char* what, double value) {
  std::ostringstream os;
  os << what << " (residual " << value << ")";
  return os.str();
}

}  // namespace

FamilyCheckReport family_property_check(const SetFamily& family, int n_max,
                                        int trials, std::uint64_t seed) {
  FamilyCheckReport report;
  Rng rng(seed);
  const int base_dim = family.base_state.dim();
  const int nparty = static_cast<int>(family.base_dims.size());

  auto random_member = [&](int n) {
    const auto set = family.set_for(n);
    Matrix m = random_density_matrix(set->dim(), rng);
    return set->project(HermOperator(std::move(m), repeat_dims(family.base_dims, n)));
  };

  // 1: convexity via midpoints
  {
    ClauseResult c{"1: convexity (midpoints of member pairs)", true, ""};
    for (int t = 0; t < trials && c.passed; ++t) {
      const int n = 1 + (t % n_max);
      const auto set = family.set_for(n);
      const auto a = random_member(n);
      const auto b = random_member(n);
      const auto mid = DensityMatrix(0.5 * a.op + 0.5 * b.op);
      const auto rep = set->membership(mid.op, kCheckTol);
      if (rep.verdict != Membership::kMember) {
        c.passed = false;
        c.witness = describe_failure("midpoint left the set", rep.distance);
      }
    }
    report.clauses.push_back(std::move(c));
  }

  // 2: sigma^n membership
  {
    ClauseResult c{"2: contains sigma^n for the full-rank base state", true, ""};
    for (int n = 1; n <= n_max && c.passed; ++n) {
      const auto set = family.set_for(n);
      const auto power = linalg::kron_power(family.base_state.op, n)
                             .with_dims(repeat_dims(family.base_dims, n));
      const auto rep = set->membership(power, kCheckTol);
      if (rep.verdict != Membership::kMember) {
        c.passed = false;
        c.witness = describe_failure("sigma^n rejected", rep.distance);
      }
    }
    report.clauses.push_back(std::move(c));
  }

  // 3: closure under tracing one copy
  {
    ClauseResult c{"3: partial-trace closure", true, ""};
    for (int t = 0; t < trials && c.passed && n_max >= 2; ++t) {
      const int n = 2 + (t % (n_max - 1));
      const auto member = random_member(n);
      const int drop = rng.uniform_int(n);
      std::vector<int> keep;
      for (int cidx = 0; cidx < n; ++cidx) {
        if (cidx == drop) continue;
        for (int p = 0; p < nparty; ++p) keep.push_back(cidx * nparty + p);
      }
      const auto traced = linalg::partial_trace(member.op, keep);
      const auto rep = family.set_for(n - 1)->membership(traced, kCheckTol);
      if (rep.verdict != Membership::kMember) {
        c.passed = false;
        c.witness = describe_failure("traced member rejected", rep.distance);
      }
    }
    report.clauses.push_back(std::move(c));
  }

  // 4: tensor closure
  {
    ClauseResult c{"4: tensor closure", true, ""};
    for (int t = 0; t < trials && c.passed && n_max >= 2; ++t) {
      const auto a = random_member(1);
      const auto b = random_member(1);
      const auto prod = linalg::kron_op(a.op, b.op);
      const auto rep = family.set_for(2)->membership(prod, kCheckTol);
      if (rep.verdict != Membership::kMember) {
        c.passed = false;
        c.witness = describe_failure("tensor product rejected", rep.distance);
      }
    }
    report.clauses.push_back(std::move(c));
  }

  // 5: permutation closure
  {
    ClauseResult c{"5: permutation closure", true, ""};
    for (int t = 0; t < trials && c.passed && n_max >= 2; ++t) {
      const int n = 2 + (t % std::max(1, n_max - 1));
      if (n > n_max) continue;
      const auto member = random_member(n);
      std::vector<int> copy_perm(static_cast<std::size_t>(n));
      std::iota(copy_perm.begin(), copy_perm.end(), 0);
      rng.shuffle(copy_perm);
      std::vector<int> slot_perm(static_cast<std::size_t>(n * nparty));
      for (int cidx = 0; cidx < n; ++cidx)
        for (int p = 0; p < nparty; ++p)
          slot_perm[static_cast<std::size_t>(cidx * nparty + p)] =
              copy_perm[static_cast<std::size_t>(cidx)] * nparty + p;
      const auto moved = linalg::permute_subsystems(member.op, slot_perm);
      const auto rep = family.set_for(n)->membership(moved, kCheckTol);
      if (rep.verdict != Membership::kMember) {
        c.passed = false;
        c.witness = describe_failure("permuted member rejected", rep.distance);
      }
    }
    report.clauses.push_back(std::move(c));
  }

  report.all_passed = true;
  for (const auto& c : report.clauses) report.all_passed = report.all_passed && c.passed;
  (void)base_dim;
  return report;
}

// ---------------------------------------------------------------------------
// k-extendible embedding

KExtendibleResult k_extendible_embed(const DensityMatrix& rho, int k,
                                     int dim_budget) {
  if (k < 1) throw std::invalid_argument("k_extendible_embed: k >= 1");
  if (rho.subsystem_dims().size() != 2)
    throw std::invalid_argument("k_extendible_embed: bipartite input required");
  const int da = rho.subsystem_dims()[0];
  const int db = rho.subsystem_dims()[1];
  double total = static_cast<double>(da);
  for (int i = 0; i < k; ++i) {
    total *= db;
    if (total > dim_budget)
      throw CapacityError("k_extendible_embed: dim " + std::to_string(da) + "*" +
                          std::to_string(db) + "^" + std::to_string(k) +
                          " exceeds budget " + std::to_string(dim_budget));
  }

  // rho (x) maximally-mixed pads on B_2..B_k
  HermOperator big = rho.op;
  const HermOperator pad = (1.0 / db) * HermOperator::identity({db});
  for (int i = 1; i < k; ++i) big = linalg::kron_op(big, pad);

  // average over permutations of the k B slots (slot 0 = A fixed)
  std::vector<int> bperm(static_cast<std::size_t>(k));
  std::iota(bperm.begin(), bperm.end(), 0);
  Matrix acc(big.dim());
  double terms = 0.0;
  do {
    std::vector<int> slot_perm(static_cast<std::size_t>(k + 1));
    slot_perm[0] = 0;
    for (int i = 0; i < k; ++i)
      slot_perm[static_cast<std::size_t>(i + 1)] = 1 + bperm[static_cast<std::size_t>(i)];
    acc += linalg::permute_subsystems(big, slot_perm).mat();
    terms += 1.0;
  } while (std::next_permutation(bperm.begin(), bperm.end()));
  acc = (1.0 / terms) * acc;

  KExtendibleResult res{DensityMatrix(HermOperator(std::move(acc), big.subsystem_dims())),
                        rho, 0.0, 0.0, std::log2(static_cast<double>(k))};

  // reduction to A B_1
  res.reduction = DensityMatrix(linalg::partial_trace(res.extension.op, {0, 1}));

  // operator bound rho~ >= rho (x) (I/db^2)^(k-1) / k
  HermOperator weak = rho.op;
  const HermOperator weak_pad = (1.0 / (db * db)) * HermOperator::identity({db});
  for (int i = 1; i < k; ++i) weak = linalg::kron_op(weak, weak_pad);
  res.operator_bound_min_eig =
      linalg::lambda_min(res.extension.op - (1.0 / k) * weak);

  res.rel_entropy = divergences::relative_entropy(rho, res.reduction).value;
  return res;
}

}  // namespace steinlab::state_sets
