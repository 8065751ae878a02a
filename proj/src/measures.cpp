#include "steinlab/measures.hpp"

#include <algorithm>
#include <cmath>

#include "steinlab/convex.hpp"
#include "steinlab/divergences.hpp"

namespace steinlab::measures {

using linalg::Complex;
using linalg::HermOperator;
using linalg::Matrix;
using linalg::Spectrum;

namespace {

// full-rank safeguard mixed into every iterate before taking logarithms
constexpr double kFloorMix = 1e-10;

DensityMatrix mix_floor(const DensityMatrix& s) {
  const int d = s.dim();
  const HermOperator mixed =
      (1.0 - kFloorMix) * s.op +
      (kFloorMix / d) * HermOperator::identity(s.subsystem_dims());
  return DensityMatrix(mixed);
}

double rel_ent(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return divergences::relative_entropy(rho, sigma).value;
}

// gradient of sigma -> -tr(rho log2 sigma) via the Daleckii-Krein divided
// differences in sigma's eigenbasis
HermOperator rel_ent_gradient(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const Spectrum sp = linalg::herm_eig(sigma.op);
  const int d = sigma.dim();
  // rho in sigma's eigenbasis
  const Matrix vt = linalg::adjoint(sp.vectors);
  const Matrix rho_t = linalg::matmul(linalg::matmul(vt, rho.mat()), sp.vectors);
  Matrix core(d);
  const double ln2 = std::log(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double a = std::max(sp.eigenvalues[static_cast<std::size_t>(i)], 1e-300);
      const double b = std::max(sp.eigenvalues[static_cast<std::size_t>(j)], 1e-300);
      const double phi =
          std::abs(a - b) < 1e-14 * std::max(a, b)
              ? 1.0 / a
              : (std::log(a) - std::log(b)) / (a - b);
      core.at(i, j) = -rho_t.at(i, j) * (phi / ln2);
    }
  }
  Matrix g = linalg::matmul(linalg::matmul(sp.vectors, core), vt);
  linalg::hermitize(g);
  return HermOperator(std::move(g), sigma.subsystem_dims());
}

}  // namespace

MeasureResult rel_ent_to_set(const DensityMatrix& rho, const ConvexStateSet& set,
                             int max_iter, double tol) {
  if (rho.dim() != set.dim())
    throw std::invalid_argument("rel_ent_to_set: dimension mismatch");
  DensityMatrix sigma = mix_floor(set.project(HermOperator::identity(rho.subsystem_dims())));
  {
    const auto ev = linalg::herm_eigvals(sigma.op);
    if (ev.back() <= 0.0)
      throw NumericalError("rel_ent_to_set: no full-rank feasible start");
  }
  double value = rel_ent(rho, sigma);
  {
    // the Frobenius-nearest member is the better start when rho is a member
    // or close to one
    const DensityMatrix near = mix_floor(set.project(rho.op));
    const double near_val = rel_ent(rho, near);
    if (near_val < value) {
      sigma = near;
      value = near_val;
    }
  }
  double gap = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iter; ++it) {
    const HermOperator g = rel_ent_gradient(rho, sigma);
    const DensityMatrix dir = set.linear_min(g);
    gap = linalg::trace(linalg::matmul(g.mat(), sigma.mat() - dir.mat())).real();
    if (gap <= tol) break;
    // exact line search on the 1-D restriction (convex)
    auto f_at = [&](double t) {
      const DensityMatrix cand(
          mix_floor(DensityMatrix((1.0 - t) * sigma.op + t * dir.op)));
      return rel_ent(rho, cand);
    };
    const double t = convex::golden_min(f_at, 0.0, 1.0, 30);
    const double cand_val = f_at(t);
    if (cand_val < value) {
      sigma = mix_floor(DensityMatrix((1.0 - t) * sigma.op + t * dir.op));
      value = cand_val;
    } else {
      break;  // line search stalled
    }
  }

  MeasureResult res{value, sigma, std::max(0.0, value - std::max(gap, 0.0)),
                    value, it, false, ""};
  return res;
}

namespace {

struct Feasibility {
  bool feasible = false;
  bool determinate = true;
  Matrix point;
};

// feasibility of { sigma in M : sigma >= c * rho } by Dykstra alternating
// projections between the set and the shifted PSD cone
Feasibility robustness_feasible(const DensityMatrix& rho, const ConvexStateSet& set,
                                double c) {
  const Matrix shift = c * rho.mat();
  std::vector<convex::Projector> sets = set.projector_list();
  sets.push_back([&shift](const Matrix& m) {
    Matrix h = m - shift;
    return convex::project_psd(h) + shift;
  });

  const auto res = convex::dykstra(rho.mat(), sets, 2000, 1e-8);
  Feasibility f;
  f.point = res.point;
  if (!res.converged) {
    f.determinate = false;
    return f;
  }
  Matrix h = res.point;
  linalg::hermitize(h);
  const HermOperator cand(std::move(h), rho.subsystem_dims());
  const auto rep = set.membership(cand, 1e-6);
  const double shifted_min = linalg::lambda_min(
      HermOperator(cand.mat() - shift, rho.subsystem_dims()));
  f.feasible = rep.verdict == state_sets::Membership::kMember && shifted_min >= -1e-7;
  return f;
}

}  // namespace

MeasureResult log_robustness(const DensityMatrix& rho, const ConvexStateSet& set,
                             double tol) {
  if (rho.dim() != set.dim())
    throw std::invalid_argument("log_robustness: dimension mismatch");

  // s = 0 feasible iff rho is itself (close to) a member
  if (set.membership(rho.op, 1e-8).verdict == state_sets::Membership::kMember) {
    return MeasureResult{0.0, rho, 0.0, 0.0, 0, false, "member"};
  }

  const DensityMatrix full = set.project(HermOperator::identity(rho.subsystem_dims()));
  double hi = divergences::max_relative_entropy(rho, full).value;
  if (!std::isfinite(hi))
    throw NumericalError("log_robustness: projected full-rank start does not dominate rho");
  double lo = 0.0;
  bool had_indeterminate = false;

  Matrix cert = full.mat();
  // verify hi is feasible
  {
    const auto f = robustness_feasible(rho, set, std::exp2(-hi));
    if (f.feasible) cert = f.point;
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const auto f = robustness_feasible(rho, set, std::exp2(-mid));
    if (!f.determinate) {
      had_indeterminate = true;
      lo = mid;  // widen the reported bracket from below
      continue;
    }
    if (f.feasible) {
      hi = mid;
      cert = f.point;
    } else {
      lo = mid;
    }
  }

  Matrix h = cert;
  linalg::hermitize(h);
  const Matrix polished = convex::project_density(h);
  MeasureResult res{hi,
                    DensityMatrix(HermOperator(polished, rho.subsystem_dims())),
                    lo,
                    hi,
                    0,
                    false,
                    had_indeterminate ? "indeterminate feasibility encountered; "
                                        "bracket widened"
                                      : ""};
  return res;
}

std::pair<DensityMatrix, DrReport> dr_smooth(const DensityMatrix& rho,
                                             const HermOperator& y,
                                             const HermOperator& delta) {
  DrReport rep;
  rep.precondition_min_eig =
      linalg::lambda_min(y + delta - rho.op);
  if (rep.precondition_min_eig < -1e-9)
    throw NumericalError("dr_smooth: rho <= Y + Delta violated (lambda_min " +
                         std::to_string(rep.precondition_min_eig) + ")");
  rep.tr_delta = linalg::trace(delta.mat()).real();
  if (rep.tr_delta >= 1.0)
    throw std::invalid_argument("dr_smooth: tr(Delta) must be < 1");

  const HermOperator ysum = y + delta;
  const Matrix t = linalg::matmul(linalg::matrix_sqrt(y).mat(),
                                  linalg::matrix_pow(ysum, -0.5).mat());
  Matrix rp = linalg::matmul(linalg::matmul(t, rho.mat()), linalg::adjoint(t));
  linalg::hermitize(rp);
  const double tr = linalg::trace(rp).real();
  if (tr <= 1e-14)
    throw NumericalError("dr_smooth: smoothed state has vanishing trace");
  rp = (1.0 / tr) * rp;
  const DensityMatrix smoothed(HermOperator(std::move(rp), rho.subsystem_dims()));

  const double inv = 1.0 / (1.0 - rep.tr_delta);
  rep.operator_bound_min_eig = linalg::lambda_min(inv * y - smoothed.op);
  rep.operator_bound_holds = rep.operator_bound_min_eig >= -1e-9;
  rep.fidelity = linalg::fidelity(rho.op, smoothed.op);
  rep.fidelity_floor = 1.0 - rep.tr_delta;
  rep.fidelity_holds = rep.fidelity >= rep.fidelity_floor - 1e-9;
  rep.trace_distance = linalg::trace_norm(rho.op - smoothed.op);
  rep.trace_distance_ceiling = 4.0 * std::sqrt(rep.tr_delta);
  rep.trace_distance_holds =
      rep.trace_distance <= rep.trace_distance_ceiling + 1e-9;
  return {smoothed, rep};
}

PositivePartMin fw_min_positive_part(const HermOperator& x, double c,
                                     const ConvexStateSet& set, int max_iter) {
  DensityMatrix omega = set.project(HermOperator::identity(x.subsystem_dims()));
  auto f_of = [&](const Matrix& w) {
    return linalg::positive_part_trace(
        HermOperator(x.mat() - c * w, x.subsystem_dims()));
  };
  double value = f_of(omega.mat());
  double gap = std::numeric_limits<double>::infinity();

  for (int it = 0; it < max_iter; ++it) {
    const HermOperator inner(x.mat() - c * omega.mat(), x.subsystem_dims());
    const HermOperator grad =
        -c * linalg::positive_part_projector(inner);
    const DensityMatrix dir = set.linear_min(grad);
    gap = linalg::trace(linalg::matmul(grad.mat(), omega.mat() - dir.mat())).real();
    if (gap <= 1e-8) break;
    auto h_at = [&](double t) {
      return f_of((1.0 - t) * omega.mat() + t * dir.mat());
    };
    const double t = convex::golden_min(h_at, 0.0, 1.0, 40);
    const double cand = h_at(t);
    if (cand < value - 1e-14) {
      omega = DensityMatrix((1.0 - t) * omega.op + t * dir.op);
      value = cand;
    } else {
      break;
    }
  }
  return {value, omega, std::max(gap, 0.0)};
}

MeasureResult smooth_log_robustness(const DensityMatrix& rho,
                                    const ConvexStateSet& set, double eps,
                                    SmoothStrategy strategy) {
  if (eps < 0.0 || eps >= 2.0)
    throw std::invalid_argument("smooth_log_robustness: eps in [0, 2)");

  MeasureResult best{std::numeric_limits<double>::infinity(), rho, 0.0, 0.0, 0,
                     true, ""};

  if (strategy != SmoothStrategy::kDrRoute) {
    // mixing route: slide toward a full-rank member
    const DensityMatrix full =
        set.project(HermOperator::identity(rho.subsystem_dims()));
    const DensityMatrix mixed(
        (1.0 - 0.5 * eps) * rho.op + (0.5 * eps) * full.op);
    const MeasureResult lr = log_robustness(mixed, set);
    if (lr.value < best.value) {
      best.value = lr.value;
      best.certificate = lr.certificate;
      best.notes = "mixing route";
    }
  }

  if (strategy != SmoothStrategy::kMixingRoute && eps > 0.0) {
    // DR route: bisect s, smooth away the positive part of rho - 2^s sigma_s
    const MeasureResult plain = log_robustness(rho, set);
    double lo = 0.0, hi = plain.value;
    bool found = false;
    double found_value = plain.value;
    DensityMatrix found_cert = plain.certificate;
    for (int it = 0; it < 25 && hi - lo > 1e-4; ++it) {
      const double s = 0.5 * (lo + hi);
      const double c = std::exp2(s);
      const auto pp = fw_min_positive_part(rho.op, c, set, 60);
      const HermOperator inner(rho.mat() - c * pp.omega.mat(),
                               rho.subsystem_dims());
      // spectral positive part
      const auto sp = linalg::herm_eig(inner);
      std::vector<double> plus(sp.eigenvalues.size());
      for (std::size_t i = 0; i < plus.size(); ++i)
        plus[i] = std::max(sp.eigenvalues[i], 0.0);
      Matrix delta_m(inner.dim());
      for (int a = 0; a < inner.dim(); ++a)
        for (int b = 0; b < inner.dim(); ++b) {
          Complex sacc{};
          for (int k = 0; k < inner.dim(); ++k)
            sacc += sp.vectors.at(a, k) * plus[static_cast<std::size_t>(k)] *
                    std::conj(sp.vectors.at(b, k));
          delta_m.at(a, b) = sacc;
        }
      linalg::hermitize(delta_m);
      const HermOperator delta(std::move(delta_m), rho.subsystem_dims());
      const HermOperator yop = c * pp.omega.op;
      const double trd = linalg::trace(delta.mat()).real();
      bool ok = false;
      if (trd < 1.0) {
        const auto [smoothed, rep] = dr_smooth(rho, yop, delta);
        if (rep.trace_distance <= eps) {
          ok = true;
          const double val =
              divergences::max_relative_entropy(smoothed, pp.omega).value;
          if (val < found_value) {
            found_value = val;
            found_cert = smoothed;
            found = true;
          }
        }
      }
      if (ok)
        hi = s;
      else
        lo = s;
    }
    if (found && found_value < best.value) {
      best.value = found_value;
      best.certificate = found_cert;
      best.notes = "dr route";
    } else if (plain.value < best.value) {
      best.value = plain.value;
      best.certificate = plain.certificate;
      best.notes = "unsmoothed fallback";
    }
  }

  best.upper = best.value;
  best.lower = 0.0;
  best.upper_bound_only = true;
  best.notes += " (upper bound: exact ball minimization out of scope)";
  return best;
}

RegularizedCurve regularized_curve(const DensityMatrix& rho,
                                   const SetFamily& family, int n_max,
                                   int dim_budget) {
  RegularizedCurve curve;
  std::vector<double> raw;
  for (int n = 1; n <= n_max; ++n) {
    double dm = 1.0;
    for (int i = 0; i < n; ++i) {
      dm *= rho.dim();
      if (dm > dim_budget)
        throw CapacityError("regularized_curve: dim exceeds budget at n = " +
                            std::to_string(n));
    }
    std::vector<int> dims;
    for (int c = 0; c < n; ++c)
      dims.insert(dims.end(), rho.subsystem_dims().begin(),
                  rho.subsystem_dims().end());
    const DensityMatrix rho_n(linalg::kron_power(rho.op, n).with_dims(dims));
    const auto set = family.set_for(n);
    const auto res = rel_ent_to_set(rho_n, *set);
    raw.push_back(res.value);
    curve.points.push_back({n, res.value / n, res.value});
  }
  for (int n = 1; n <= n_max; ++n)
    for (int m = 1; n + m <= n_max; ++m) {
      const double lhs = raw[static_cast<std::size_t>(n + m - 1)];
      const double rhs = raw[static_cast<std::size_t>(n - 1)] + raw[static_cast<std::size_t>(m - 1)];
      if (lhs > rhs + 1e-6) {
        curve.subadditive = false;
        curve.subadditivity_notes.push_back(
            "a_" + std::to_string(n + m) + " = " + std::to_string(lhs) +
            " exceeds a_" + std::to_string(n) + " + a_" + std::to_string(m) +
            " = " + std::to_string(rhs));
      }
    }
  return curve;
}

}  // namespace steinlab::measures
