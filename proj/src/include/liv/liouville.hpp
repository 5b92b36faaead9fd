#pragma once

// The Liouville vector field Y = f X + g d_s of an interpolation system:
// dual-provenance (f, g) solves, skeleton location, normal expansion,
// synchronization checks, trajectory integration, and the strong normal
// line bundle via power iteration.
//
// Closed forms are available in the exponential decomposition (optionally
// with conformal scale factors, whose (f, g) divide by 1 + Y0.fscale) and
// for the linear symmetric pair; everything else goes through the generic
// 2x2 solve of the defining identity.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "liv/forms.hpp"
#include "liv/lis.hpp"
#include "liv/numerics.hpp"

namespace liv {

enum class Provenance { closed_form, linear_solve };

struct LiouvilleField {
  double f = 0.0;
  double g = 0.0;
  double g_over_f = 0.0;
  double d_s_g_over_f = 0.0;
  Provenance provenance = Provenance::linear_solve;
};

namespace detail {

enum class ClosedKind { none, exponential_family, linear_symmetric };

inline bool is_const_one(const ScalarField& f) { return f.id() == "const(1)"; }

inline ClosedKind classify(const InterpolationSystem& sys) {
  const auto& bc = sys.bicontact;
  const auto& tr = sys.profile.transforms();
  if (bc.gauge == Gauge::symmetric) {
    if (sys.profile.base_kind() == ProfileKind::linear && tr.empty() &&
        is_const_one(bc.h_u) && is_const_one(bc.h_s) && is_const_one(bc.p_u) &&
        is_const_one(bc.p_s))
      return ClosedKind::linear_symmetric;
    return ClosedKind::none;
  }
  if (!is_const_one(bc.p_u) || !is_const_one(bc.p_s)) return ClosedKind::none;
  if (sys.profile.base_kind() == ProfileKind::linear) return ClosedKind::none;
  for (const auto& t : tr)
    if (t.kind != ProfileTransform::kScale) return ClosedKind::none;
  return ClosedKind::exponential_family;
}

// Accumulated conformal exponent: general-profile distortion plus any scale
// transforms.  Zero jet for the pristine exponential profile.
inline Jet2 total_scale_jet(const InterpolationSystem& sys, double s,
                            const Vec3& x) {
  Jet2 w;
  const FlowModel& m = *sys.model;
  if (sys.profile.base_kind() == ProfileKind::general)
    w = w + sys.profile.distortion().eval(m, s, x);
  for (const auto& t : sys.profile.transforms())
    if (t.kind == ProfileTransform::kScale) w = w + t.c.eval(m, s, x);
  return w;
}

inline void guard_density(double dens) {
  if (std::abs(dens) < 1e-14)
    throw std::domain_error("liouville solve: |J| < 1e-14 (degenerate)");
  if (dens < 0.0)
    throw std::domain_error("liouville solve: J > 0 (non-Liouville input)");
}

}  // namespace detail

// Generic route: 2x2 solve of alpha = f L_X alpha + g L_{d_s} alpha, with
// d_s(g/f) from central differences (step 1e-5).
inline LiouvilleField liouville_field_generic(const InterpolationSystem& sys,
                                              double s, const Vec3& x) {
  const Rates rt = sys.model->expansion_rates(x);
  const auto solve_at = [&](double sv) {
    const DefiningSolve sol =
        solve_defining_identity(alpha_coeffs(sys, sv, x), rt.r_u, rt.r_s);
    detail::guard_density(-sol.J);
    return sol;
  };
  const DefiningSolve sol = solve_at(s);
  constexpr double h = 1e-5;
  const DefiningSolve up = solve_at(s + h);
  const DefiningSolve dn = solve_at(s - h);
  LiouvilleField out;
  out.f = sol.f;
  out.g = sol.g;
  out.g_over_f = sol.g / sol.f;
  out.d_s_g_over_f = (up.g / up.f - dn.g / dn.f) / (2.0 * h);
  out.provenance = Provenance::linear_solve;
  return out;
}

// Closed forms where the gauge admits them, generic solve otherwise.
inline LiouvilleField liouville_field(const InterpolationSystem& sys, double s,
                                      const Vec3& x) {
  const detail::ClosedKind kind = detail::classify(sys);
  if (kind == detail::ClosedKind::none)
    return liouville_field_generic(sys, s, x);
  detail::check_window(sys, s);
  const FlowModel& m = *sys.model;
  const Rates rt = m.expansion_rates(x);
  LiouvilleField out;
  out.provenance = Provenance::closed_form;

  if (kind == detail::ClosedKind::linear_symmetric) {
    const double delta = rt.r_u - rt.r_s;
    out.f = 1.0 / rt.r_u;
    out.g = s * delta / rt.r_u;
    out.g_over_f = s * delta;
    out.d_s_g_over_f = delta;
    return out;
  }

  const MJet hu = sys.bicontact.h_u.eval(m, x);
  const MJet hs = sys.bicontact.h_s.eval(m, x);
  const double delta = rt.r_u - rt.r_s;
  const double xlnr = hu.d_X / hu.value - hs.d_X / hs.value;
  const double sumh = hu.value + hs.value;
  const double sumdx = hu.d_X + hs.d_X;
  const double k = hu.value * hs.value * (delta + xlnr);
  const double e2s = std::exp(2.0 * s);
  const double dens =
      delta * e2s + k / e2s + (rt.r_u + rt.r_s) * sumh + sumdx;
  detail::guard_density(dens);
  const double g_num = delta * e2s - delta * (hs.value - hu.value) + sumdx -
                       k / e2s;
  const double f0 = 2.0 * sumh / dens;
  const double g0 = g_num / dens;

  const Jet2 w = detail::total_scale_jet(sys, s, x);
  const double denom = 1.0 + f0 * w.d_X + g0 * w.d_s;
  if (!(denom > 0.0))
    throw std::domain_error("liouville solve: scaling admissibility violated");

  out.f = f0 / denom;
  out.g = g0 / denom;
  out.g_over_f = g_num / (2.0 * sumh);
  out.d_s_g_over_f = (delta * e2s + k / e2s) / sumh;
  return out;
}

// ---------------------------------------------------------------------------
// Skeleton.

// Root of the alpha_s coefficient F(s, x) = 0; bisection after geometric
// bracket expansion from s = 0 (window midpoint when 0 lies outside).
inline double skeleton_solve(const InterpolationSystem& sys, const Vec3& x,
                             double tol = 1e-12) {
  if (!(tol > 0.0)) throw std::invalid_argument("skeleton: tol must be > 0");
  const FlowModel& m = *sys.model;
  const Jet2 hs = sys.bicontact.h_s.jet2(m, x);
  const Jet2 ps = sys.bicontact.p_s.jet2(m, x);
  const auto F = [&](double s) {
    const ProfilePair lam = sys.profile.lambdas_unchecked(m, s, x);
    return lam.minus.value * hs.value - lam.plus.value * ps.value;
  };
  const double lo = sys.window_lo, hi = sys.window_hi;
  const double s0 =
      (lo <= 0.0 && 0.0 <= hi) ? 0.0 : 0.5 * (lo + hi);
  double h = 0.25 * std::min(1.0, hi - lo);
  double a = std::max(lo, s0 - h);
  double b = std::min(hi, s0 + h);
  while (F(a) * F(b) > 0.0) {
    if (a == lo && b == hi)
      throw std::runtime_error("skeleton: bracket expansion exceeds window");
    h *= 2.0;
    a = std::max(lo, s0 - h);
    b = std::min(hi, s0 + h);
  }
  return bisect(F, a, b, tol);
}

struct SkeletonSample {
  Vec3 x{0.0, 0.0, 0.0};
  double s = 0.0;
  double residual = 0.0;
  double normal_expansion = 0.0;
};

struct SkeletonGraph {
  std::vector<SkeletonSample> samples;
  double period = 1.0;  // base-coordinate extent of the sampling axis
};

// Normal expansion d_s(g/f) evaluated on the skeleton; closed form in the
// exponential family (where e^{2 s*} = h_s), finite differences otherwise.
inline double normal_expansion(const InterpolationSystem& sys, const Vec3& x);

inline double normal_expansion_fd(const InterpolationSystem& sys,
                                  const Vec3& x, double step = 1e-5) {
  const double s = skeleton_solve(sys, x);
  const double up = liouville_field_generic(sys, s + step, x).g_over_f;
  const double dn = liouville_field_generic(sys, s - step, x).g_over_f;
  return (up - dn) / (2.0 * step);
}

inline double normal_expansion(const InterpolationSystem& sys, const Vec3& x) {
  const detail::ClosedKind kind = detail::classify(sys);
  const Rates rt = sys.model->expansion_rates(x);
  if (kind == detail::ClosedKind::linear_symmetric) return rt.r_u - rt.r_s;
  if (kind == detail::ClosedKind::exponential_family) {
    const FlowModel& m = *sys.model;
    const MJet hu = sys.bicontact.h_u.eval(m, x);
    const MJet hs = sys.bicontact.h_s.eval(m, x);
    const double delta = rt.r_u - rt.r_s;
    const double xlnr = hu.d_X / hu.value - hs.d_X / hs.value;
    return (delta * hs.value + hu.value * (delta + xlnr)) /
           (hu.value + hs.value);
  }
  return normal_expansion_fd(sys, x);
}

inline SkeletonGraph skeleton_graph(const InterpolationSystem& sys, int grid_n,
                                    double tol = 1e-12) {
  if (grid_n < 1) throw std::invalid_argument("skeleton graph: grid_n >= 1");
  const FlowModel& m = *sys.model;
  const auto box = m.sample_box();
  SkeletonGraph gr;
  gr.period = box[2][1] - box[2][0];
  gr.samples.resize(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) {
    const Vec3 x{0.0, 0.0, box[2][0] + gr.period * i / grid_n};
    SkeletonSample& smp = gr.samples[static_cast<std::size_t>(i)];
    smp.x = x;
    smp.s = skeleton_solve(sys, x, tol);
    const ProfilePair lam = sys.profile.lambdas_unchecked(m, smp.s, x);
    const double hs = sys.bicontact.h_s.eval(m, x).value;
    const double ps = sys.bicontact.p_s.eval(m, x).value;
    smp.residual = std::abs(lam.minus.value * hs - lam.plus.value * ps);
    smp.normal_expansion = normal_expansion(sys, x);
  }
  return gr;
}

// ---------------------------------------------------------------------------
// Synchronization.

struct SyncCheck {
  double f_at_skeleton = 0.0;
  double inv_rtilde = 0.0;
};

// 1/f on the skeleton against the synchronized rate
// rtilde_u = r_u + X.ln[(h_u/h_s + 1) sqrt(h_s)] (plus the X-derivative of
// the conformal exponent along the skeleton when one is present).  Equality
// certifies that the projected Liouville flow is a synchronization of X.
inline SyncCheck sync_check(const InterpolationSystem& sys, const Vec3& x) {
  const detail::ClosedKind kind = detail::classify(sys);
  if (kind == detail::ClosedKind::none)
    throw std::invalid_argument(
        "sync check: no closed synchronization formula in this gauge");
  const double s_star = skeleton_solve(sys, x);
  SyncCheck out;
  out.f_at_skeleton = liouville_field(sys, s_star, x).f;
  const Rates rt = sys.model->expansion_rates(x);
  if (kind == detail::ClosedKind::linear_symmetric) {
    out.inv_rtilde = 1.0 / rt.r_u;
    return out;
  }
  const FlowModel& m = *sys.model;
  const MJet hu = sys.bicontact.h_u.eval(m, x);
  const MJet hs = sys.bicontact.h_s.eval(m, x);
  const double q = hu.value / hs.value;
  const double xq = (hu.d_X * hs.value - hu.value * hs.d_X) /
                    (hs.value * hs.value);
  double rtilde = rt.r_u + xq / (q + 1.0) + 0.5 * hs.d_X / hs.value;
  // Conformal exponent contributes X.(w|_skeleton); the skeleton graph has
  // X-derivative (1/2) X.ln h_s.
  const Jet2 w = detail::total_scale_jet(sys, s_star, x);
  rtilde += w.d_X + 0.5 * (hs.d_X / hs.value) * w.d_s;
  out.inv_rtilde = 1.0 / rtilde;
  return out;
}

// ---------------------------------------------------------------------------
// Trajectories of Y.

struct Trajectory {
  std::vector<double> t;
  std::vector<double> s;
  std::vector<Vec3> x;
  bool truncated = false;
};

// Fixed-step RK4 flow of Y = f X + g d_s; leaves the window -> truncated.
inline Trajectory integrate_Y(const InterpolationSystem& sys, double s0,
                              const Vec3& x0, double T, double dt) {
  if (!(dt > 0.0) || dt > 1e-2 + 1e-15)
    throw std::invalid_argument("integrate_Y: need 0 < dt <= 1e-2");
  const FlowModel& m = *sys.model;
  Trajectory tr;
  const double dir = (T < 0.0) ? -1.0 : 1.0;
  const double Tabs = std::abs(T);
  std::array<double, 4> y{s0, x0[0], x0[1], x0[2]};
  const auto deriv = [&](const std::array<double, 4>& st) {
    const Vec3 p = m.wrap({st[1], st[2], st[3]});
    const LiouvilleField lf = liouville_field(sys, st[0], p);
    const Vec3 vel = m.velocity(p);
    return std::array<double, 4>{dir * lf.g, dir * lf.f * vel[0],
                                 dir * lf.f * vel[1], dir * lf.f * vel[2]};
  };
  tr.t.push_back(0.0);
  tr.s.push_back(y[0]);
  tr.x.push_back(m.wrap(x0));
  double done = 0.0;
  while (done < Tabs - 1e-15) {
    const double step = std::min(dt, Tabs - done);
    y = rk4_step<4>(y, step, deriv);
    done += step;
    const Vec3 p = m.wrap({y[1], y[2], y[3]});
    y[1] = p[0];
    y[2] = p[1];
    y[3] = p[2];
    if (y[0] < sys.window_lo || y[0] > sys.window_hi) {
      tr.truncated = true;
      break;
    }
    tr.t.push_back(dir * done);
    tr.s.push_back(y[0]);
    tr.x.push_back(p);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Strong normal line bundle.

struct NormalBundleSample {
  std::array<double, 2> direction{0.0, 1.0};  // (X, d_s) components
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

// X.(g/f) at fixed s by central differences along the flow.
inline double x_deriv_g_over_f(const InterpolationSystem& sys, double s,
                               const Vec3& p) {
  constexpr double h = 1e-6;
  const FlowModel& m = *sys.model;
  const double up = liouville_field(sys, s, m.flow_step(p, h)).g_over_f;
  const double dn = liouville_field(sys, s, m.flow_step(p, -h)).g_over_f;
  return (up - dn) / (2.0 * h);
}

}  // namespace detail

// Power iteration for the repelling line inside span(X, d_s) along the
// skeleton orbit of x.  The synchronized field X + (g/f) d_s has the
// triangular frame cocycle [[0, 0], [X.(g/f), d_s(g/f)]], so the pushforward
// is integrated in X-time; directions are renormalized each block and the
// residual is the sine of the angle between successive directions.
inline NormalBundleSample strong_normal_direction(
    const InterpolationSystem& sys, const Vec3& x, double T_step, int iters,
    double tol = 1e-8, std::array<double, 2> start = {0.0, 1.0}) {
  if (iters < 1) throw std::invalid_argument("strong normal: iters >= 1");
  if (!(T_step > 0.0))
    throw std::invalid_argument("strong normal: T_step > 0");
  const FlowModel& m = *sys.model;
  Vec3 p = m.wrap(x);
  double s = skeleton_solve(sys, p);
  double va = start[0], vb = start[1];
  {
    const double n = std::hypot(va, vb);
    if (!(n > 0.0))
      throw std::invalid_argument("strong normal: zero start direction");
    va /= n;
    vb /= n;
  }
  double pa = va, pb = vb;
  const int nsub = std::max(1, static_cast<int>(std::ceil(T_step / 1e-2)));
  const double dt = T_step / nsub;
  NormalBundleSample out;
  for (int it = 1; it <= iters; ++it) {
    for (int k = 0; k < nsub; ++k) {
      // State (tau, s, va, vb) with the base point advanced by flow_step.
      const auto deriv = [&](const std::array<double, 4>& st) {
        const Vec3 q = m.flow_step(p, st[0]);
        const LiouvilleField lf = liouville_field(sys, st[1], q);
        const double c = detail::x_deriv_g_over_f(sys, st[1], q);
        return std::array<double, 4>{
            1.0, lf.g_over_f, 0.0,
            c * st[2] + lf.d_s_g_over_f * st[3]};
      };
      const auto next =
          rk4_step<4>(std::array<double, 4>{0.0, s, va, vb}, dt, deriv);
      p = m.flow_step(p, dt);
      s = next[1];
      va = next[2];
      vb = next[3];
    }
    s = skeleton_solve(sys, p);  // snap RK4 tangency drift
    const double n = std::hypot(va, vb);
    va /= n;
    vb /= n;
    if (vb < 0.0 || (vb == 0.0 && va < 0.0)) {
      va = -va;
      vb = -vb;
    }
    out.residual = std::abs(pa * vb - pb * va);
    out.iterations = it;
    if (out.residual < tol) {
      out.direction = {va, vb};
      return out;
    }
    pa = va;
    pb = vb;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "strong normal: no convergence after %d iterations "
                "(residual=%.3g)",
                iters, out.residual);
  throw std::runtime_error(buf);
}

// ---------------------------------------------------------------------------
// Normal hyperbolicity dichotomy at the skeleton.

struct NHReport {
  double tangential = 0.0;
  double normal = 0.0;
  bool holds = false;
};

inline NHReport nh_dichotomy(const InterpolationSystem& sys, const Vec3& x) {
  const double s_star = skeleton_solve(sys, x);
  const LiouvilleField lf = liouville_field(sys, s_star, x);
  const Rates rt = sys.model->expansion_rates(x);
  NHReport out;
  out.tangential = std::max(1.0, 1.0 + rt.r_s * lf.f);
  out.normal = lf.f * normal_expansion(sys, x);
  out.holds = out.tangential < out.normal;
  return out;
}

}  // namespace liv
