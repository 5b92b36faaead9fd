#pragma once

// Liouville interpolation systems: a model flow, a bi-contact pair written
// in the (alpha_u, alpha_s) coframe, an interpolation profile, and a
// compact working window in s.  The interpolating form is
//
//   alpha = lambda_- (h_u alpha_u + h_s alpha_s)
//         + lambda_+ (p_u alpha_u - p_s alpha_s),
//
// with (p_u, p_s) = (1, 1) in the canonical exponential decomposition and
// (h_+, 1) for fibration-adapted pairs.  All densities reduce to 2-form
// pairings of coefficient jets.

#include <cstdio>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "liv/fields.hpp"
#include "liv/flow_models.hpp"
#include "liv/forms.hpp"
#include "liv/numerics.hpp"
#include "liv/profile.hpp"

namespace liv {

enum class Gauge { symmetric, exponential_decomposed };

struct BiContactCoeffs {
  ScalarField h_u, h_s;  // minus pair: h_u alpha_u + h_s alpha_s
  ScalarField p_u, p_s;  // plus pair:  p_u alpha_u - p_s alpha_s
  Gauge gauge = Gauge::exponential_decomposed;
  bool fibration = false;  // h_- + h_+ = 2 decomposition, p_s = h_s = 1
};

inline BiContactCoeffs bicontact_exponential(const ScalarField& h_u,
                                             const ScalarField& h_s) {
  return {h_u, h_s, ScalarField::constant(1.0), ScalarField::constant(1.0),
          Gauge::exponential_decomposed, false};
}

inline BiContactCoeffs bicontact_symmetric() {
  const ScalarField one = ScalarField::constant(1.0);
  return {one, one, one, one, Gauge::symmetric, false};
}

// alpha_+ = h_+ alpha_u - alpha_s, alpha_- = (2 - h_+) alpha_u + alpha_s.
inline BiContactCoeffs bicontact_fibration(const ScalarField& h_plus) {
  return {field_affine(2.0, -1.0, h_plus), ScalarField::constant(1.0), h_plus,
          ScalarField::constant(1.0), Gauge::exponential_decomposed, true};
}

struct InterpolationSystem {
  ModelPtr model;
  BiContactCoeffs bicontact;
  Profile profile;
  double window_lo = -1.0;
  double window_hi = 1.0;
  std::string name;
};

namespace detail {

// Evaluation slack past the window edge; finite-difference probes and RK4
// stages may poke slightly outside.
inline double window_slack(const InterpolationSystem& sys) {
  return 0.02 * (sys.window_hi - sys.window_lo) + 1e-9;
}

inline void check_window(const InterpolationSystem& sys, double s) {
  const double slack = window_slack(sys);
  if (s < sys.window_lo - slack || s > sys.window_hi + slack) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "s=%.12g outside working window [%g, %g]",
                  s, sys.window_lo, sys.window_hi);
    throw std::invalid_argument(buf);
  }
}

struct AlphaParts {
  ProfilePair lam;
  Jet2 hu, hs, pu, ps;
};

inline AlphaParts alpha_parts_unchecked(const InterpolationSystem& sys,
                                        double s, const Vec3& x) {
  const FlowModel& m = *sys.model;
  return {sys.profile.lambdas_unchecked(m, s, x), sys.bicontact.h_u.jet2(m, x),
          sys.bicontact.h_s.jet2(m, x), sys.bicontact.p_u.jet2(m, x),
          sys.bicontact.p_s.jet2(m, x)};
}

inline AnnihilatorForm assemble_alpha(const AlphaParts& pa) {
  return {pa.lam.minus * pa.hu + pa.lam.plus * pa.pu,
          pa.lam.minus * pa.hs - pa.lam.plus * pa.ps};
}

// Reversed-orientation pair (alpha_-, -alpha_+).
inline AnnihilatorForm assemble_alpha_reversed(const AlphaParts& pa) {
  return {pa.lam.minus * pa.hu - pa.lam.plus * pa.pu,
          pa.lam.minus * pa.hs + pa.lam.plus * pa.ps};
}

}  // namespace detail

// Coefficient jets of alpha in the (alpha_u, alpha_s) coframe.
inline AnnihilatorForm alpha_coeffs(const InterpolationSystem& sys, double s,
                                    const Vec3& x) {
  detail::check_window(sys, s);
  const detail::AlphaParts pa = detail::alpha_parts_unchecked(sys, s, x);
  if (!(pa.lam.minus.value > 0.0) || !(pa.lam.plus.value > 0.0))
    throw std::invalid_argument("profile: nonpositive lambda at s=" +
                                std::to_string(s));
  return detail::assemble_alpha(pa);
}

// wedge(L_X alpha, L_{d_s} alpha) coefficient; > 0 everywhere is the
// Liouville condition.
inline double liouville_density(const InterpolationSystem& sys, double s,
                                const Vec3& x) {
  const AnnihilatorForm a = alpha_coeffs(sys, s, x);
  const Rates rt = sys.model->expansion_rates(x);
  return wedge(lie_X(a, rt.r_u, rt.r_s), lie_s(a)).coeff;
}

// Same pairing for the reversed-orientation pair; positive everywhere only
// for genuinely Anosov models.
inline double liouville_density_reversed(const InterpolationSystem& sys,
                                         double s, const Vec3& x) {
  detail::check_window(sys, s);
  const AnnihilatorForm a =
      detail::assemble_alpha_reversed(detail::alpha_parts_unchecked(sys, s, x));
  const Rates rt = sys.model->expansion_rates(x);
  return wedge(lie_X(a, rt.r_u, rt.r_s), lie_s(a)).coeff;
}

struct ContactDensities {
  double c_plus = 0.0;
  double c_minus = 0.0;
};

// Contactness brackets of the two pair legs: X.ln(p_u/p_s) + (r_u - r_s)
// and X.ln(h_u/h_s) + (r_u - r_s).  Both must be positive.
inline ContactDensities contact_densities(const InterpolationSystem& sys,
                                          const Vec3& x) {
  const FlowModel& m = *sys.model;
  const Rates rt = m.expansion_rates(x);
  const double delta = rt.r_u - rt.r_s;
  const MJet hu = sys.bicontact.h_u.eval(m, x);
  const MJet hs = sys.bicontact.h_s.eval(m, x);
  const MJet pu = sys.bicontact.p_u.eval(m, x);
  const MJet ps = sys.bicontact.p_s.eval(m, x);
  return {pu.d_X / pu.value - ps.d_X / ps.value + delta,
          hu.d_X / hu.value - hs.d_X / hs.value + delta};
}

// Contact pairing of the restriction of alpha to the slice M x {s}; negative
// at the lower boundary and positive at the upper one for a compact LIS.
inline double boundary_restriction_density(const InterpolationSystem& sys,
                                           double s, const Vec3& x) {
  const AnnihilatorForm a = alpha_coeffs(sys, s, x);
  const Rates rt = sys.model->expansion_rates(x);
  const double A = a.E.d_X + rt.r_u * a.E.value;
  const double C = a.F.d_X + rt.r_s * a.F.value;
  return a.E.value * C - a.F.value * A;
}

struct FibrationMin {
  double closed_form_min = 0.0;
  double sampled_min = 0.0;
  double difference = 0.0;
};

// For the fibration decomposition (h_- + h_+ = 2, exponential profile) the
// density is A e^{2s} + B' e^{-2s} + 2(r_s + r_u) and its minimum over s has
// the closed form 2 sqrt((2 delta - B) B) + 2(r_s + r_u), B = X.h_+ + h_+ delta.
inline FibrationMin fibration_min_check(const InterpolationSystem& sys,
                                        const Vec3& x, int grid_n = 10000) {
  const FlowModel& m = *sys.model;
  if (sys.bicontact.gauge != Gauge::exponential_decomposed)
    throw std::invalid_argument("fibration check: needs exponential gauge");
  if (sys.profile.base_kind() != ProfileKind::exponential ||
      !sys.profile.transforms().empty())
    throw std::invalid_argument("fibration check: needs the plain exponential profile");
  const MJet hu = sys.bicontact.h_u.eval(m, x);
  const MJet hs = sys.bicontact.h_s.eval(m, x);
  const MJet pu = sys.bicontact.p_u.eval(m, x);
  const MJet ps = sys.bicontact.p_s.eval(m, x);
  if (std::abs(ps.value - 1.0) > 1e-12 || std::abs(hs.value - 1.0) > 1e-12 ||
      std::abs(hu.value + pu.value - 2.0) > 1e-12)
    throw std::invalid_argument(
        "fibration check: needs the h_- + h_+ = 2 decomposition");
  const Rates rt = m.expansion_rates(x);
  const double delta = rt.r_u - rt.r_s;
  const double B = pu.d_X + pu.value * delta;
  if (B <= 0.0 || B >= 2.0 * delta) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "contactness violation: B=%.6g outside (0, %.6g)", B,
                  2.0 * delta);
    throw std::domain_error(buf);
  }
  FibrationMin out;
  out.closed_form_min =
      2.0 * std::sqrt((2.0 * delta - B) * B) + 2.0 * (rt.r_s + rt.r_u);

  // Grid scan plus ternary refinement; the density is convex in s here.
  const double lo = sys.window_lo, hi = sys.window_hi;
  const double ds = (hi - lo) / grid_n;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= grid_n; ++i) {
    const double v = liouville_density(sys, lo + i * ds, x);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + std::max(0, best_i - 1) * ds;
  double b = lo + std::min(grid_n, best_i + 1) * ds;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (liouville_density(sys, m1, x) < liouville_density(sys, m2, x))
      b = m2;
    else
      a = m1;
  }
  out.sampled_min = std::min(best, liouville_density(sys, 0.5 * (a + b), x));
  out.difference = std::abs(out.closed_form_min - out.sampled_min);
  return out;
}

// (alpha_-, alpha_+) -> (e^{z_-} alpha_-, e^{z_+} alpha_+) with profiles
// rescaled by e^{-z_mp}: alpha is unchanged pointwise.
inline InterpolationSystem change_of_basis(const InterpolationSystem& sys,
                                           const ScalarField& z_minus,
                                           const ScalarField& z_plus) {
  InterpolationSystem out = sys;
  out.bicontact.h_u = field_product(field_exp(z_minus), sys.bicontact.h_u);
  out.bicontact.h_s = field_product(field_exp(z_minus), sys.bicontact.h_s);
  out.bicontact.p_u = field_product(field_exp(z_plus), sys.bicontact.p_u);
  out.bicontact.p_s = field_product(field_exp(z_plus), sys.bicontact.p_s);
  out.bicontact.fibration = false;
  out.profile = sys.profile.with_basis(z_minus, z_plus);
  out.name = sys.name + "+basis";
  return out;
}

// Horizontal reparametrization psi(s,x) = a s + b(x); the window is
// transported by the range of psi over the sample box.
inline InterpolationSystem horizontal_map(const InterpolationSystem& sys,
                                          double a, const ScalarField& b) {
  if (!(a > 0.0))
    throw std::invalid_argument("horizontal map: nonmonotone (need a > 0)");
  InterpolationSystem out = sys;
  out.profile = sys.profile.with_horizontal(a, b);
  double b_lo = 0.0, b_hi = 0.0;
  if (!b.empty()) {
    b_lo = std::numeric_limits<double>::infinity();
    b_hi = -b_lo;
    const auto box = sys.model->sample_box();
    for (int i = 0; i < 256; ++i) {
      const double t = i / 255.0;
      const Vec3 p{box[0][0] + t * (box[0][1] - box[0][0]),
                   box[1][0] + t * (box[1][1] - box[1][0]),
                   box[2][0] + t * (box[2][1] - box[2][0])};
      const double v = b.eval(*sys.model, p).value;
      b_lo = std::min(b_lo, v);
      b_hi = std::max(b_hi, v);
    }
  }
  out.window_lo = a * sys.window_lo + b_lo;
  out.window_hi = a * sys.window_hi + b_hi;
  out.name = sys.name + "+horizontal";
  return out;
}

// alpha -> e^{fscale} alpha.  Admissibility Y0.fscale > -1 is swept over the
// window before the transform is accepted.
inline InterpolationSystem scaling_map(const InterpolationSystem& sys,
                                       const SXField& fscale) {
  const FlowModel& m = *sys.model;
  const auto box = m.sample_box();
  const int ns = 33, nx = 64;
  for (int i = 0; i <= ns; ++i) {
    const double s =
        sys.window_lo + (sys.window_hi - sys.window_lo) * i / double(ns);
    for (int j = 0; j < nx; ++j) {
      const double t = j / double(nx);
      const Vec3 x{box[0][0] + t * (box[0][1] - box[0][0]),
                   box[1][0] + t * (box[1][1] - box[1][0]),
                   box[2][0] + t * (box[2][1] - box[2][0])};
      const AnnihilatorForm a =
          detail::assemble_alpha(detail::alpha_parts_unchecked(sys, s, x));
      const Rates rt = m.expansion_rates(x);
      const DefiningSolve sol = solve_defining_identity(a, rt.r_u, rt.r_s);
      const Jet2 w = fscale.eval(m, s, x);
      const double adm = sol.f * w.d_X + sol.g * w.d_s;
      if (!(adm > -1.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "scaling map: Y0.fscale = %.6g <= -1 at (s=%.6g, "
                      "theta=%.6g)",
                      adm, s, x[2]);
        throw std::invalid_argument(buf);
      }
    }
  }
  InterpolationSystem out = sys;
  out.profile = sys.profile.with_scale(fscale);
  out.name = sys.name + "+scale";
  return out;
}

// ---------------------------------------------------------------------------
// Validation sweep.

struct ValidationOptions {
  int grid_n = 64;       // grid points per axis (s, theta, box diagonal)
  int n_random = 1000;   // uniform random points over window x box
  std::uint64_t seed = 81;
  int threads = 1;
};

struct ValidationReport {
  bool ok = false;
  double min_density = 0.0;
  double argmin_s = 0.0;
  Vec3 argmin_x{0.0, 0.0, 0.0};
  double min_c_plus = 0.0;
  double min_c_minus = 0.0;
  double min_lambda = 0.0;
  double min_monotone = 0.0;     // min of d/ds ln(lambda_+/lambda_-)
  double min_field_value = 0.0;  // min over h_u, h_s, p_u, p_s samples
  double boundary_lo_max = 0.0;  // must stay < 0
  double boundary_hi_min = 0.0;  // must stay > 0
  std::size_t n_sampled = 0;
  std::string failure;
};

// Sweeps density positivity, coefficient positivity, profile monotonicity,
// contact brackets, and compact-boundary signs over an n^3 grid
// (s x theta x box diagonal) plus seeded random points.
inline ValidationReport validate_system(const InterpolationSystem& sys,
                                        const ValidationOptions& opts = {}) {
  const FlowModel& m = *sys.model;
  const auto box = m.sample_box();
  const int n = std::max(opts.grid_n, 2);
  std::vector<std::pair<double, Vec3>> pts;
  pts.reserve(static_cast<std::size_t>(n) * n * n + opts.n_random);
  for (int i = 0; i < n; ++i) {
    const double s =
        sys.window_lo + (sys.window_hi - sys.window_lo) * i / double(n - 1);
    for (int j = 0; j < n; ++j) {
      const double th = box[2][0] + (box[2][1] - box[2][0]) * j / double(n);
      for (int k = 0; k < n; ++k) {
        const double t = k / double(n - 1);
        pts.push_back({s,
                       {box[0][0] + t * (box[0][1] - box[0][0]),
                        box[1][0] + t * (box[1][1] - box[1][0]), th}});
      }
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < opts.n_random; ++i) {
    const double s =
        sys.window_lo + (sys.window_hi - sys.window_lo) * uni(rng);
    Vec3 x;
    for (int c = 0; c < 3; ++c)
      x[static_cast<std::size_t>(c)] =
          box[static_cast<std::size_t>(c)][0] +
          (box[static_cast<std::size_t>(c)][1] -
           box[static_cast<std::size_t>(c)][0]) *
              uni(rng);
    pts.push_back({s, x});
  }

  struct Row {
    double density, lambda_min, monotone, field_min;
  };
  std::vector<Row> rows(pts.size());
  parallel_for(pts.size(), opts.threads, [&](std::size_t i) {
    const auto& [s, x] = pts[i];
    const detail::AlphaParts pa = detail::alpha_parts_unchecked(sys, s, x);
    const AnnihilatorForm a = detail::assemble_alpha(pa);
    const Rates rt = m.expansion_rates(x);
    Row& r = rows[i];
    r.density = wedge(lie_X(a, rt.r_u, rt.r_s), lie_s(a)).coeff;
    r.lambda_min = std::min(pa.lam.minus.value, pa.lam.plus.value);
    r.monotone = pa.lam.plus.d_s / pa.lam.plus.value -
                 pa.lam.minus.d_s / pa.lam.minus.value;
    r.field_min = std::min(std::min(pa.hu.value, pa.hs.value),
                           std::min(pa.pu.value, pa.ps.value));
  });

  ValidationReport rep;
  rep.n_sampled = pts.size();
  rep.min_density = std::numeric_limits<double>::infinity();
  rep.min_lambda = rep.min_monotone = rep.min_field_value = rep.min_density;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].density < rep.min_density) {
      rep.min_density = rows[i].density;
      rep.argmin_s = pts[i].first;
      rep.argmin_x = pts[i].second;
    }
    rep.min_lambda = std::min(rep.min_lambda, rows[i].lambda_min);
    rep.min_monotone = std::min(rep.min_monotone, rows[i].monotone);
    rep.min_field_value = std::min(rep.min_field_value, rows[i].field_min);
  }

  rep.min_c_plus = std::numeric_limits<double>::infinity();
  rep.min_c_minus = rep.min_c_plus;
  rep.boundary_lo_max = -std::numeric_limits<double>::infinity();
  rep.boundary_hi_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double th = box[2][0] + (box[2][1] - box[2][0]) * j / double(n);
    for (int k = 0; k < n; ++k) {
      const double t = k / double(n - 1);
      const Vec3 x{box[0][0] + t * (box[0][1] - box[0][0]),
                   box[1][0] + t * (box[1][1] - box[1][0]), th};
      const ContactDensities cd = contact_densities(sys, x);
      rep.min_c_plus = std::min(rep.min_c_plus, cd.c_plus);
      rep.min_c_minus = std::min(rep.min_c_minus, cd.c_minus);
      rep.boundary_lo_max = std::max(
          rep.boundary_lo_max,
          boundary_restriction_density(sys, sys.window_lo, x));
      rep.boundary_hi_min = std::min(
          rep.boundary_hi_min,
          boundary_restriction_density(sys, sys.window_hi, x));
    }
  }

  const auto fail = [&rep](const std::string& why) {
    if (rep.failure.empty()) rep.failure = why;
  };
  if (!(rep.min_field_value > 1e-9))
    fail("coefficient field at or below 1e-9");
  if (!(rep.min_lambda > 0.0)) fail("nonpositive profile value");
  if (!(rep.min_monotone > 0.0)) fail("profile monotonicity violated");
  if (!(rep.min_density > 0.0)) fail("liouville density not positive");
  if (!(rep.min_c_plus > 0.0) || !(rep.min_c_minus > 0.0))
    fail("contact bracket not positive");
  if (!(rep.boundary_lo_max < 0.0) || !(rep.boundary_hi_min > 0.0))
    fail("boundary restriction has wrong contact sign");
  rep.ok = rep.failure.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Shipped example systems.

inline std::vector<InterpolationSystem> bundled_systems() {
  std::vector<InterpolationSystem> out;
  const ScalarField one = ScalarField::constant(1.0);
  {
    InterpolationSystem s{cat_suspension(), bicontact_exponential(one, one),
                          Profile::exponential(), -2.5, 2.5,
                          "exp-symmetric-cat"};
    out.push_back(s);
  }
  {
    // Amplitude 0.5 needs a rate gap above 2*pi*0.5/sqrt(0.75) ~ 3.63 for
    // the h-pair to stay contact at every theta, so this one lives on the
    // constant-rate hyperbolic host rather than the cat suspension.
    InterpolationSystem s{const_rate_model(2.5, -2.5),
                          bicontact_exponential(one, ScalarField::cos_theta(0.5)),
                          Profile::exponential(), -2.5, 2.5, "exp-cos-rate"};
    out.push_back(s);
  }
  {
    InterpolationSystem s{cat_suspension(), bicontact_symmetric(),
                          Profile::linear(), -0.9, 0.9, "linear-symmetric-cat"};
    out.push_back(s);
  }
  {
    // Distorted profile w = 0.1 cos(s) (1 + 0.5 cos 2 pi theta).
    const SXField w = SXField::separable({SShape::kCos, 0.1, 1.0},
                                         ScalarField::cos_theta(0.5));
    InterpolationSystem s{cat_suspension(), bicontact_exponential(one, one),
                          Profile::general(w), -2.0, 2.0,
                          "general-profile-cat"};
    out.push_back(s);
  }
  {
    InterpolationSystem s{geodesic_frame_local(),
                          bicontact_exponential(one, one),
                          Profile::exponential(), -2.5, 2.5, "geodesic-local"};
    out.push_back(s);
  }
  return out;
}

}  // namespace liv
