#pragma once

// Derived-from-Anosov deformation in the periodic-orbit chart: the deformed
// vector field X_eta, the deformed pair
//
//   abar_pm = dy -+ dx + (+-nuhat x - mu y) dtheta,
//
// contact densities with the polynomial factor A(x, y), the 4-form
// coefficient of the linear interpolation at the skeleton slice, and the
// cone criterion for surviving partial hyperbolicity.  All exterior
// derivatives here are assembled from the explicit polynomial coefficients.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "liv/flow_models.hpp"
#include "liv/numerics.hpp"

namespace liv {

inline Vec3 da_vector_field(const DAParams& p, const Vec3& pt) {
  return {da_nuhat(p, pt[0], pt[1]) * pt[0], p.mu * pt[1], 1.0};
}

// A(x,y) = (1-x^2)(1-y^2)[(1-5x^2)(1-y^2) - 4xy(1-x^2)] on [-1,1]^2;
// unique maximum A(0,0) = 1 drives the deformed density minima.
inline double a_polynomial(double x, double y) {
  const double qx = 1.0 - x * x;
  const double qy = 1.0 - y * y;
  return qx * qy * ((1.0 - 5.0 * x * x) * qy - 4.0 * x * y * qx);
}

// Coefficient of dx ^ dy ^ dtheta in abar_pm ^ dabar_pm.  The plus leg must
// stay positive and the minus leg negative for admissible parameters.
inline double deformed_contact_density(const DAParams& p, int sign,
                                       const Vec3& pt) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("deformed contact density: sign is +-1");
  const double base = p.mu - p.nu;
  const double dev = p.nu - p.nubar;
  const double x = pt[0] / p.eta, y = pt[1] / p.eta;
  // phi clips to zero outside the support square, so the polynomial term
  // only contributes inside it.
  const double a = (std::abs(x) < 1.0 && std::abs(y) < 1.0)
                       ? a_polynomial(sign > 0 ? x : -x, y)
                       : 0.0;
  if (sign == 1) return base + dev * a;
  return -(base + dev * a);
}

// (dx, dy, dtheta) components of abar = (1-s) abar_- + (1+s) abar_+.
inline std::array<double, 3> da_interp_form(const DAParams& p, double s,
                                            double x, double y) {
  const double nh = da_nuhat(p, x, y);
  return {-2.0 * s, 2.0, 2.0 * s * nh * x - 2.0 * p.mu * y};
}

// Same for the reversed-orientation pair (abar_-, -abar_+).
inline std::array<double, 3> da_interp_form_reversed(const DAParams& p,
                                                     double s, double x,
                                                     double y) {
  const double nh = da_nuhat(p, x, y);
  return {2.0, -2.0 * s, -2.0 * nh * x + 2.0 * s * p.mu * y};
}

namespace detail {

// dalpha ^ dalpha coefficient of ds^dx^dy^dtheta from the six 2-form
// components c_ij of dalpha = sum c_ij dx_i ^ dx_j (coordinates s,x,y,theta):
// 2 (c_sx c_ytheta - c_sy c_xtheta + c_stheta c_xy).
struct TwoFormComponents {
  double sx = 0.0, sy = 0.0, stheta = 0.0, xy = 0.0, xtheta = 0.0,
         ytheta = 0.0;
};

inline double square_to_volume(const TwoFormComponents& c) {
  return 2.0 * (c.sx * c.ytheta - c.sy * c.xtheta + c.stheta * c.xy);
}

inline TwoFormComponents da_dalpha(const DAParams& p, double s, double x,
                                   double y) {
  const double nh = da_nuhat(p, x, y);
  const double dxnh = da_dx_nuhat(p, x, y);
  const double dynh = da_dy_nuhat(p, x, y);
  TwoFormComponents c;
  c.sx = -2.0;
  c.sy = 0.0;
  c.stheta = 2.0 * nh * x;
  c.xy = 0.0;
  c.xtheta = 2.0 * s * (nh + x * dxnh);
  c.ytheta = 2.0 * s * x * dynh - 2.0 * p.mu;
  return c;
}

inline TwoFormComponents da_dalpha_reversed(const DAParams& p, double s,
                                            double x, double y) {
  const double nh = da_nuhat(p, x, y);
  const double dxnh = da_dx_nuhat(p, x, y);
  const double dynh = da_dy_nuhat(p, x, y);
  TwoFormComponents c;
  c.sx = 0.0;
  c.sy = -2.0;
  c.stheta = 2.0 * p.mu * y;
  c.xy = 0.0;
  c.xtheta = -2.0 * (nh + x * dxnh);
  c.ytheta = -2.0 * x * dynh + 2.0 * s * p.mu;
  return c;
}

}  // namespace detail

// Liouville 4-form coefficient of the linear pair, halved to the single
// cross-pairing normalization used by the interpolation densities.
inline double da_liouville_coeff(const DAParams& p, double s, double x,
                                 double y) {
  return 0.5 * detail::square_to_volume(detail::da_dalpha(p, s, x, y));
}

inline double da_reversed_liouville_coeff(const DAParams& p, double s,
                                          double x, double y) {
  return 0.5 *
         detail::square_to_volume(detail::da_dalpha_reversed(p, s, x, y));
}

struct DALiouvilleScan {
  double min_coeff = 0.0;
  double max_dev = 0.0;  // max |coeff - 4 mu| over the grid
};

// Scans the 4-form coefficient at the skeleton slice s = 0 over an
// (x, y) grid; analytically the value is 4 mu everywhere.
inline DALiouvilleScan da_liouville_at_skeleton(const DAParams& p,
                                                int grid_n) {
  if (grid_n < 2)
    throw std::invalid_argument("da liouville scan: grid_n >= 2");
  DALiouvilleScan out;
  out.min_coeff = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_n; ++i) {
    const double x = -1.0 + 2.0 * i / (grid_n - 1.0);
    for (int j = 0; j < grid_n; ++j) {
      const double y = -1.0 + 2.0 * j / (grid_n - 1.0);
      const double v = da_liouville_coeff(p, 0.0, x, y);
      out.min_coeff = std::min(out.min_coeff, v);
      out.max_dev = std::max(out.max_dev, std::abs(v - 4.0 * p.mu));
    }
  }
  return out;
}

struct DAReport {
  double min_contact_plus = 0.0;
  // Signed maximum of the minus-leg density; certification requires < 0.
  double min_contact_minus = 0.0;
  double liouville_at_zero = 0.0;
  int grid = 0;
  Vec3 argmin{0.0, 0.0, 0.0};  // chart point of the plus-density minimum
};

inline DAReport da_report(const DAParams& p, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("da report: grid_n >= 2");
  p.validate();
  DAReport rep;
  rep.grid = grid_n;
  rep.min_contact_plus = std::numeric_limits<double>::infinity();
  rep.min_contact_minus = -rep.min_contact_plus;
  for (int i = 0; i < grid_n; ++i) {
    const double x = -1.0 + 2.0 * i / (grid_n - 1.0);
    for (int j = 0; j < grid_n; ++j) {
      const double y = -1.0 + 2.0 * j / (grid_n - 1.0);
      const Vec3 pt{x, y, 0.0};
      const double plus = deformed_contact_density(p, +1, pt);
      if (plus < rep.min_contact_plus) {
        rep.min_contact_plus = plus;
        rep.argmin = pt;
      }
      rep.min_contact_minus =
          std::max(rep.min_contact_minus, deformed_contact_density(p, -1, pt));
    }
  }
  rep.liouville_at_zero = da_liouville_at_skeleton(p, grid_n).min_coeff;
  return rep;
}

// ---------------------------------------------------------------------------
// Cone criterion.

struct ConeCheck {
  bool passed = false;
  double contraction = 0.0;  // worst |v_x| / (slope |v_y|) over starts/rays
};

// Integrates the linearized (x, y) flow of X_eta from a grid of starts and
// checks that the y-cone {|v_x| <= slope |v_y|} maps strictly into itself
// after time T_total (a multiple of the period).
inline ConeCheck cone_domination_check(const DAParams& p, double T_total,
                                       double cone_slope, int grid_n = 5) {
  p.validate();
  if (!(cone_slope > 0.0) || !std::isfinite(cone_slope))
    throw std::invalid_argument("cone check: cone_slope must be finite > 0");
  const double m = T_total / p.T;
  if (!(T_total > 0.0) || std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
    throw std::invalid_argument(
        "cone check: T_total must be a positive multiple of the period");
  if (grid_n < 2) throw std::invalid_argument("cone check: grid_n >= 2");

  const auto deriv = [&p](const std::array<double, 6>& st) {
    const double x = st[0], y = st[1];
    const double nh = da_nuhat(p, x, y);
    const double jxx = nh + x * da_dx_nuhat(p, x, y);
    const double jxy = x * da_dy_nuhat(p, x, y);
    return std::array<double, 6>{nh * x,
                                 p.mu * y,
                                 jxx * st[2] + jxy * st[3],
                                 p.mu * st[3],
                                 jxx * st[4] + jxy * st[5],
                                 p.mu * st[5]};
  };

  ConeCheck out;
  const double dt = 1e-2;
  const int steps = static_cast<int>(std::round(T_total / dt));
  for (int i = 0; i < grid_n; ++i) {
    const double x0 = -1.0 + 2.0 * i / (grid_n - 1.0);
    for (int j = 0; j < grid_n; ++j) {
      const double y0 = -1.0 + 2.0 * j / (grid_n - 1.0);
      std::array<double, 6> st{x0, y0, cone_slope, 1.0, -cone_slope, 1.0};
      for (int k = 0; k < steps; ++k) st = rk4_step<6>(st, dt, deriv);
      const double ra = std::abs(st[2]) / (cone_slope * std::abs(st[3]));
      const double rb = std::abs(st[4]) / (cone_slope * std::abs(st[5]));
      out.contraction = std::max(out.contraction, std::max(ra, rb));
    }
  }
  out.passed = out.contraction < 1.0;
  return out;
}

}  // namespace liv
