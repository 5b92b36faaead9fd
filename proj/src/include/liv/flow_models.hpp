#pragma once

// Concrete 3-flow models: the cat-map suspension (global Anosov model, in
// eigencoordinates so the adapted frame is the coordinate frame), a local
// geodesic-type frame with unit rates, a constant-rate test frame, and the
// DA chart around a blown-up periodic orbit.
//
// Every model exposes the expansion rates (r_u, r_s) of the adapted coframe
// at a point, the flow map, fundamental-domain reduction, and the chart
// components of X.  Rates are per-point values; all formulas downstream
// consume them pointwise.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "liv/numerics.hpp"

namespace liv {

struct Rates {
  double r_u = 0.0;
  double r_s = 0.0;
};

class FlowModel {
 public:
  virtual ~FlowModel() = default;
  virtual const std::string& name() const = 0;
  int point_dim() const { return 3; }
  virtual Rates expansion_rates(const Vec3& p) const = 0;
  // Advances by dt (any sign) and returns a fundamental-domain point.
  virtual Vec3 flow_step(const Vec3& p, double dt) const = 0;
  virtual Vec3 wrap(const Vec3& p) const = 0;
  // Chart components of X at p.
  virtual Vec3 velocity(const Vec3& p) const = 0;
  // Coordinate box for sampling sweeps: a fundamental domain for compact
  // models, a unit window for local charts.
  virtual std::array<std::array<double, 2>, 3> sample_box() const = 0;
};

using ModelPtr = std::shared_ptr<const FlowModel>;

// ---------------------------------------------------------------------------
// Cat-map suspension.  Points (u, v, theta), theta mod 1, with the gluing
// (u, v, 1) == (lambda u, lambda^{-1} v, 0), lambda the leading eigenvalue
// of [[2,1],[1,1]].  X = d_theta, constant rates (ln lambda, -ln lambda).

class CatSuspension final : public FlowModel {
 public:
  static double lambda() { return 0.5 * (3.0 + std::sqrt(5.0)); }

  const std::string& name() const override {
    static const std::string n = "cat";
    return n;
  }

  Rates expansion_rates(const Vec3&) const override {
    const double r = std::log(lambda());
    return {r, -r};
  }

  Vec3 wrap(const Vec3& p) const override { return reduce(p[0], p[1], p[2]); }

  Vec3 flow_step(const Vec3& p, double dt) const override {
    return reduce(p[0], p[1], p[2] + dt);
  }

  Vec3 velocity(const Vec3&) const override { return {0.0, 0.0, 1.0}; }

  std::array<std::array<double, 2>, 3> sample_box() const override {
    return {{{-1.0, 1.0}, {-1.0, 1.0}, {0.0, 1.0}}};
  }

 private:
  // Gluing applied once per unit crossing; repeated multiplication keeps
  // composed steps bit-consistent with single steps.
  static Vec3 reduce(double u, double v, double theta) {
    const double lam = lambda();
    double k = std::floor(theta);
    for (; k >= 1.0; k -= 1.0) {
      u *= lam;
      v /= lam;
    }
    for (; k <= -1.0; k += 1.0) {
      u /= lam;
      v *= lam;
    }
    double t = theta - std::floor(theta);
    if (t >= 1.0) t = 0.0;  // guard against rounding at the seam
    return {u, v, t};
  }
};

inline ModelPtr cat_suspension() { return std::make_shared<CatSuspension>(); }

// ---------------------------------------------------------------------------
// Local geodesic-type frame: non-compact, constant rates (1, -1), used for
// pointwise identity checks only.

class GeodesicFrameLocal final : public FlowModel {
 public:
  const std::string& name() const override {
    static const std::string n = "geodesic-local";
    return n;
  }
  Rates expansion_rates(const Vec3&) const override { return {1.0, -1.0}; }
  Vec3 wrap(const Vec3& p) const override { return p; }
  Vec3 flow_step(const Vec3& p, double dt) const override {
    return {p[0], p[1], p[2] + dt};
  }
  Vec3 velocity(const Vec3&) const override { return {0.0, 0.0, 1.0}; }
  std::array<std::array<double, 2>, 3> sample_box() const override {
    return {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  }
};

inline ModelPtr geodesic_frame_local() {
  return std::make_shared<GeodesicFrameLocal>();
}

// Constant-rate frame for closed-form comparisons in tests.
class ConstRateModel final : public FlowModel {
 public:
  ConstRateModel(double r_u, double r_s) : rates_{r_u, r_s} {
    if (!(r_u > r_s) || !(r_u > 0.0))
      throw std::invalid_argument("const-rate model needs r_u > r_s, r_u > 0");
  }
  const std::string& name() const override {
    static const std::string n = "const-rate";
    return n;
  }
  Rates expansion_rates(const Vec3&) const override { return rates_; }
  Vec3 wrap(const Vec3& p) const override { return p; }
  Vec3 flow_step(const Vec3& p, double dt) const override {
    return {p[0], p[1], p[2] + dt};
  }
  Vec3 velocity(const Vec3&) const override { return {0.0, 0.0, 1.0}; }
  std::array<std::array<double, 2>, 3> sample_box() const override {
    return {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  }

 private:
  Rates rates_;
};

inline ModelPtr const_rate_model(double r_u, double r_s) {
  return std::make_shared<ConstRateModel>(r_u, r_s);
}

// ---------------------------------------------------------------------------
// DA chart.  [-1,1]_x x [-1,1]_y x R_theta / T Z around a periodic orbit,
// X_eta = nuhat x d_x + mu y d_y + d_theta, where the stable rate nu is
// deformed to nubar on a support of radius eta via the C^1 bump
// phi(t) = (1 - t^2)^2 restricted to [-1,1].

struct DAParams {
  double nu = -1.0;     // stable eigen-rate, < 0
  double mu = 1.0;      // unstable eigen-rate, > 0
  double nubar = 0.5;   // deformed rate at the orbit, < mu
  double eta = 0.5;     // support radius in (0,1)
  double T = 1.0;       // orbit period

  void validate() const {
    if (!(mu > 0.0) || !(nu < 0.0))
      throw std::invalid_argument("da: need mu > 0 > nu");
    if (!(nubar < mu)) throw std::invalid_argument("da: need nubar < mu");
    if (!(eta > 0.0 && eta < 1.0))
      throw std::invalid_argument("da: need eta in (0,1)");
    if (!(T > 0.0)) throw std::invalid_argument("da: need T > 0");
  }
};

inline double da_phi(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return q * q;
}

inline double da_dphi(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  return -4.0 * t * (1.0 - t * t);
}

inline double da_nuhat(const DAParams& p, double x, double y) {
  return p.nu + (p.nubar - p.nu) * da_phi(x / p.eta) * da_phi(y / p.eta);
}

inline double da_dx_nuhat(const DAParams& p, double x, double y) {
  return (p.nubar - p.nu) * da_dphi(x / p.eta) * da_phi(y / p.eta) / p.eta;
}

inline double da_dy_nuhat(const DAParams& p, double x, double y) {
  return (p.nubar - p.nu) * da_phi(x / p.eta) * da_dphi(y / p.eta) / p.eta;
}

class DAChartModel final : public FlowModel {
 public:
  explicit DAChartModel(const DAParams& params) : prm_(params) {
    prm_.validate();
  }

  const std::string& name() const override {
    static const std::string n = "da-chart";
    return n;
  }

  const DAParams& params() const { return prm_; }

  // Diagonal coframe rates of the deformed flow: exact on the blown-up
  // orbit and outside the support, coordinate-frame rates elsewhere.
  Rates expansion_rates(const Vec3& p) const override {
    const double rs =
        da_nuhat(prm_, p[0], p[1]) + p[0] * da_dx_nuhat(prm_, p[0], p[1]);
    return {prm_.mu, rs};
  }

  Vec3 wrap(const Vec3& p) const override {
    double t = p[2] - prm_.T * std::floor(p[2] / prm_.T);
    if (t >= prm_.T) t = 0.0;
    return {p[0], p[1], t};
  }

  Vec3 velocity(const Vec3& p) const override {
    return {da_nuhat(prm_, p[0], p[1]) * p[0], prm_.mu * p[1], 1.0};
  }

  std::array<std::array<double, 2>, 3> sample_box() const override {
    return {{{-1.0, 1.0}, {-1.0, 1.0}, {0.0, prm_.T}}};
  }

  // (x, y) integrated with RK4 substeps split on an absolute theta-grid of
  // spacing 2^-12, so composed steps reuse the same split points and the
  // flow property holds to rounding; theta advances exactly by dt.
  Vec3 flow_step(const Vec3& p, double dt) const override {
    static constexpr double kGrid = 1.0 / 4096.0;
    std::array<double, 2> xy{p[0], p[1]};
    const auto rhs = [this](const std::array<double, 2>& s) {
      return std::array<double, 2>{da_nuhat(prm_, s[0], s[1]) * s[0],
                                   prm_.mu * s[1]};
    };
    double a = p[2];
    const double target = p[2] + dt;
    while (a != target) {
      double b;
      if (dt > 0.0) {
        b = (std::floor(a / kGrid) + 1.0) * kGrid;
        if (b > target) b = target;
      } else {
        b = (std::ceil(a / kGrid) - 1.0) * kGrid;
        if (b < target) b = target;
      }
      xy = rk4_step<2>(xy, b - a, rhs);
      a = b;
    }
    return wrap({xy[0], xy[1], target});
  }

 private:
  DAParams prm_;
};

inline ModelPtr da_chart(const DAParams& params) {
  return std::make_shared<DAChartModel>(params);
}

}  // namespace liv
