#pragma once

// Interpolation profiles (lambda_-, lambda_+) as Jet2 evaluators in (s, x),
// plus the transform stack produced by the elementary maps: horizontal
// reparametrizations psi(s,x) = a s + b(x), conformal scalings by e^{c(s,x)},
// and basis rescalings lambda_mp -> e^{-z_mp} lambda_mp.
//
// Base families:
//   linear       lambda_mp = 1 -+ s        (valid on subwindows of (-1,1))
//   exponential  lambda_mp = e^{-+s}
//   general      lambda_mp = e^{-+s + w(s,x)}  with distortion w

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liv/fields.hpp"
#include "liv/jet.hpp"

namespace liv {

enum class ProfileKind { linear, exponential, general };

// Separable fields on R_s x M: sums of shape(s) * base(x) terms with
// analytic second-order s-jets.
struct SShape {
  enum Kind { kConst, kLinear, kCos, kSin } kind = kConst;
  double c0 = 0.0;  // constant / offset / amplitude
  double c1 = 0.0;  // slope / frequency

  // (value, d_s, d_ss) at s
  std::array<double, 3> at(double s) const {
    switch (kind) {
      case kConst: return {c0, 0.0, 0.0};
      case kLinear: return {c0 + c1 * s, c1, 0.0};
      case kCos:
        return {c0 * std::cos(c1 * s), -c0 * c1 * std::sin(c1 * s),
                -c0 * c1 * c1 * std::cos(c1 * s)};
      case kSin:
        return {c0 * std::sin(c1 * s), c0 * c1 * std::cos(c1 * s),
                -c0 * c1 * c1 * std::sin(c1 * s)};
    }
    return {0.0, 0.0, 0.0};
  }
};

class SXField {
 public:
  SXField() = default;

  static SXField constant(double c) {
    return term({SShape::kConst, c, 0.0}, ScalarField::constant(1.0));
  }
  // c0 + c1 * s
  static SXField linear_s(double c0, double c1) {
    return term({SShape::kLinear, c0, c1}, ScalarField::constant(1.0));
  }
  static SXField separable(const SShape& shape, const ScalarField& base) {
    return term(shape, base);
  }

  bool empty() const { return terms_.empty(); }

  SXField plus(const SXField& other) const {
    SXField r = *this;
    r.terms_.insert(r.terms_.end(), other.terms_.begin(), other.terms_.end());
    return r;
  }

  Jet2 eval(const FlowModel& m, double s, const Vec3& x) const {
    Jet2 total;
    for (const auto& [shape, base] : terms_) {
      const auto sv = shape.at(s);
      const MJet b = base.eval(m, x);
      total = total + Jet2{sv[0] * b.value, sv[0] * b.d_X, sv[1] * b.value,
                           sv[1] * b.d_X, sv[2] * b.value};
    }
    return total;
  }

 private:
  static SXField term(const SShape& shape, const ScalarField& base) {
    SXField f;
    f.terms_.push_back({shape, base});
    return f;
  }
  std::vector<std::pair<SShape, ScalarField>> terms_;
};

struct ProfilePair {
  Jet2 minus, plus;
};

struct ProfileTransform {
  enum Kind { kHorizontal, kScale, kBasis } kind = kScale;
  // horizontal: psi(s,x) = a s + b(x)
  double a = 1.0;
  ScalarField b;
  // scale: both lambdas multiplied by e^{c(s,x)}
  SXField c;
  // basis: lambda_minus *= e^{-z_minus}, lambda_plus *= e^{-z_plus}
  ScalarField z_minus, z_plus;
};

class Profile {
 public:
  static Profile linear() { return Profile(ProfileKind::linear, SXField{}); }
  static Profile exponential() {
    return Profile(ProfileKind::exponential, SXField{});
  }
  static Profile general(const SXField& w) {
    return Profile(ProfileKind::general, w);
  }

  ProfileKind base_kind() const { return base_; }
  const SXField& distortion() const { return w_; }
  const std::vector<ProfileTransform>& transforms() const {
    return transforms_;
  }

  Profile with_horizontal(double a, const ScalarField& b) const {
    if (!(a > 0.0))
      throw std::invalid_argument("horizontal map: need d_s psi = a > 0");
    ProfileTransform t;
    t.kind = ProfileTransform::kHorizontal;
    t.a = a;
    t.b = b;
    return appended(t);
  }

  Profile with_scale(const SXField& c) const {
    ProfileTransform t;
    t.kind = ProfileTransform::kScale;
    t.c = c;
    return appended(t);
  }

  Profile with_basis(const ScalarField& z_minus,
                     const ScalarField& z_plus) const {
    ProfileTransform t;
    t.kind = ProfileTransform::kBasis;
    t.z_minus = z_minus;
    t.z_plus = z_plus;
    return appended(t);
  }

  // Lambda jets at (s, x); raises on nonpositive values.
  ProfilePair lambdas(const FlowModel& m, double s, const Vec3& x) const {
    ProfilePair pr = eval_chain(transforms_.size(), m, s, x);
    if (!(pr.minus.value > 0.0) || !(pr.plus.value > 0.0))
      throw std::invalid_argument("profile: nonpositive lambda at s=" +
                                  std::to_string(s));
    return pr;
  }

  // Same evaluation without the positivity guard; validation sweeps record
  // the violation instead of unwinding.
  ProfilePair lambdas_unchecked(const FlowModel& m, double s,
                                const Vec3& x) const {
    return eval_chain(transforms_.size(), m, s, x);
  }

 private:
  Profile(ProfileKind k, SXField w) : base_(k), w_(std::move(w)) {}

  Profile appended(const ProfileTransform& t) const {
    Profile p = *this;
    p.transforms_.push_back(t);
    return p;
  }

  ProfilePair eval_base(const FlowModel& m, double s, const Vec3& x) const {
    ProfilePair pr;
    if (base_ == ProfileKind::linear) {
      pr.minus = {1.0 - s, 0.0, -1.0, 0.0, 0.0};
      pr.plus = {1.0 + s, 0.0, 1.0, 0.0, 0.0};
      return pr;
    }
    pr.minus = jexp(-1.0 * jet_s(s));
    pr.plus = jexp(jet_s(s));
    if (base_ == ProfileKind::general) {
      const Jet2 ew = jexp(w_.eval(m, s, x));
      pr.minus = pr.minus * ew;
      pr.plus = pr.plus * ew;
    }
    return pr;
  }

  ProfilePair eval_chain(std::size_t depth, const FlowModel& m, double s,
                         const Vec3& x) const {
    if (depth == 0) return eval_base(m, s, x);
    const ProfileTransform& t = transforms_[depth - 1];
    switch (t.kind) {
      case ProfileTransform::kScale: {
        ProfilePair pr = eval_chain(depth - 1, m, s, x);
        const Jet2 ec = jexp(t.c.eval(m, s, x));
        pr.minus = pr.minus * ec;
        pr.plus = pr.plus * ec;
        return pr;
      }
      case ProfileTransform::kBasis: {
        ProfilePair pr = eval_chain(depth - 1, m, s, x);
        pr.minus = pr.minus * jexp(-1.0 * t.z_minus.jet2(m, x));
        pr.plus = pr.plus * jexp(-1.0 * t.z_plus.jet2(m, x));
        return pr;
      }
      case ProfileTransform::kHorizontal: {
        // lambda'(s,x) = lambda(sigma, x), sigma = (s - b(x)) / a
        const MJet b = t.b.empty() ? MJet{0.0, 0.0} : t.b.eval(m, x);
        const double sigma = (s - b.value) / t.a;
        const double sigma_X = -b.d_X / t.a;
        const double sigma_s = 1.0 / t.a;
        ProfilePair in = eval_chain(depth - 1, m, sigma, x);
        const auto compose = [&](const Jet2& J) -> Jet2 {
          Jet2 r;
          r.value = J.value;
          r.d_X = J.d_X + J.d_s * sigma_X;
          r.d_s = J.d_s * sigma_s;
          r.d_sX = (J.d_sX + J.d_ss * sigma_X) * sigma_s;
          r.d_ss = J.d_ss * sigma_s * sigma_s;
          return r;
        };
        return {compose(in.minus), compose(in.plus)};
      }
    }
    throw std::logic_error("profile: bad transform");
  }

  ProfileKind base_;
  SXField w_;
  std::vector<ProfileTransform> transforms_;
};

}  // namespace liv
