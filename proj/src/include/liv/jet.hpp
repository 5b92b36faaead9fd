#pragma once

// Coefficient jets on R_s x M, second order in s, first order along the
// flow direction X, plus the mixed slot d_sX.  This is the minimal order
// that supports the skeleton and normal-expansion formulas; nothing above
// it is representable, and operations that would need higher slots zero
// them (stated in their contracts).

#include <cmath>

namespace liv {

struct Jet2 {
  double value = 0.0;
  double d_X = 0.0;   // derivative along X at fixed s
  double d_s = 0.0;
  double d_sX = 0.0;  // d/ds of d_X
  double d_ss = 0.0;
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.value + b.value, a.d_X + b.d_X, a.d_s + b.d_s, a.d_sX + b.d_sX,
          a.d_ss + b.d_ss};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.value - b.value, a.d_X - b.d_X, a.d_s - b.d_s, a.d_sX - b.d_sX,
          a.d_ss - b.d_ss};
}

inline Jet2 operator*(double c, const Jet2& a) {
  return {c * a.value, c * a.d_X, c * a.d_s, c * a.d_sX, c * a.d_ss};
}

inline Jet2 operator-(const Jet2& a) { return -1.0 * a; }

// Leibniz product to the stored order.
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value * b.value;
  r.d_X = a.d_X * b.value + a.value * b.d_X;
  r.d_s = a.d_s * b.value + a.value * b.d_s;
  r.d_sX = a.d_sX * b.value + a.d_X * b.d_s + a.d_s * b.d_X + a.value * b.d_sX;
  r.d_ss = a.d_ss * b.value + 2.0 * a.d_s * b.d_s + a.value * b.d_ss;
  return r;
}

inline Jet2 jet_const(double c) { return {c, 0.0, 0.0, 0.0, 0.0}; }

// The coordinate s itself.
inline Jet2 jet_s(double s) { return {s, 0.0, 1.0, 0.0, 0.0}; }

inline Jet2 jexp(const Jet2& a) {
  const double e = std::exp(a.value);
  Jet2 r;
  r.value = e;
  r.d_X = e * a.d_X;
  r.d_s = e * a.d_s;
  r.d_sX = e * (a.d_sX + a.d_X * a.d_s);
  r.d_ss = e * (a.d_ss + a.d_s * a.d_s);
  return r;
}

}  // namespace liv
