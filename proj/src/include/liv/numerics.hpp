#pragma once

// Small numeric utilities shared across modules: monotone-bracket bisection,
// fixed-step RK4, a forward-mode gradient dual for expression fields,
// a deterministic slice-parallel for-loop, and FNV hashing for report ids.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace liv {

using Vec3 = std::array<double, 3>;

// Bisection on a bracketing interval [lo, hi] with f(lo) and f(hi) of
// opposite sign.  Tolerance is on the interval width.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Classical RK4 over a fixed state dimension.  deriv(state) -> state.
template <std::size_t N, class F>
std::array<double, N> rk4_step(const std::array<double, N>& y, double h,
                               F&& deriv) {
  std::array<double, N> k1 = deriv(y);
  std::array<double, N> t;
  for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + 0.5 * h * k1[i];
  std::array<double, N> k2 = deriv(t);
  for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + 0.5 * h * k2[i];
  std::array<double, N> k3 = deriv(t);
  for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * k3[i];
  std::array<double, N> k4 = deriv(t);
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Value plus gradient in the three chart coordinates; used by the
// expression-field evaluator.
struct Dual3 {
  double v = 0.0;
  std::array<double, 3> d{0.0, 0.0, 0.0};

  static Dual3 constant(double c) { return {c, {0.0, 0.0, 0.0}}; }
  static Dual3 variable(double x, int i) {
    Dual3 r{x, {0.0, 0.0, 0.0}};
    r.d[static_cast<std::size_t>(i)] = 1.0;
    return r;
  }
};

inline Dual3 operator+(const Dual3& a, const Dual3& b) {
  return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2]}};
}
inline Dual3 operator-(const Dual3& a, const Dual3& b) {
  return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2]}};
}
inline Dual3 operator-(const Dual3& a) {
  return {-a.v, {-a.d[0], -a.d[1], -a.d[2]}};
}
inline Dual3 operator*(const Dual3& a, const Dual3& b) {
  Dual3 r;
  r.v = a.v * b.v;
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
inline Dual3 operator/(const Dual3& a, const Dual3& b) {
  Dual3 r;
  r.v = a.v / b.v;
  for (int i = 0; i < 3; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}
inline Dual3 dcos(const Dual3& a) {
  Dual3 r;
  r.v = std::cos(a.v);
  const double s = -std::sin(a.v);
  for (int i = 0; i < 3; ++i) r.d[i] = s * a.d[i];
  return r;
}
inline Dual3 dsin(const Dual3& a) {
  Dual3 r;
  r.v = std::sin(a.v);
  const double c = std::cos(a.v);
  for (int i = 0; i < 3; ++i) r.d[i] = c * a.d[i];
  return r;
}
inline Dual3 dexp(const Dual3& a) {
  Dual3 r;
  r.v = std::exp(a.v);
  for (int i = 0; i < 3; ++i) r.d[i] = r.v * a.d[i];
  return r;
}

// Deterministic parallel loop: the index space is cut into contiguous
// slices, one worker per slice, results written into caller-owned storage
// indexed by i.  Reductions stay sequential at the call site, so outputs
// are independent of the thread count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2 * threads) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace liv
