#pragma once

// Regularity diagnostics: the bunching constant of the synchronized flow,
// skeleton persistence under conformal perturbations of h_s, and a Hölder
// exponent estimate for skeleton graphs via structure functions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "liv/lis.hpp"
#include "liv/liouville.hpp"

namespace liv {

struct BunchingReport {
  double B_s = 0.0;
  std::vector<double> per_point;  // 1 - sup_t (1/t) int_0^t r_s/r_u
  double T_max = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

// Monte-Carlo infimum of the stable bunching functional along the
// synchronized flow X/r_u: per orbit, Birkhoff averages of r_s/r_u are
// sampled at dyadic times t in {1, 2, 4, ...} up to T_max and the sup is
// taken over those samples.  Starts are the distinguished origin plus
// seeded uniform draws from the sample box.  Step 2^-10 keeps the
// constant-rate sums exact in floating point.
inline BunchingReport bunching_estimate(const FlowModel& model, double T_max,
                                        int n_orbits, std::uint64_t seed) {
  if (!(T_max >= 1.0))
    throw std::invalid_argument("bunching: T_max >= 1 required");
  if (n_orbits < 0) throw std::invalid_argument("bunching: n_orbits >= 0");
  std::vector<double> dyadic;
  for (double t = 1.0; t <= T_max + 1e-12; t *= 2.0) dyadic.push_back(t);
  if (dyadic.back() < T_max - 1e-12) dyadic.push_back(T_max);

  const auto box = model.sample_box();
  std::vector<Vec3> starts{model.wrap({0.0, 0.0, 0.0})};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < n_orbits; ++i) {
    Vec3 p;
    for (std::size_t c = 0; c < 3; ++c)
      p[c] = box[c][0] + (box[c][1] - box[c][0]) * uni(rng);
    starts.push_back(model.wrap(p));
  }

  constexpr double h = 1.0 / 1024.0;
  BunchingReport rep;
  rep.T_max = T_max;
  rep.seed = seed;
  rep.B_s = std::numeric_limits<double>::infinity();
  for (const Vec3& p0 : starts) {
    // State (p, I): dp/dt = velocity/r_u, dI/dt = r_s/r_u.
    std::array<double, 4> st{p0[0], p0[1], p0[2], 0.0};
    const auto deriv = [&model](const std::array<double, 4>& y) {
      const Vec3 q{y[0], y[1], y[2]};
      const Rates rt = model.expansion_rates(q);
      const Vec3 vel = model.velocity(q);
      return std::array<double, 4>{vel[0] / rt.r_u, vel[1] / rt.r_u,
                                   vel[2] / rt.r_u, rt.r_s / rt.r_u};
    };
    double t = 0.0;
    double sup_avg = -std::numeric_limits<double>::infinity();
    std::size_t next_dyadic = 0;
    while (next_dyadic < dyadic.size()) {
      st = rk4_step<4>(st, h, deriv);
      const Vec3 w = model.wrap({st[0], st[1], st[2]});
      st[0] = w[0];
      st[1] = w[1];
      st[2] = w[2];
      t += h;
      if (t >= dyadic[next_dyadic] - 1e-12) {
        sup_avg = std::max(sup_avg, st[3] / t);
        ++next_dyadic;
      }
    }
    rep.per_point.push_back(1.0 - sup_avg);
    rep.B_s = std::min(rep.B_s, rep.per_point.back());
  }
  rep.n_samples = static_cast<int>(starts.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Skeleton persistence.

struct PersistenceReport {
  double eps = 0.0;
  double c0_distance = 0.0;
  double ratio = 0.0;  // c0_distance / eps (0 at eps = 0)
};

// Perturbs h_s -> h_s e^{eps P}, revalidates, re-solves the skeleton on a
// theta grid, and reports the sup-distance to the unperturbed graph.
inline std::vector<PersistenceReport> skeleton_persistence(
    const InterpolationSystem& sys, const ScalarField& perturbation,
    const std::vector<double>& eps_list, int grid_n = 256) {
  SkeletonGraph base = skeleton_graph(sys, grid_n);
  std::vector<PersistenceReport> out;
  out.reserve(eps_list.size());
  for (const double eps : eps_list) {
    InterpolationSystem per = sys;
    per.bicontact.h_s = field_product(
        sys.bicontact.h_s, field_exp(field_affine(0.0, eps, perturbation)));
    per.name = sys.name + "+perturbed";
    ValidationOptions vo;
    vo.grid_n = 24;
    vo.n_random = 200;
    const ValidationReport vr = validate_system(per, vo);
    if (!vr.ok)
      throw std::runtime_error("skeleton persistence: eps=" +
                               std::to_string(eps) +
                               " breaks the system: " + vr.failure);
    PersistenceReport pr;
    pr.eps = eps;
    for (int i = 0; i < grid_n; ++i) {
      const auto& smp = base.samples[static_cast<std::size_t>(i)];
      const double s_eps = skeleton_solve(per, smp.x);
      pr.c0_distance = std::max(pr.c0_distance, std::abs(s_eps - smp.s));
    }
    pr.ratio = (eps != 0.0) ? pr.c0_distance / std::abs(eps) : 0.0;
    out.push_back(pr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hölder exponent of a skeleton graph.

struct HolderResult {
  double exponent = 1.0;
  bool flagged_constant = false;
};

// Least-squares slope of log RMS |graph(theta + delta) - graph(theta)|
// against log delta over the given scales (in base-coordinate units along
// the graph's sampling curve).  Scales below 10x the grid spacing are
// excluded; the result is clipped to (0, 1].  A constant graph is flagged
// and reported as exponent 1.
inline HolderResult holder_exponent(const SkeletonGraph& graph,
                                    const std::vector<double>& scales) {
  const std::size_t n = graph.samples.size();
  if (n < 16) throw std::invalid_argument("holder: need >= 16 samples");
  const double spacing = graph.period / static_cast<double>(n);

  double smin = graph.samples[0].s, smax = smin;
  for (const auto& smp : graph.samples) {
    smin = std::min(smin, smp.s);
    smax = std::max(smax, smp.s);
  }
  if (smax - smin < 1e-13) return {1.0, true};

  std::vector<double> lx, ly;
  for (const double delta : scales) {
    if (delta < 10.0 * spacing) continue;
    const std::size_t k =
        static_cast<std::size_t>(std::llround(delta / spacing));
    if (k == 0 || k >= n) continue;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d =
          graph.samples[(i + k) % n].s - graph.samples[i].s;
      sum2 += d * d;
    }
    const double rms = std::sqrt(sum2 / static_cast<double>(n));
    if (rms <= 0.0) continue;
    lx.push_back(std::log(static_cast<double>(k) * spacing));
    ly.push_back(std::log(rms));
  }
  if (lx.size() < 3)
    throw std::invalid_argument("holder: need >= 3 usable scales");

  const double m = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  slope = std::min(1.0, slope);
  if (!(slope > 0.0)) slope = 1e-6;
  return {slope, false};
}

}  // namespace liv
