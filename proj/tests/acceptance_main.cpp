// Acceptance gate: ten end-to-end checks with pinned tolerances.  Each check
// prints exactly one [PASS]/[FAIL] line with its measured numbers; the
// process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "liv/da.hpp"
#include "liv/io.hpp"
#include "liv/lis.hpp"
#include "liv/liouville.hpp"
#include "liv/regularity.hpp"

using namespace liv;

namespace {

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

int g_failures = 0;

void emit(const char* name, bool ok, const std::string& detail) {
  if (!ok) ++g_failures;
  std::printf("[%s] %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
}

// budget_s <= 0 means no wall-clock budget for the check.
template <typename Body>
void check(const char* name, double budget_s, Body&& body) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  bool ok = false;
  std::string detail;
  try {
    detail = body(ok);
  } catch (const std::exception& e) {
    ok = false;
    detail = strf("exception: %s", e.what());
  }
  const double secs =
      std::chrono::duration<double>(clock::now() - t0).count();
  if (budget_s > 0.0) {
    if (secs >= budget_s) ok = false;
    detail += strf("  [%.2fs / %gs]", secs, budget_s);
  } else {
    detail += strf("  [%.2fs]", secs);
  }
  emit(name, ok, detail);
}

const InterpolationSystem& by_name(
    const std::vector<InterpolationSystem>& all, const std::string& name) {
  for (const auto& s : all)
    if (s.name == name) return s;
  throw std::runtime_error("missing bundled system: " + name);
}

Vec3 random_point(const FlowModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto box = m.sample_box();
  Vec3 p;
  for (std::size_t c = 0; c < 3; ++c)
    p[c] = box[c][0] + (box[c][1] - box[c][0]) * uni(rng);
  return m.wrap(p);
}

}  // namespace

int main() {
  const auto systems = bundled_systems();

  // 1. Linear profile on the cat suspension: the interpolation density is
  //    the constant 4 r_u at every point of the slab.
  check("linear-density", 5.0, [&](bool& ok) {
    const auto& sys = by_name(systems, "linear-symmetric-cat");
    const double expected =
        4.0 * sys.model->expansion_rates({0, 0, 0}).r_u;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> us(sys.window_lo, sys.window_hi);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Vec3 x = random_point(*sys.model, rng);
      const double d = liouville_density(sys, us(rng), x);
      worst = std::max(worst, std::abs(d - expected) / expected);
    }
    ok = worst < 1e-9;
    return strf("density = 4 r_u at 10^4 points, max rel err %.3g (tol 1e-9)",
                worst);
  });

  // 2. Closed-form and direct-solve Liouville coefficients agree on every
  //    bundled system.
  check("dual-provenance", 10.0, [&](bool& ok) {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (const auto& sys : systems) {
      const double margin = 0.1 * (sys.window_hi - sys.window_lo);
      std::uniform_real_distribution<double> us(sys.window_lo + margin,
                                                sys.window_hi - margin);
      for (int i = 0; i < 1000; ++i) {
        const Vec3 x = random_point(*sys.model, rng);
        const double s = us(rng);
        const LiouvilleField a = liouville_field(sys, s, x);
        const LiouvilleField b = liouville_field_generic(sys, s, x);
        worst = std::max(worst, std::abs(a.f - b.f) / std::abs(a.f));
        worst = std::max(worst, std::abs(a.g - b.g) /
                                    std::max(1.0, std::abs(a.g)));
      }
    }
    ok = worst < 1e-9;
    return strf(
        "f, g from both routes at 10^3 points x %zu systems, max rel %.3g "
        "(tol 1e-9)",
        systems.size(), worst);
  });

  // 3. Skeleton solver recovers s* = (1/2) ln h_s in the exponential family.
  check("skeleton-graph", 2.0, [&](bool& ok) {
    const auto& sys = by_name(systems, "exp-cos-rate");
    const SkeletonGraph graph = skeleton_graph(sys, 256);
    double worst = 0.0, worst_res = 0.0;
    for (const auto& smp : graph.samples) {
      const double hs = sys.bicontact.h_s.eval(*sys.model, smp.x).value;
      worst = std::max(worst, std::abs(smp.s - 0.5 * std::log(hs)));
      worst_res = std::max(worst_res, std::abs(smp.residual));
    }
    ok = worst < 1e-10 && worst_res < 1e-10;
    return strf(
        "256 points: max |s* - ln(h_s)/2| = %.3g, max residual %.3g "
        "(tol 1e-10)",
        worst, worst_res);
  });

  // 4. Normal expansion rate: closed form against finite differences, and
  //    the exact constant Delta when the coefficients are constant.
  check("normal-expansion", 0.0, [&](bool& ok) {
    const auto& cos_sys = by_name(systems, "exp-cos-rate");
    double worst_fd = 0.0, min_val = 1e300;
    for (int i = 0; i < 256; ++i) {
      const Vec3 x{0.0, 0.0, i / 256.0};
      const double closed = normal_expansion(cos_sys, x);
      const double fd = normal_expansion_fd(cos_sys, x);
      worst_fd = std::max(worst_fd, std::abs(closed - fd) / closed);
      min_val = std::min(min_val, closed);
    }
    const auto& sym = by_name(systems, "exp-symmetric-cat");
    const Rates rt = sym.model->expansion_rates({0, 0, 0});
    const double delta = rt.r_u - rt.r_s;
    double worst_const = 0.0;
    for (int i = 0; i < 256; ++i) {
      const Vec3 x{0.3, -0.2, i / 256.0};
      worst_const = std::max(
          worst_const, std::abs(normal_expansion(sym, x) - delta) / delta);
    }
    ok = worst_fd < 1e-6 && min_val > 0.0 && worst_const < 1e-12;
    return strf(
        "closed vs FD max rel %.3g (tol 1e-6), min %.3g > 0, constant case "
        "rel %.3g (tol 1e-12)",
        worst_fd, min_val, worst_const);
  });

  // 5. Synchronization identity f|_skeleton * rtilde_u = 1 on every system.
  check("synchronization", 0.0, [&](bool& ok) {
    double worst = 0.0;
    for (const auto& sys : systems) {
      for (int i = 0; i < 256; ++i) {
        const Vec3 x = sys.model->wrap({0.1, 0.4, i / 256.0});
        const SyncCheck sc = sync_check(sys, x);
        worst = std::max(
            worst, std::abs(sc.f_at_skeleton - sc.inv_rtilde) / sc.inv_rtilde);
      }
    }
    ok = worst < 1e-9;
    return strf("max |f r~_u - 1| = %.3g over 256 points x %zu systems "
                "(tol 1e-9)",
                worst, systems.size());
  });

  // 6. Blown-up chart: deformation shape, deformed contact densities,
  //    constant 4-form coefficient, and the reversed-orientation obstruction.
  check("da-chart", 30.0, [&](bool& ok) {
    double amax = -1e300;
    int ai = -1, aj = -1;
    for (int i = 0; i < 2001; ++i)
      for (int j = 0; j < 2001; ++j) {
        const double v =
            a_polynomial(-1.0 + i / 1000.0, -1.0 + j / 1000.0);
        if (v > amax) {
          amax = v;
          ai = i;
          aj = j;
        }
      }
    bool shape_ok = std::abs(amax - 1.0) <= 1e-12 && ai == 1000 && aj == 1000;

    double worst_min = 0.0, worst_rev = -1e300;
    for (double nubar : {0.25, 0.5, 0.75}) {
      DAParams p;
      p.nubar = nubar * p.mu;
      const DAReport rep = da_report(p, 801);
      const double expected = (p.mu - p.nu) + (p.nu - p.nubar);
      worst_min = std::max(worst_min,
                           std::abs(rep.min_contact_plus - expected));
      worst_min = std::max(worst_min,
                           std::abs(-rep.min_contact_minus - expected));
      worst_rev = std::max(worst_rev,
                           da_reversed_liouville_coeff(p, 0.0, 0.0, 0.0));
    }

    double worst_dev = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        DAParams p;
        p.eta = 0.1 + 0.8 * i / 9.0;
        p.nubar = -0.9 + 1.8 * j / 9.0;
        worst_dev = std::max(
            worst_dev, da_liouville_at_skeleton(p, 41).max_dev / (4.0 * p.mu));
      }

    ok = shape_ok && worst_min <= 1e-9 && worst_rev <= 0.0 &&
         worst_dev <= 1e-10;
    return strf(
        "A max %.15g at grid (%d,%d); density min err %.3g (tol 1e-9); "
        "reversed coeff max %.3g <= 0; 4mu rel dev %.3g (tol 1e-10)",
        amax, ai, aj, worst_min, worst_rev, worst_dev);
  });

  // 7. Bunching constants: 2 for the cat suspension, capped at 1/2 by the
  //    deformation.
  check("bunching", 0.0, [&](bool& ok) {
    const BunchingReport cat =
        bunching_estimate(*cat_suspension(), 8.0, 7, 424242);
    const BunchingReport da =
        bunching_estimate(*da_chart(DAParams{}), 8.0, 15, 424242);
    ok = std::abs(cat.B_s - 2.0) <= 1e-12 && da.B_s <= 0.5 + 1e-9;
    return strf("cat B_s = %.15g (tol 1e-12 about 2), deformed B_s = %.12g "
                "(<= 0.5 + 1e-9)",
                cat.B_s, da.B_s);
  });

  // 8. Gauge equivariance of the coefficient pair under basis changes,
  //    horizontal reparametrizations, and constant conformal scalings.
  check("equivariance", 0.0, [&](bool& ok) {
    const auto& sys = by_name(systems, "exp-symmetric-cat");
    const InterpolationSystem rebased = change_of_basis(
        sys, ScalarField::constant(0.2),
        field_affine(0.0, 0.3, ScalarField::cos_theta(1.0)));
    const double a = 1.3;
    const ScalarField b =
        field_affine(0.0, 0.2, ScalarField::cos_theta(1.0));
    const InterpolationSystem moved = horizontal_map(sys, a, b);
    const InterpolationSystem scaled =
        scaling_map(sys, SXField::constant(0.4));

    std::mt19937_64 rng(888);
    std::uniform_real_distribution<double> us(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = random_point(*sys.model, rng);
      const double s = us(rng);
      const LiouvilleField base = liouville_field(sys, s, x);

      const LiouvilleField rb = liouville_field_generic(rebased, s, x);
      worst = std::max(worst, std::abs(rb.f - base.f) / base.f);
      worst = std::max(worst,
                       std::abs(rb.g - base.g) / std::max(1.0, std::abs(base.g)));

      const double s_img = a * s + b.eval(*sys.model, x).value;
      const LiouvilleField mv = liouville_field(moved, s_img, x);
      worst = std::max(worst, std::abs(mv.f - base.f) / base.f);
      const double g_expected = a * base.g + base.f * b.eval(*sys.model, x).d_X;
      worst = std::max(worst, std::abs(mv.g - g_expected) /
                                  std::max(1.0, std::abs(g_expected)));

      const LiouvilleField sc = liouville_field(scaled, s, x);
      worst = std::max(worst, std::abs(sc.f - base.f) / base.f);
      worst = std::max(worst,
                       std::abs(sc.g - base.g) / std::max(1.0, std::abs(base.g)));
    }
    ok = worst < 1e-9;
    return strf("basis / horizontal / scaling laws at 100 points, max rel "
                "%.3g (tol 1e-9)",
                worst);
  });

  // 9. The skeleton attracts the backward flow of Y: starts one unit away
  //    land within 2e-4 after time 5, with no window truncation.
  check("backward-attractor", 0.0, [&](bool& ok) {
    const auto& sys = by_name(systems, "exp-symmetric-cat");
    std::mt19937_64 rng(3131);
    double worst = 0.0;
    int truncations = 0;
    for (int i = 0; i < 64; ++i) {
      const Vec3 x0 = random_point(*sys.model, rng);
      const double s0 = (i % 2 == 0) ? 1.0 : -1.0;
      const Trajectory tr = integrate_Y(sys, s0, x0, -5.0, 1e-2);
      if (tr.truncated) ++truncations;
      worst = std::max(worst, std::abs(tr.s.back()));
    }
    ok = truncations == 0 && worst <= 2e-4;
    return strf("64 starts at |s| = 1: max final |s| = %.3g (tol 2e-4), "
                "%d truncated",
                worst, truncations);
  });

  // 10. Skeleton graphs move at half the rate of conformal h_s
  //     perturbations.
  check("persistence-rate", 0.0, [&](bool& ok) {
    const auto& sys = by_name(systems, "exp-cos-rate");
    const ScalarField pure_cos =
        field_affine(-1.0, 1.0, ScalarField::cos_theta(1.0));
    const auto reports =
        skeleton_persistence(sys, pure_cos, {1e-3}, 256);
    const double ratio = reports[0].ratio;
    ok = std::abs(ratio - 0.5) <= 0.005;
    return strf("C0 response ratio %.12g (0.5 +- 1%%)", ratio);
  });

  if (g_failures == 0) {
    std::printf("all acceptance checks passed\n");
    return 0;
  }
  std::printf("%d acceptance check(s) failed\n", g_failures);
  return 1;
}
