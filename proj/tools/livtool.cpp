// livtool: command-line front end for the Liouville interpolation toolkit.
//
// Subcommands: verify, skeleton, flow, da-check, bunching, persist, suite.
// Exit codes: 0 all checks pass, 1 a check failed (the failing point and
// value are printed), 2 parse or precondition error, 3 unwritable output
// path.  Reports are JSON on stdout with the numeric payload kept
// byte-identical across reruns of the same config and seed; wall time
// lives outside the payload for that reason.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liv/da.hpp"
#include "liv/io.hpp"
#include "liv/liouville.hpp"
#include "liv/regularity.hpp"

namespace {

using liv::InterpolationSystem;
using liv::Vec3;
using nlohmann::json;

struct Common {
  std::string descriptor;
  std::string system = "exp-symmetric-cat";
  std::string out;
  int grid = 16;
  double tol = 1e-10;
  std::uint64_t seed = 81;
  unsigned threads = 1;
  std::vector<double> window;  // empty = keep the system's own window
};

void add_common(CLI::App* cmd, Common& c, bool with_system = true) {
  if (with_system) {
    cmd->add_option("-d,--descriptor", c.descriptor,
                    "JSON system descriptor path");
    cmd->add_option("--system", c.system, "bundled system name");
  }
  cmd->add_option("--grid", c.grid, "sample grid size (>= 8)");
  cmd->add_option("--tol", c.tol, "check tolerance (> 0)");
  cmd->add_option("--seed", c.seed, "RNG seed (recorded in the report)");
  cmd->add_option("--out", c.out, "output path (CSV or report JSON)");
  cmd->add_option("--window", c.window, "working window a,b")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--threads", c.threads, "worker thread count")
      ->envname("LIVTOOL_THREADS");
}

// Grid/tolerance invariants are config errors, not check failures.
void check_common(const Common& c) {
  if (c.grid < 8) throw std::invalid_argument("--grid must be >= 8");
  if (!(c.tol > 0.0)) throw std::invalid_argument("--tol must be > 0");
  if (!c.window.empty() && !(c.window[0] < c.window[1]))
    throw std::invalid_argument("--window must satisfy a < b");
}

InterpolationSystem resolve_system(const Common& c) {
  InterpolationSystem sys = [&] {
    if (!c.descriptor.empty())
      return liv::system_from_descriptor(liv::load_json_file(c.descriptor));
    for (auto& s : liv::bundled_systems())
      if (s.name == c.system) return s;
    throw std::invalid_argument("unknown bundled system: " + c.system);
  }();
  if (!c.window.empty()) {
    sys.window_lo = c.window[0];
    sys.window_hi = c.window[1];
  }
  return sys;
}

std::string canonical_config(const std::string& cmd, const Common& c,
                             const std::string& extra = "") {
  char buf[160];
  std::snprintf(buf, sizeof buf, "|grid=%d|tol=%.17g|seed=%llu|win=", c.grid,
                c.tol, static_cast<unsigned long long>(c.seed));
  std::string s = cmd + "|desc=" + c.descriptor + "|sys=" + c.system + buf;
  for (double w : c.window) {
    char wb[32];
    std::snprintf(wb, sizeof wb, "%.17g,", w);
    s += wb;
  }
  return s + "|" + extra;
}

// Prints the report to stdout; --out (when not claimed by a CSV) gets the
// same JSON.  Exit 3 is reserved for unwritable paths.
int emit_report(liv::Report& rep,
                const std::chrono::steady_clock::time_point& t0,
                const std::string& out_path) {
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  const std::string text = liv::report_to_json(rep).dump(2);
  std::printf("%s\n", text.c_str());
  if (!out_path.empty()) {
    std::FILE* fp = std::fopen(out_path.c_str(), "w");
    if (!fp) {
      std::fprintf(stderr, "livtool: cannot write %s\n", out_path.c_str());
      return 3;
    }
    std::fprintf(fp, "%s\n", text.c_str());
    std::fclose(fp);
  }
  return rep.pass ? 0 : 1;
}

int run_verify(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  check_common(c);
  const InterpolationSystem sys = resolve_system(c);
  liv::ValidationOptions vo;
  vo.grid_n = c.grid;
  vo.seed = c.seed;
  vo.threads = c.threads;
  const liv::ValidationReport vr = validate_system(sys, vo);

  liv::Report rep;
  rep.command = "verify";
  rep.config_hash = liv::config_hash_hex(canonical_config("verify", c));
  rep.seed = c.seed;
  rep.pass = vr.ok;
  rep.payload = json{
      {"system", sys.name},
      {"ok", vr.ok},
      {"min_density", vr.min_density},
      {"argmin", {vr.argmin_s, vr.argmin_x[0], vr.argmin_x[1], vr.argmin_x[2]}},
      {"contact_densities",
       {{"min_c_plus", vr.min_c_plus}, {"min_c_minus", vr.min_c_minus}}},
      {"min_lambda", vr.min_lambda},
      {"min_monotone", vr.min_monotone},
      {"boundary_lo_max", vr.boundary_lo_max},
      {"boundary_hi_min", vr.boundary_hi_min},
      {"n_sampled", vr.n_sampled}};
  if (!vr.ok)
    std::fprintf(stderr,
                 "livtool: %s at s=%.15g x=(%.15g, %.15g, %.15g) density=%.15g\n",
                 vr.failure.c_str(), vr.argmin_s, vr.argmin_x[0],
                 vr.argmin_x[1], vr.argmin_x[2], vr.min_density);
  return emit_report(rep, t0, c.out);
}

int run_skeleton(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  check_common(c);
  const InterpolationSystem sys = resolve_system(c);
  const auto box = sys.model->sample_box();

  // N x N base grid over (u, theta) at v = 0; the solver itself is 1D in s.
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(c.grid) * c.grid);
  double max_residual = 0.0, min_expansion = 0.0;
  Vec3 worst{0, 0, 0};
  bool first = true;
  for (int i = 0; i < c.grid; ++i) {
    const double u = box[0][0] + (box[0][1] - box[0][0]) * (i + 0.5) / c.grid;
    for (int j = 0; j < c.grid; ++j) {
      const double th =
          box[2][0] + (box[2][1] - box[2][0]) * (j + 0.5) / c.grid;
      const Vec3 x{u, 0.0, th};
      const double s = liv::skeleton_solve(sys, x, std::min(c.tol, 1e-12));
      const liv::AnnihilatorForm a = alpha_coeffs(sys, s, x);
      const double residual = std::abs(a.F.value);
      const double ne = liv::normal_expansion(sys, x);
      if (residual > max_residual) {
        max_residual = residual;
        worst = x;
      }
      min_expansion = first ? ne : std::min(min_expansion, ne);
      first = false;
      rows.push_back({u, 0.0, th, s, residual, ne});
    }
  }

  liv::Report rep;
  rep.command = "skeleton";
  rep.config_hash = liv::config_hash_hex(canonical_config("skeleton", c));
  rep.seed = c.seed;
  rep.pass = max_residual < c.tol && min_expansion > 0.0;
  rep.payload = json{{"system", sys.name},
                     {"n_rows", rows.size()},
                     {"max_residual", max_residual},
                     {"min_normal_expansion", min_expansion}};
  if (!rep.pass)
    std::fprintf(stderr,
                 "livtool: skeleton residual %.15g exceeds tol at "
                 "(%.15g, %.15g, %.15g) or expansion %.15g <= 0\n",
                 max_residual, worst[0], worst[1], worst[2], min_expansion);
  if (!c.out.empty()) {
    if (!liv::export_csv(
            c.out, {"u", "v", "theta", "s", "residual", "normal_expansion"},
            std::move(rows))) {
      std::fprintf(stderr, "livtool: cannot write %s\n", c.out.c_str());
      return 3;
    }
    return emit_report(rep, t0, "");
  }
  return emit_report(rep, t0, "");
}

int run_flow(const Common& c, const std::vector<double>& start, double T,
             double dt) {
  const auto t0 = std::chrono::steady_clock::now();
  check_common(c);
  if (start.size() != 4)
    throw std::invalid_argument("--start needs s,u,v,theta");
  const InterpolationSystem sys = resolve_system(c);
  const liv::Trajectory tr = liv::integrate_Y(
      sys, start[0], {start[1], start[2], start[3]}, T, dt);

  std::vector<std::vector<double>> rows;
  rows.reserve(tr.t.size());
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    rows.push_back({tr.t[i], tr.s[i], tr.x[i][0], tr.x[i][1], tr.x[i][2]});

  liv::Report rep;
  rep.command = "flow";
  char extra[192];
  std::snprintf(extra, sizeof extra, "start=%.17g,%.17g,%.17g,%.17g|T=%.17g|dt=%.17g",
                start[0], start[1], start[2], start[3], T, dt);
  rep.config_hash =
      liv::config_hash_hex(canonical_config("flow", c, extra));
  rep.seed = c.seed;
  rep.pass = true;  // window exit is a reported outcome, not a failure
  rep.payload = json{{"system", sys.name},
                     {"n_steps", tr.t.size()},
                     {"truncated", tr.truncated},
                     {"final", {tr.t.back(), tr.s.back(), tr.x.back()[0],
                                tr.x.back()[1], tr.x.back()[2]}}};
  if (!c.out.empty()) {
    // Time series: rows are already ordered by t, and export_csv's
    // coordinate sort keys on t first, so the order is preserved.
    if (!liv::export_csv(c.out, {"t", "s", "u", "v", "theta"},
                         std::move(rows))) {
      std::fprintf(stderr, "livtool: cannot write %s\n", c.out.c_str());
      return 3;
    }
  }
  return emit_report(rep, t0, "");
}

int run_da_check(const Common& c, const liv::DAParams& p) {
  const auto t0 = std::chrono::steady_clock::now();
  check_common(c);
  p.validate();  // invalid_argument -> exit 2 in main
  const liv::DAReport dr = liv::da_report(p, c.grid);

  liv::Report rep;
  rep.command = "da-check";
  char extra[128];
  std::snprintf(extra, sizeof extra, "nu=%.17g|mu=%.17g|nubar=%.17g|eta=%.17g",
                p.nu, p.mu, p.nubar, p.eta);
  rep.config_hash =
      liv::config_hash_hex(canonical_config("da-check", c, extra));
  rep.seed = c.seed;
  const double expect = 4.0 * p.mu;
  const bool plus_ok = dr.min_contact_plus > 0.0;
  const bool minus_ok = dr.min_contact_minus <= 0.0;
  const bool zero_ok =
      std::abs(dr.liouville_at_zero - expect) <= 1e-8 * expect;
  rep.pass = plus_ok && minus_ok && zero_ok;
  rep.payload = json{{"min_contact_plus", dr.min_contact_plus},
                     {"min_contact_minus", dr.min_contact_minus},
                     {"liouville_at_zero", dr.liouville_at_zero},
                     {"argmin", {dr.argmin[0], dr.argmin[1], dr.argmin[2]}},
                     {"grid", dr.grid}};
  if (!rep.pass)
    std::fprintf(stderr,
                 "livtool: da-check failed (plus=%.15g minus=%.15g "
                 "at_zero=%.15g) at (%.15g, %.15g)\n",
                 dr.min_contact_plus, dr.min_contact_minus,
                 dr.liouville_at_zero, dr.argmin[0], dr.argmin[1]);
  return emit_report(rep, t0, c.out);
}

int run_bunching(const Common& c, const std::string& model_name,
                 const liv::DAParams& dap, double r_u, double r_s,
                 double t_max, int orbits) {
  const auto t0 = std::chrono::steady_clock::now();
  check_common(c);
  liv::ModelPtr model;
  if (model_name == "cat") model = liv::cat_suspension();
  else if (model_name == "geodesic-local") model = liv::geodesic_frame_local();
  else if (model_name == "da-chart") model = liv::da_chart(dap);
  else if (model_name == "const-rate") model = liv::const_rate_model(r_u, r_s);
  else throw std::invalid_argument("unknown model: " + model_name);

  const liv::BunchingReport br =
      liv::bunching_estimate(*model, t_max, orbits, c.seed);

  liv::Report rep;
  rep.command = "bunching";
  char extra[96];
  std::snprintf(extra, sizeof extra, "model=%s|tmax=%.17g|orbits=%d",
                model_name.c_str(), t_max, orbits);
  rep.config_hash =
      liv::config_hash_hex(canonical_config("bunching", c, extra));
  rep.seed = c.seed;
  rep.pass = true;  // a measurement; errors surface as exceptions
  rep.payload = json{{"model", model_name},
                     {"B_s", br.B_s},
                     {"T_max", br.T_max},
                     {"n_samples", br.n_samples}};
  return emit_report(rep, t0, c.out);
}

int run_persist(const Common& c, const std::string& perturb,
                std::vector<double> eps_list) {
  const auto t0 = std::chrono::steady_clock::now();
  check_common(c);
  const InterpolationSystem sys = resolve_system(c);
  const liv::ScalarField P = liv::ScalarField::parse(perturb);
  if (eps_list.empty()) eps_list = {1e-3, 5e-4, 1e-4};
  const auto reports =
      liv::skeleton_persistence(sys, P, eps_list, c.grid);

  liv::Report rep;
  rep.command = "persist";
  std::string extra = "perturb=" + perturb + "|eps=";
  for (double e : eps_list) {
    char eb[32];
    std::snprintf(eb, sizeof eb, "%.17g,", e);
    extra += eb;
  }
  rep.config_hash =
      liv::config_hash_hex(canonical_config("persist", c, extra));
  rep.seed = c.seed;
  rep.pass = true;
  json sweeps = json::array();
  for (const auto& pr : reports)
    sweeps.push_back(json{{"eps", pr.eps},
                          {"c0_distance", pr.c0_distance},
                          {"ratio", pr.ratio}});
  rep.payload = json{{"system", sys.name}, {"sweeps", sweeps}};
  return emit_report(rep, t0, c.out);
}

// Composition of the module-level identities at smoke scale.  Exit 0 iff
// every named check passes.
int run_suite(const Common& c, const std::string& model_filter) {
  const auto t0 = std::chrono::steady_clock::now();
  check_common(c);
  json checks = json::array();
  bool all_ok = true;
  const auto push = [&](const std::string& name, bool ok, double value) {
    checks.push_back(json{{"name", name}, {"pass", ok}, {"value", value}});
    if (!ok) {
      all_ok = false;
      std::fprintf(stderr, "livtool: suite check '%s' failed (value %.15g)\n",
                   name.c_str(), value);
    }
  };

  for (const auto& sys : liv::bundled_systems()) {
    if (model_filter != "all" && sys.model->name() != model_filter) continue;

    liv::ValidationOptions vo;
    vo.grid_n = std::min(c.grid, 24);
    vo.n_random = 200;
    vo.seed = c.seed;
    const liv::ValidationReport vr = validate_system(sys, vo);
    push(sys.name + ".valid", vr.ok, vr.min_density);

    // Closed-form (f, g) against the generic linear solve.
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto box = sys.model->sample_box();
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double s =
          sys.window_lo + (sys.window_hi - sys.window_lo) * uni(rng);
      Vec3 x;
      for (int k = 0; k < 3; ++k)
        x[static_cast<std::size_t>(k)] =
            box[static_cast<std::size_t>(k)][0] +
            (box[static_cast<std::size_t>(k)][1] -
             box[static_cast<std::size_t>(k)][0]) *
                uni(rng);
      const liv::LiouvilleField a = liv::liouville_field(sys, s, x);
      const liv::LiouvilleField b = liv::liouville_field_generic(sys, s, x);
      worst = std::max(worst, std::abs(a.f - b.f) / std::abs(b.f));
      worst = std::max(worst,
                       std::abs(a.g - b.g) / std::max(1e-12, std::abs(b.g)));
    }
    push(sys.name + ".dual_provenance", worst < 1e-9, worst);

    // Skeleton residual and synchronization along the fiber coordinate.
    double max_res = 0.0, max_sync = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double th = box[2][0] + (box[2][1] - box[2][0]) * (i + 0.5) / 64;
      const Vec3 x{0.0, 0.0, th};
      const double s = liv::skeleton_solve(sys, x);
      max_res = std::max(max_res,
                         std::abs(alpha_coeffs(sys, s, x).F.value));
      const liv::SyncCheck sc = liv::sync_check(sys, x);
      max_sync = std::max(max_sync,
                          std::abs(sc.f_at_skeleton / sc.inv_rtilde - 1.0));
    }
    push(sys.name + ".skeleton_residual", max_res < 1e-10, max_res);
    push(sys.name + ".synchronization", max_sync < 1e-9, max_sync);
  }

  if (model_filter == "cat" || model_filter == "all") {
    const double r_u = liv::cat_suspension()->expansion_rates({0, 0, 0}).r_u;
    const InterpolationSystem lin{liv::cat_suspension(),
                                  liv::bicontact_symmetric(),
                                  liv::Profile::linear(), -0.9, 0.9, "lin"};
    const double dens = liv::liouville_density(lin, 0.25, {0.3, 0.1, 0.6});
    push("cat.linear_density", std::abs(dens - 4 * r_u) < 1e-12, dens);

    const liv::BunchingReport br =
        liv::bunching_estimate(*liv::cat_suspension(), 8.0, 4, c.seed);
    push("cat.bunching", std::abs(br.B_s - 2.0) < 1e-12, br.B_s);

    const liv::ScalarField pure_cos =
        liv::field_affine(-1.0, 1.0, liv::ScalarField::cos_theta(1.0));
    const auto prs = liv::skeleton_persistence(
        liv::bundled_systems()[0], pure_cos, {1e-3}, 128);
    push("cat.persistence_ratio", std::abs(prs[0].ratio - 0.5) < 0.005,
         prs[0].ratio);
  }
  if (model_filter == "all") {
    const liv::DAParams p;
    const liv::DAReport dr = liv::da_report(p, 201);
    push("da.contact_plus", dr.min_contact_plus > 0.0, dr.min_contact_plus);
    push("da.reversed_violation", dr.min_contact_minus <= 0.0,
         dr.min_contact_minus);
    push("da.liouville_at_zero",
         std::abs(dr.liouville_at_zero - 4 * p.mu) < 1e-10 * 4 * p.mu,
         dr.liouville_at_zero);
  }

  liv::Report rep;
  rep.command = "suite";
  rep.config_hash = liv::config_hash_hex(
      canonical_config("suite", c, "model=" + model_filter));
  rep.seed = c.seed;
  rep.pass = all_ok;
  rep.payload = json{{"model", model_filter}, {"checks", checks}};
  return emit_report(rep, t0, c.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouville interpolation toolkit"};
  app.require_subcommand(1);

  Common cv, cs, cf, cd, cb, cp, cu;
  std::vector<double> flow_start;
  double flow_T = 1.0, flow_dt = 1e-2;
  liv::DAParams dap;
  std::string bunch_model = "cat";
  double bunch_ru = 1.0, bunch_rs = -1.0, bunch_tmax = 8.0;
  int bunch_orbits = 8;
  std::string perturb = "affine(-1,1,cos_theta(1))";
  std::vector<double> eps_list;
  std::string suite_model = "all";

  CLI::App* verify = app.add_subcommand("verify", "validate a system");
  add_common(verify, cv);

  CLI::App* skeleton =
      app.add_subcommand("skeleton", "solve the skeleton graph to CSV");
  add_common(skeleton, cs);

  CLI::App* flow = app.add_subcommand("flow", "integrate the Liouville flow");
  add_common(flow, cf);
  flow->add_option("--start", flow_start, "initial s,u,v,theta")
      ->delimiter(',')
      ->expected(4);
  flow->add_option("--T", flow_T, "integration time (signed)");
  flow->add_option("--dt", flow_dt, "step size (<= 1e-2)");

  CLI::App* da = app.add_subcommand("da-check", "DA deformation certificates");
  add_common(da, cd, false);
  da->add_option("--nu", dap.nu, "base contraction rate");
  da->add_option("--mu", dap.mu, "expansion rate");
  da->add_option("--nubar", dap.nubar, "deformed rate at the orbit");
  da->add_option("--eta", dap.eta, "deformation support half-width");
  cd.grid = 201;

  CLI::App* bunching = app.add_subcommand("bunching", "stable bunching constant");
  add_common(bunching, cb, false);
  bunching->add_option("--model", bunch_model,
                       "cat | geodesic-local | da-chart | const-rate");
  bunching->add_option("--tmax", bunch_tmax, "largest dyadic window");
  bunching->add_option("--orbits", bunch_orbits, "random starts");
  bunching->add_option("--nu", dap.nu, "da-chart: base contraction rate");
  bunching->add_option("--mu", dap.mu, "da-chart: expansion rate");
  bunching->add_option("--nubar", dap.nubar, "da-chart: deformed rate");
  bunching->add_option("--eta", dap.eta, "da-chart: support half-width");
  bunching->add_option("--r-u", bunch_ru, "const-rate: unstable rate");
  bunching->add_option("--r-s", bunch_rs, "const-rate: stable rate");

  CLI::App* persist =
      app.add_subcommand("persist", "skeleton response to h_s perturbations");
  add_common(persist, cp);
  persist->add_option("--perturb", perturb, "perturbation field id");
  persist->add_option("--eps-list", eps_list, "amplitudes")->delimiter(',');
  cp.grid = 256;

  CLI::App* suite = app.add_subcommand("suite", "bundled identity suite");
  add_common(suite, cu, false);
  suite->add_option("--model", suite_model,
                    "restrict to one host model, or 'all'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify(cv);
    if (skeleton->parsed()) return run_skeleton(cs);
    if (flow->parsed()) {
      if (flow_start.empty()) flow_start = {1.0, 0.0, 0.0, 0.0};
      return run_flow(cf, flow_start, flow_T, flow_dt);
    }
    if (da->parsed()) return run_da_check(cd, dap);
    if (bunching->parsed())
      return run_bunching(cb, bunch_model, dap, bunch_ru, bunch_rs,
                          bunch_tmax, bunch_orbits);
    if (persist->parsed()) return run_persist(cp, perturb, eps_list);
    if (suite->parsed()) return run_suite(cu, suite_model);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "livtool: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "livtool: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "livtool: %s\n", e.what());
    return 1;
  }
  return 2;
}
