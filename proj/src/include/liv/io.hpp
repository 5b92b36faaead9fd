#pragma once

// JSON system descriptors, deterministic report/CSV emission, and config
// hashing for the command-line front end.
//
// Descriptor shape:
//   {
//     "model": "cat" | "geodesic-local" | "const-rate" | "da-chart",
//     "model_params": {...},            // model dependent, optional
//     "gauge": "exponential" | "symmetric" | "fibration",
//     "h_u": <field>, "h_s": <field>,   // exponential gauge
//     "h_plus": <field>,                // fibration gauge
//     "profile": {"kind": "exponential" | "linear" | "general",
//                  "params": {...}},    // general: separable w spec
//     "window": [a, b],
//     "name": "..."                     // optional
//   }
// Fields are either id strings ("cos_theta(0.5)") or objects
// {"type": "const"|"cos_theta"|"expr", ...}.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "liv/lis.hpp"
#include "liv/numerics.hpp"

namespace liv {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return json::parse(in);  // throws json::parse_error on malformed input
}

inline ScalarField field_from_json(const json& j) {
  if (j.is_string()) return ScalarField::parse(j.get<std::string>());
  if (j.is_object()) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "const")
      return ScalarField::constant(j.at("value").get<double>());
    if (type == "cos_theta")
      return ScalarField::cos_theta(j.at("amplitude").get<double>());
    if (type == "expr")
      return ScalarField::expression(j.at("text").get<std::string>());
    throw std::invalid_argument("unknown field type: " + type);
  }
  throw std::invalid_argument("field spec must be a string or object");
}

inline ModelPtr model_from_json(const json& desc) {
  const std::string name = desc.at("model").get<std::string>();
  const json params = desc.value("model_params", json::object());
  if (name == "cat") return cat_suspension();
  if (name == "geodesic-local") return geodesic_frame_local();
  if (name == "const-rate")
    return const_rate_model(params.at("r_u").get<double>(),
                            params.at("r_s").get<double>());
  if (name == "da-chart") {
    DAParams p;
    p.nu = params.value("nu", p.nu);
    p.mu = params.value("mu", p.mu);
    p.nubar = params.value("nubar", p.nubar);
    p.eta = params.value("eta", p.eta);
    p.T = params.value("T", p.T);
    return da_chart(p);
  }
  throw std::invalid_argument("unknown model: " + name);
}

// Separable (s, x) field {"shape": "const"|"linear"|"cos"|"sin",
// "c0": ..., "c1": ..., "base": <field>}.
inline SXField sx_from_json(const json& j) {
  const std::string shape = j.value("shape", std::string("const"));
  SShape sh;
  if (shape == "const") sh.kind = SShape::kConst;
  else if (shape == "linear") sh.kind = SShape::kLinear;
  else if (shape == "cos") sh.kind = SShape::kCos;
  else if (shape == "sin") sh.kind = SShape::kSin;
  else throw std::invalid_argument("unknown s-shape: " + shape);
  sh.c0 = j.value("c0", 0.0);
  sh.c1 = j.value("c1", 0.0);
  const ScalarField base = j.contains("base")
                               ? field_from_json(j.at("base"))
                               : ScalarField::constant(1.0);
  return SXField::separable(sh, base);
}

inline InterpolationSystem system_from_descriptor(const json& desc) {
  ModelPtr model = model_from_json(desc);

  BiContactCoeffs bc;
  const std::string gauge = desc.value("gauge", std::string("exponential"));
  if (gauge == "symmetric") {
    bc = bicontact_symmetric();
  } else if (gauge == "exponential") {
    bc = bicontact_exponential(field_from_json(desc.at("h_u")),
                               field_from_json(desc.at("h_s")));
  } else if (gauge == "fibration") {
    bc = bicontact_fibration(field_from_json(desc.at("h_plus")));
  } else {
    throw std::invalid_argument("unknown gauge: " + gauge);
  }

  const json prof = desc.at("profile");
  const std::string kind = prof.at("kind").get<std::string>();
  Profile profile = Profile::exponential();
  if (kind == "linear") profile = Profile::linear();
  else if (kind == "exponential") profile = Profile::exponential();
  else if (kind == "general")
    profile = Profile::general(sx_from_json(prof.at("params")));
  else throw std::invalid_argument("unknown profile kind: " + kind);

  const json win = desc.at("window");
  if (!win.is_array() || win.size() != 2)
    throw std::invalid_argument("window must be [a, b]");
  const double lo = win[0].get<double>();
  const double hi = win[1].get<double>();
  if (!(lo < hi)) throw std::invalid_argument("window must satisfy a < b");

  const std::string name =
      desc.value("name", model->name() + "-system");
  return InterpolationSystem{std::move(model), std::move(bc),
                             std::move(profile), lo, hi, name};
}

// ---------------------------------------------------------------------------
// Reports.

struct Report {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  bool pass = false;
  json payload;  // numeric results only; byte-identical across reruns
  double wall_time_ms = 0.0;
};

inline std::string config_hash_hex(const std::string& canonical) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  return buf;
}

inline json report_to_json(const Report& r) {
  return json{{"command", r.command},     {"config_hash", r.config_hash},
              {"seed", r.seed},           {"pass", r.pass},
              {"payload", r.payload},     {"wall_time_ms", r.wall_time_ms}};
}

// ---------------------------------------------------------------------------
// CSV.

// Fixed-precision CSV with rows sorted lexicographically by columns; returns
// false when the path cannot be opened for writing.
inline bool export_csv(const std::string& path,
                       const std::vector<std::string>& header,
                       std::vector<std::vector<double>> rows) {
  std::sort(rows.begin(), rows.end());
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) return false;
  for (std::size_t i = 0; i < header.size(); ++i)
    std::fprintf(fp, "%s%s", header[i].c_str(),
                 i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      std::fprintf(fp, "%.15g%s", row[i], i + 1 < row.size() ? "," : "\n");
  }
  std::fclose(fp);
  return true;
}

}  // namespace liv
