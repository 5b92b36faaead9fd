#pragma once

// 1-forms on R_s x M annihilating <X, d_s>, written in the adapted coframe
// (alpha_u, alpha_s):  alpha = E alpha_u + F alpha_s.  Both coframe legs are
// invariant lines of the flow, so Lie derivatives act coefficientwise and
// the degenerate 4-form condition reduces to a 2-form pairing; no general
// exterior algebra is needed.

#include "liv/jet.hpp"

namespace liv {

struct AnnihilatorForm {
  Jet2 E;  // alpha_u coefficient
  Jet2 F;  // alpha_s coefficient
};

// Multiple of the oriented area element alpha_s ^ alpha_u.
struct Area2 {
  double coeff = 0.0;
};

// L_X alpha = (X.E + r_u E) alpha_u + (X.F + r_s F) alpha_s.
// Output jets carry exact value and d_s slots; d_X, d_sX, d_ss would need
// second X-derivatives and are zeroed.
inline AnnihilatorForm lie_X(const AnnihilatorForm& a, double r_u, double r_s) {
  AnnihilatorForm r;
  r.E = {a.E.d_X + r_u * a.E.value, 0.0, a.E.d_sX + r_u * a.E.d_s, 0.0, 0.0};
  r.F = {a.F.d_X + r_s * a.F.value, 0.0, a.F.d_sX + r_s * a.F.d_s, 0.0, 0.0};
  return r;
}

// L_{d_s} alpha: coefficients replaced by their d_s jets (slots shift down;
// the two top slots are zeroed).
inline AnnihilatorForm lie_s(const AnnihilatorForm& a) {
  AnnihilatorForm r;
  r.E = {a.E.d_s, a.E.d_sX, a.E.d_ss, 0.0, 0.0};
  r.F = {a.F.d_s, a.F.d_sX, a.F.d_ss, 0.0, 0.0};
  return r;
}

// a ^ b as a multiple of alpha_s ^ alpha_u (so alpha_s ^ alpha_u itself has
// coefficient +1, matching the orientation convention iota_X Omega).
inline Area2 wedge(const AnnihilatorForm& a, const AnnihilatorForm& b) {
  return {a.F.value * b.E.value - a.E.value * b.F.value};
}

struct DefiningSolve {
  double f = 0.0;
  double g = 0.0;
  double J = 0.0;  // solve determinant; equals -density when alpha is Liouville
};

// Solves alpha = f L_X alpha + g L_{d_s} alpha componentwise (2x2 Cramer).
// Callers guard |J|; no degeneracy check here.
inline DefiningSolve solve_defining_identity(const AnnihilatorForm& alpha,
                                             double r_u, double r_s) {
  const double A = alpha.E.d_X + r_u * alpha.E.value;
  const double B = alpha.E.d_s;
  const double C = alpha.F.d_X + r_s * alpha.F.value;
  const double D = alpha.F.d_s;
  DefiningSolve out;
  out.J = A * D - B * C;
  out.f = (alpha.E.value * D - B * alpha.F.value) / out.J;
  out.g = (A * alpha.F.value - C * alpha.E.value) / out.J;
  return out;
}

}  // namespace liv
