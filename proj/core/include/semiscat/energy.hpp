#pragma once

// Numerical audit of the energy-flux machinery behind the weighted resolvent
// bounds.  For u = (P - E - i eps)^{-1} (w')^{1/2} v and the pointwise energy
// F = |h u'|^2 + E |u|^2, the audited facts are:
//
//   * flux identity:        integral of (wF)' over the line vanishes,
//   * dissipation identity: eps * ||u||^2 = -Im integral (w')^{1/2} v conj(u),
//   * pointwise inequality: (wF)' + 2 (w')^{1/2} |v u'| + (2h/k) w' |u u'|
//                            + 2 eps |w u u'| - w'|h u'|^2 - E w'|u|^2  >= 0,
//     which requires the weight compatibility (k/h) |V w| <= w',
//   * a-priori bound:       (E/7) int w'|u|^2 + (1/6) int w'|h u'|^2
//                            <= 15/(2 h^2) int |v|^2.
//
// (wF)' is assembled from its analytic expansion in (u, u', v, V, w, w') --
// never by numerically differentiating wF, since u'' does not exist pointwise
// for merely integrable V.  u itself is produced by the exact-kink Nystrom
// application of the resolvent kernel built from the two outgoing solutions,
// so the identity residuals measure discretization quality, not formula error.

#include "semiscat/jost.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/weights.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace semiscat {

// Forcing profile for the audit.  half_width marks where |v| has decayed to
// negligible size so the computational window can be chosen automatically.
struct TestFunction {
  std::string name;
  std::function<std::complex<double>(double)> v;
  double half_width = 6.0;
};

// Stock profiles stressing different terms of the inequality:
// a Gaussian bump, a smoothed plateau, and an oscillatory packet.
std::vector<TestFunction> audit_test_functions();

struct EnergyAuditOptions {
  int p = 12;               // nodes per panel on the audit mesh
  double max_len = 0.4;     // panel length cap (also capped by wavelength)
  double wl_factor = 2.0;   // panels per unit: max_len <= wl_factor / |lambda|
  double tail_drop = 1e-12; // window grows until exp(-2 Im(lambda) pad) <= this
  JostOptions jost{};
};

struct EnergyTrace {
  std::vector<double> x;                 // audit grid (quadrature nodes)
  std::vector<std::complex<double>> u;   // resolvent applied to (w')^{1/2} v
  std::vector<std::complex<double>> du;  // its derivative
  std::vector<double> F;                 // |h u'|^2 + E |u|^2
  std::vector<double> wF;
  std::vector<double> wF_prime;          // analytic expansion of (wF)'
  std::vector<double> margin;            // pointwise slack of the inequality
  std::vector<double> qw;                // quadrature weights

  double flux_integral = 0;  // quadrature of (wF)'
  double flux_scale = 0;     // quadrature of w' F
  double flux_rel = 0;       // |flux_integral| / flux_scale

  double eps_lhs = 0;        // eps * int |u|^2
  double eps_rhs = 0;        // -Im int (w')^{1/2} v conj(u)
  double eps_rel = 0;

  double min_margin_rel = 0; // most negative margin over local term scale
  double argmin_x = 0;

  double wp_u_sq = 0;        // int w' |u|^2
  double wp_hdu_sq = 0;      // int w' |h u'|^2
  double v_l2_sq = 0;        // int |v|^2

  double h = 0, E = 0, eps = 0, k = 0;
};

// Solves for u with outgoing boundary conditions (V must have compact
// support) and evaluates every audited quantity on one spectral grid.
// Requires eps > 0: the flux identity lives in L^1 only for a decaying u.
EnergyTrace audit_energy(const Potential& V, const WeightFunction& w,
                         const TestFunction& v, double h, double E, double eps,
                         const EnergyAuditOptions& opts = {});

struct AprioriReport {
  double lhs = 0;    // (E/7) int w'|u|^2 + (1/6) int w'|h u'|^2
  double rhs = 0;    // 15/(2 h^2) int |v|^2
  double ratio = 0;  // lhs / rhs, must be <= 1
  bool pass = false;
};

AprioriReport audit_apriori_bound(const EnergyTrace& trace, double v_norm_sq);

// CSV dump of (x, F, wF, (wF)', margin) for plotting.
void dump_trace_csv(const EnergyTrace& t, const std::string& path);

} // namespace semiscat
