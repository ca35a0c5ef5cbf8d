#pragma once

// Potential catalog for the scattering toolkit: real-valued, absolutely
// integrable potentials with closed-form |V| cumulatives and metadata the
// solvers need (support radius, kink locations, integrable singularities).

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiscat/quadrature.hpp"

namespace semiscat {

struct Potential {
  std::string name;
  std::vector<double> params;
  std::function<double(double)> eval;            // signed value V(x)
  std::function<double(double)> cumulative;      // integral of |V| over (-inf, x]
  double l1_norm = 0.0;                          // integral of |V|
  std::optional<double> support_radius;          // V = 0 for |x| > this, if set
  std::vector<double> breakpoints;               // jumps/kinks of V
  std::vector<SingularPoint> singular_points;    // integrable singularities
};

// `name(p0,p1,...)` entries; omitted parameters take catalog defaults:
//   free                                  V = 0
//   square_barrier(A=1, R=1)              A on [-R,R]
//   gaussian_truncated(A=1, sigma=0.5, R=1)  A exp(-x^2/sigma^2) on [-R,R]
//   inverse_sqrt_singular(A=1, R=1)       A |x|^{-1/2} on [-R,R]
//   sech_squared(A=1, ell=0.5, R=1)       A sech(x/ell)^2 on [-R,R]
//   oscillatory_decay(A=1, delta=1)       A sin(2x) (1+|x|)^{-1-delta}  (no compact support)
Potential catalog_get(const std::string& name, std::vector<double> params = {});
std::vector<std::string> catalog_names();

inline double cumulative_abs(const Potential& V, double x) { return V.cumulative(x); }

// Nonnegative integrable envelope m with |V| <= m.
struct Envelope {
  std::string description;
  std::function<double(double)> eval;
  std::function<double(double)> cumulative;  // integral over (-inf, x]
  double l1_norm = 0.0;
  std::optional<double> support_radius;
  double decay_delta = 0.0;  // m ~ |x|^{-1-this} tail when positive (no support)
  std::vector<double> breakpoints;
  std::vector<SingularPoint> singular_points;
};

Envelope envelope_abs(const Potential& V);            // m = |V|
Envelope envelope_indicator(double A, double R);      // m = A on [-R,R]
Envelope envelope_power(double A, double delta);      // m = A (1+|x|)^{-1-delta}

// Spot-check m >= |V| on a sample grid (refined near singularities).
bool envelope_dominates(const Envelope& m, const Potential& V, int samples = 4000);

// Exact transforms used by the scaling-invariance checks.
Potential dilate(const Potential& V, double h);       // y -> V(h y)
Potential scale_values(const Potential& V, double c); // x -> c V(x)

} // namespace semiscat
