#pragma once

// Weight functions w : R -> [-1,1] with nonnegative integrable derivative,
// built so that (k/h)|V w| <= w' with k = 4/sqrt(E). Two constructions:
//
//  sinh_envelope      w(x) = 2 e^{-kM/(2h)} sinh( (k/h) integral_a^x m ),
//                     a the median of the envelope m (equal mass on both
//                     sides, M = l1(m)), so w' = (k/h) cosh(...) 2e^{-..} m >= (2k/h) e^{-kM/h} m.
//  exterior_polynomial  w odd, zero on [-R,R],
//                     w(x) = 1 - ((1+R)/(1+x))^delta for x > R,
//                     w'(x) = delta (1+R)^delta (1+|x|)^{-1-delta} outside.
//
// Both are evaluated through differences of exponentials with nonpositive
// arguments, so no overflow or cosh/sinh cancellation occurs even when
// k·l1(m)/h is large.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semiscat/potential.hpp"

namespace semiscat {

struct WeightFunction {
  enum class Kind { sinh_envelope, exterior_polynomial, custom };
  Kind kind = Kind::custom;
  std::function<double(double)> w;   // values in [-1,1]
  std::function<double(double)> wp;  // derivative, >= 0
  double k = 0;        // 4/sqrt(E) for E-dependent constructions, else 0
  double h = 0, E = 0; // parameters of the construction (sinh_envelope)
  double median_a = 0; // sinh_envelope: zero of w
  double m_l1 = 0;     // sinh_envelope: l1 norm of the envelope
  double R = 0, delta = 0; // exterior_polynomial
  double wp_l1 = 0;    // integral of w' (total variation of w)
  bool degenerate = false; // envelope vanished identically
  std::optional<double> wp_support_radius; // w' = 0 for |x| > this, if set
  double wp_decay_delta = 0; // w' ~ |x|^{-1-this} tail when positive
  std::vector<double> breakpoints;
  std::vector<SingularPoint> wp_singular; // integrable singularities of w'
  std::string description;
};

WeightFunction build_sinh_weight(const Envelope& m, double h, double E);
WeightFunction build_exterior_weight(double R, double delta);

// Samples (k/h)|V w| - w' on a refined grid; the construction inequality
// holds iff the relative margin (w' - (k/h)|Vw|) / (w' + (k/h)|Vw|) stays
// nonnegative (up to roundoff).
struct W2Report {
  double min_rel_margin = 0;
  double argmin_x = 0;
  bool pass = false;
  int n_samples = 0;
};
W2Report verify_w2(const WeightFunction& w, const Potential& V, double h, double E,
                   int n = 20001);

void dump_weight_csv(const WeightFunction& w, const std::string& path,
                     double lo, double hi, int n = 1201);

// Multiplier a(x) for weighted norms ||a R a||; carries the decay metadata the
// window policies need and the singularity structure the quadratures need.
struct WeightMap {
  std::function<double(double)> a;
  std::function<double(double)> a_sq;
  std::optional<double> zero_outside; // a = 0 for |x| > this
  bool decays = false;                // a^2 has an algebraic integrable tail
  double decay_delta = 0;             // a(x)^2 ~ x^{-1-decay_delta}
  std::vector<double> breakpoints;
  std::vector<SingularPoint> singular;    // of a
  std::vector<SingularPoint> singular_sq; // of a^2
  std::string description;
};

WeightMap map_sqrt_wprime(const WeightFunction& w);   // a = (w')^{1/2}
WeightMap map_sqrt_envelope(const Envelope& m);       // a = m^{1/2}
WeightMap map_exterior_pair(double R, double delta);  // a = (1+|x|)^{-(1+d)/2} 1_{|x|>R}
WeightMap map_one();                                  // a = 1

} // namespace semiscat
