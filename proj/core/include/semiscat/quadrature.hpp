#pragma once

// Gauss-Legendre panel rules (double and double-double) and an adaptive
// Gauss-Kronrod integrator that survives integrable endpoint singularities
// |f| ~ c|x-s|^{-alpha}, alpha in (0,1), via the substitution x = s ± t^{1/(1-alpha)}.

#include <functional>
#include <vector>

#include "semiscat/dd.hpp"

namespace semiscat {

template <class Real>
struct GaussLegendre {
  std::vector<Real> x; // nodes on [0,1], ascending
  std::vector<Real> w; // weights summing to 1
};

// Nodes by Newton iteration on the Legendre recurrence; for dd the double
// nodes seed two further Newton corrections (quadratic convergence).
template <class Real>
GaussLegendre<Real> gauss_legendre_01(int p);

extern template GaussLegendre<double> gauss_legendre_01<double>(int);
extern template GaussLegendre<dd> gauss_legendre_01<dd>(int);

struct SingularPoint {
  double position = 0.0;
  double alpha = 0.5; // |f| ~ c|x-position|^{-alpha} nearby, 0 < alpha < 1
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0; // error estimate
  bool converged = true;
};

// Adaptive integration of f over [a,b]. The integrand is split at the given
// breakpoints and singular positions; intervals ending at a singular position
// are regularized by substitution before subdivision.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breakpoints = {},
                                    const std::vector<SingularPoint>& singular = {},
                                    double rel_tol = 1e-12, double abs_tol = 1e-15);

} // namespace semiscat
