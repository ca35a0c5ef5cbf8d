#pragma once

// Resolvent integral kernel of (P - E - i eps)^{-1}, P = -h^2 d^2/dx^2 + V:
//
//   K(x,y) = -u_minus(min) u_plus(max) / (h^2 W),   W = 2 i lam A,
//
// built from the two Jost solutions. For V = 0 this reduces to
// i e^{i lam |x-y|} / (2 h^2 lam). Outside the support of V the closed-form
// scattering representation is used, so exterior samples carry no
// interpolation error.

#include <complex>
#include <string>
#include <vector>

#include "semiscat/jost.hpp"

namespace semiscat {

struct KernelEval {
  JostSolution up, um;
  ScatteringData sd;
  std::complex<double> value(double x, double y) const {
    const double xm = std::min(x, y), ym = std::max(x, y);
    const std::complex<double> num = um.eval_u(xm) * up.eval_u(ym);
    return -num / (sd.W * (up.h * up.h));
  }
};

KernelEval make_kernel(const Potential& V, double h, double E, double eps,
                       const JostOptions& opts = {});

std::complex<double> free_kernel(double h, double E, double eps, double x, double y);

// Exterior bound scan at eps = 0: samples |K(x,y)| over |x|,|y| > R and
// compares against both closed-form bounds
//   sharp:  (|A| + |B|) / (2 |A| h sqrt(E))
//   coarse: 1 / (h sqrt(E)).
// Coefficients come from the double-double solve so the ratios are exact to
// ~1e-15; pass means neither bound is exceeded beyond roundoff.
struct ExteriorBoundReport {
  double max_abs_K = 0;
  double bound_sharp = 0, bound_coarse = 0;
  double ratio_sharp = 0, ratio_coarse = 0;
  bool pass = false;
};
ExteriorBoundReport check_exterior_kernel_bound(const Potential& V, double h, double E,
                                                int ngrid = 48, double span = 40.0);

void dump_kernel_csv(const KernelEval& K, const std::string& path,
                     const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace semiscat
