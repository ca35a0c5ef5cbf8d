#include "semiscat/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace semiscat {

KernelEval make_kernel(const Potential& V, double h, double E, double eps,
                       const JostOptions& opts) {
  KernelEval K{solve_jost(V, h, E, eps, +1, opts),
               solve_jost(V, h, E, eps, -1, opts),
               {}};
  K.sd = extract_scattering(K.up, K.um);
  return K;
}

std::complex<double> free_kernel(double h, double E, double eps, double x, double y) {
  const std::complex<double> lam =
      (eps == 0.0) ? std::complex<double>(std::sqrt(E) / h, 0.0)
                   : std::sqrt(std::complex<double>(E, eps)) / h;
  const std::complex<double> i(0.0, 1.0);
  return i * std::exp(i * lam * std::fabs(x - y)) / (2.0 * h * h * lam);
}

ExteriorBoundReport check_exterior_kernel_bound(const Potential& V, double h, double E,
                                                int ngrid, double span) {
  if (!V.support_radius)
    throw std::invalid_argument("check_exterior_kernel_bound: potential must be compactly supported");
  const double R = *V.support_radius;
  const auto pair = jost_pair_dd(V, h, E, 0.0);
  const auto& sd = pair.sd;

  // closed-form exterior evaluation with double-double coefficients cast down
  const std::complex<double> A(to_double(sd.A.re), to_double(sd.A.im));
  const std::complex<double> B(to_double(sd.B.re), to_double(sd.B.im));
  const std::complex<double> C(to_double(sd.C.re), to_double(sd.C.im));
  const std::complex<double> D(to_double(sd.D.re), to_double(sd.D.im));
  const double lam = std::sqrt(E) / h;
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> W = 2.0 * i * lam * A;

  auto u_plus = [&](double x) -> std::complex<double> {
    if (x >= R) return std::exp(i * lam * x);
    return A * std::exp(i * lam * x) + B * std::exp(-i * lam * x); // x <= -R
  };
  auto u_minus = [&](double x) -> std::complex<double> {
    if (x <= -R) return std::exp(-i * lam * x);
    return C * std::exp(i * lam * x) + D * std::exp(-i * lam * x); // x >= R
  };

  ExteriorBoundReport rep;
  const double aA = std::abs(A), aB = std::abs(B);
  rep.bound_sharp = (aA + aB) / (2.0 * aA * h * std::sqrt(E));
  rep.bound_coarse = 1.0 / (h * std::sqrt(E));

  // exterior sample grid on both sides, log-spaced away from the support edge
  std::vector<double> pts;
  for (int k = 0; k < ngrid; ++k) {
    const double t = R + 1e-6 + (span - 1e-6) * k / (ngrid - 1.0);
    pts.push_back(t);
    pts.push_back(-t);
  }
  for (double x : pts)
    for (double y : pts) {
      const double xm = std::min(x, y), ym = std::max(x, y);
      const std::complex<double> K = -(u_minus(xm) * u_plus(ym)) / (W * h * h);
      rep.max_abs_K = std::max(rep.max_abs_K, std::abs(K));
    }
  rep.ratio_sharp = rep.max_abs_K / rep.bound_sharp;
  rep.ratio_coarse = rep.max_abs_K / rep.bound_coarse;
  rep.pass = rep.ratio_sharp <= 1.0 + 1e-12 && rep.ratio_coarse <= 1.0 + 1e-12 &&
             rep.bound_sharp <= rep.bound_coarse * (1.0 + 1e-12);
  return rep;
}

void dump_kernel_csv(const KernelEval& K, const std::string& path,
                     const std::vector<double>& xs, const std::vector<double>& ys) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("dump_kernel_csv: cannot open " + path);
  std::fprintf(f, "x,y,re_K,im_K\n");
  for (double x : xs)
    for (double y : ys) {
      const auto v = K.value(x, y);
      std::fprintf(f, "%.12e,%.12e,%.12e,%.12e\n", x, y, v.real(), v.imag());
    }
  std::fclose(f);
}

} // namespace semiscat
