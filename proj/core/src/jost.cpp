#include "semiscat/jost.hpp"

#include <algorithm>
#include <cmath>

namespace semiscat {

template JostSolutionT<double> solve_jost_T<double>(
    const Potential&, double, double, double, int, const JostOptions&);
template JostSolutionT<dd> solve_jost_T<dd>(
    const Potential&, double, double, double, int, const JostOptions&);
template ScatteringDataT<double> extract_scattering<double>(
    const JostSolutionT<double>&, const JostSolutionT<double>&);
template ScatteringDataT<dd> extract_scattering<dd>(
    const JostSolutionT<dd>&, const JostSolutionT<dd>&);

JostPair jost_pair(const Potential& V, double h, double E, double eps,
                   const JostOptions& opts) {
  JostPair out{solve_jost_T<double>(V, h, E, eps, +1, opts),
               solve_jost_T<double>(V, h, E, eps, -1, opts),
               {}};
  out.sd = extract_scattering(out.plus, out.minus);
  return out;
}

JostPairDD jost_pair_dd(const Potential& V, double h, double E, double eps,
                        const JostOptions& opts) {
  JostPairDD out{solve_jost_T<dd>(V, h, E, eps, +1, opts),
                 solve_jost_T<dd>(V, h, E, eps, -1, opts),
                 {}};
  out.sd = extract_scattering(out.plus, out.minus);
  return out;
}

double jost_residual(const JostSolution& sol, const Potential& V, int n_samples) {
  using Cd = std::complex<double>;
  const double R = V.support_radius ? *V.support_radius : 0.0;
  const Cd lam = sol.lambda, c = sol.c;
  const Cd il = detail::mul_i(lam);

  auto moment = [&](double a, double b, int sign) -> Cd {
    if (!(a < b)) return {0.0, 0.0};
    std::vector<double> brk;
    for (double t : V.breakpoints)
      if (t > a && t < b) brk.push_back(t);
    std::vector<SingularPoint> sing;
    for (const auto& s : V.singular_points)
      if (s.position >= a && s.position <= b) sing.push_back(s);
    auto fre = [&](double t) {
      const Cd w = exp((sign > 0 ? il : -il) * t) * V.eval(t) * sol.eval_u(t);
      return w.real();
    };
    auto fim = [&](double t) {
      const Cd w = exp((sign > 0 ? il : -il) * t) * V.eval(t) * sol.eval_u(t);
      return w.imag();
    };
    const auto qre = integrate_adaptive(fre, a, b, brk, sing, 1e-12, 1e-14);
    const auto qim = integrate_adaptive(fim, a, b, brk, sing, 1e-12, 1e-14);
    return {qre.value, qim.value};
  };

  double worst = 0.0, scale = 0.0;
  std::vector<double> xs;
  for (int k = 0; k < n_samples; ++k)
    xs.push_back(sol.lo + (sol.hi - sol.lo) * (k + 0.5) / n_samples);
  for (double x : xs) scale = std::max(scale, std::abs(sol.eval_u(x)));
  for (double x : xs) {
    const Cd u = sol.eval_u(x);
    const Cd ep = exp(il * x), em = exp(-il * x);
    Cd rhs;
    if (sol.side > 0) {
      const Cd Sp = moment(std::max(x, -R), R, +1);
      const Cd Sm = moment(std::max(x, -R), R, -1);
      rhs = ep + c * (em * Sp - ep * Sm);
    } else {
      const Cd Tm = moment(-R, std::min(x, R), -1);
      const Cd Tp = moment(-R, std::min(x, R), +1);
      rhs = em + c * (ep * Tm - em * Tp);
    }
    worst = std::max(worst, std::abs(u - rhs) / std::max(scale, 1e-300));
  }
  return worst;
}

} // namespace semiscat
