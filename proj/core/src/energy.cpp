#include "semiscat/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace semiscat {

namespace {
using Cd = std::complex<double>;
} // namespace

std::vector<TestFunction> audit_test_functions() {
  std::vector<TestFunction> out;
  out.push_back({"gaussian_bump",
                 [](double x) { return Cd(std::exp(-x * x), 0.0); }, 6.5});
  out.push_back({"smoothed_plateau",
                 [](double x) {
                   return Cd(0.5 * (std::tanh(2.0 * (x + 2.0)) -
                                    std::tanh(2.0 * (x - 2.0))),
                             0.0);
                 },
                 20.0});
  out.push_back({"oscillatory_packet",
                 [](double x) {
                   const double env = std::exp(-x * x);
                   return Cd(std::cos(3.0 * x) * env, std::sin(3.0 * x) * env);
                 },
                 6.5});
  return out;
}

EnergyTrace audit_energy(const Potential& V, const WeightFunction& w,
                         const TestFunction& v, double h, double E, double eps,
                         const EnergyAuditOptions& opts) {
  if (!(h > 0) || !(E > 0))
    throw std::invalid_argument("audit_energy: need h > 0 and E > 0");
  if (!(eps > 0))
    throw std::invalid_argument(
        "audit_energy: the flux identity needs eps > 0 (u must decay)");
  if (!(E >= 2 * eps))
    throw std::invalid_argument("audit_energy: outside the regime E >= 2 eps");

  const JostPair jp = jost_pair(V, h, E, eps, opts.jost);
  const double im_lam = std::imag(jp.plus.lambda);
  const double abs_lam = std::abs(jp.plus.lambda);

  double base = std::max(v.half_width + 2.0, jp.plus.hi + 1.0);
  for (double b : w.breakpoints) base = std::max(base, std::fabs(b) + 2.0);
  const double X = base + std::log(1.0 / opts.tail_drop) / (2.0 * im_lam);

  MeshSpec ms;
  ms.lo = -X;
  ms.hi = X;
  for (double b : V.breakpoints) ms.breakpoints.push_back(b);
  for (double b : w.breakpoints) ms.breakpoints.push_back(b);
  ms.breakpoints.push_back(jp.plus.lo);
  ms.breakpoints.push_back(jp.plus.hi);
  auto add_sing = [&ms](double pos) {
    for (const auto& s : ms.singular)
      if (std::fabs(s.position - pos) < 1e-12) return;
    ms.singular.push_back({pos, 0.75});
  };
  for (const auto& s : V.singular_points) add_sing(s.position);
  for (const auto& s : w.wp_singular) add_sing(s.position);
  ms.p = opts.p;
  ms.max_len = std::min(opts.max_len, opts.wl_factor / abs_lam);
  const Mesh<double> mesh = build_mesh<double>(ms);

  const int p = ms.p;
  const size_t npan = mesh.panels.size();
  const size_t N = mesh.n();

  EnergyTrace t;
  t.h = h;
  t.E = E;
  t.eps = eps;
  t.k = w.k > 0 ? w.k : 4.0 / std::sqrt(E);
  t.x.resize(N);
  t.qw.resize(N);
  t.u.resize(N);
  t.du.resize(N);
  t.F.resize(N);
  t.wF.resize(N);
  t.wF_prime.resize(N);
  t.margin.resize(N);

  std::vector<Cd> vv(N), gv(N), upv(N), umv(N), dupv(N), dumv(N), gm(N), gp(N);
  std::vector<double> jc(N), wv(N), wpv(N), sqwp(N);
  for (size_t k = 0; k < npan; ++k) {
    const auto& pa = mesh.panels[k];
    for (int j = 0; j < p; ++j) {
      const size_t jj = k * size_t(p) + size_t(j);
      t.x[jj] = pa.x[j];
      jc[jj] = pa.jac[j];
      t.qw[jj] = mesh.wfull(pa, j) * pa.jac[j];
      vv[jj] = v.v(t.x[jj]);
      wv[jj] = w.w(t.x[jj]);
      wpv[jj] = std::max(0.0, w.wp(t.x[jj]));
      sqwp[jj] = std::sqrt(wpv[jj]);
      gv[jj] = sqwp[jj] * vv[jj];
      upv[jj] = jp.plus.eval_u(t.x[jj]);
      umv[jj] = jp.minus.eval_u(t.x[jj]);
      dupv[jj] = jp.plus.eval_du(t.x[jj]);
      dumv[jj] = jp.minus.eval_du(t.x[jj]);
      gm[jj] = umv[jj] * gv[jj];
      gp[jj] = upv[jj] * gv[jj];
    }
  }

  // prefix/suffix panel sums for the semiseparable kernel application
  std::vector<Cd> Gm(npan), Gp(npan), preS(npan), sufS(npan);
  for (size_t k = 0; k < npan; ++k) {
    Cd sm{}, sp{};
    for (int j = 0; j < p; ++j) {
      const size_t jj = k * size_t(p) + size_t(j);
      sm += t.qw[jj] * gm[jj];
      sp += t.qw[jj] * gp[jj];
    }
    Gm[k] = sm;
    Gp[k] = sp;
  }
  Cd acc{};
  for (size_t k = 0; k < npan; ++k) { preS[k] = acc; acc += Gm[k]; }
  acc = Cd{};
  for (size_t k = npan; k-- > 0;) { sufS[k] = acc; acc += Gp[k]; }

  const Cd cK = -1.0 / (jp.sd.W * (h * h));
  for (size_t k = 0; k < npan; ++k) {
    const auto& pa = mesh.panels[k];
    for (int i = 0; i < p; ++i) {
      const size_t ii = k * size_t(p) + size_t(i);
      Cd Pre = preS[k], Suf = sufS[k];
      for (int j = 0; j < p; ++j) {
        const size_t jj = k * size_t(p) + size_t(j);
        Pre += mesh.pre(pa, i, j) * jc[jj] * gm[jj];
        Suf += mesh.suf(pa, i, j) * jc[jj] * gp[jj];
      }
      t.u[ii] = cK * (upv[ii] * Pre + umv[ii] * Suf);
      t.du[ii] = cK * (dupv[ii] * Pre + dumv[ii] * Suf);
    }
  }

  // pointwise quantities from the analytic expansion of (wF)'
  double min_rel = 0.0;
  double argmin = t.x.empty() ? 0.0 : t.x[0];
  bool first = true;
  for (size_t i = 0; i < N; ++i) {
    const double au = std::abs(t.u[i]);
    const double adu = std::abs(t.du[i]);
    const double Fi = h * h * adu * adu + E * au * au;
    t.F[i] = Fi;
    t.wF[i] = wv[i] * Fi;

    const double Vx = V.eval(t.x[i]);
    const double re_v_du = std::real(vv[i] * std::conj(t.du[i]));
    const double re_u_du = std::real(t.u[i] * std::conj(t.du[i]));
    const double im_u_du = std::imag(t.u[i] * std::conj(t.du[i]));
    const double wfp = -2.0 * wv[i] * sqwp[i] * re_v_du +
                       2.0 * wv[i] * Vx * re_u_du +
                       2.0 * eps * wv[i] * im_u_du +
                       wpv[i] * h * h * adu * adu + E * wpv[i] * au * au;
    t.wF_prime[i] = wfp;

    const double t_v = 2.0 * sqwp[i] * std::abs(vv[i]) * adu;
    const double t_Vw = (2.0 * h / t.k) * wpv[i] * au * adu;
    const double t_eps = 2.0 * eps * std::fabs(wv[i]) * au * adu;
    const double t_du = wpv[i] * h * h * adu * adu;
    const double t_u = E * wpv[i] * au * au;
    const double m = wfp + t_v + t_Vw + t_eps - t_du - t_u;
    t.margin[i] = m;
    const double scale =
        std::fabs(wfp) + t_v + t_Vw + t_eps + t_du + t_u + 1e-300;
    const double rel = m / scale;
    if (first || rel < min_rel) {
      min_rel = rel;
      argmin = t.x[i];
      first = false;
    }
  }
  t.min_margin_rel = min_rel;
  t.argmin_x = argmin;

  // quadrature of the audited identities
  double flux = 0, fscale = 0, eps_lhs = 0, u_sq = 0, du_sq = 0, v_sq = 0;
  Cd pair_vu{};
  for (size_t i = 0; i < N; ++i) {
    flux += t.qw[i] * t.wF_prime[i];
    fscale += t.qw[i] * wpv[i] * t.F[i];
    const double au2 = std::norm(t.u[i]);
    eps_lhs += t.qw[i] * eps * au2;
    pair_vu += t.qw[i] * (sqwp[i] * vv[i] * std::conj(t.u[i]));
    u_sq += t.qw[i] * wpv[i] * au2;
    du_sq += t.qw[i] * wpv[i] * (h * h * std::norm(t.du[i]));
    v_sq += t.qw[i] * std::norm(vv[i]);
  }
  t.flux_integral = flux;
  t.flux_scale = fscale;
  t.flux_rel = std::fabs(flux) / std::max(fscale, 1e-300);
  t.eps_lhs = eps_lhs;
  t.eps_rhs = -std::imag(pair_vu);
  t.eps_rel = std::fabs(eps_lhs - t.eps_rhs) / std::max(eps_lhs, 1e-300);
  t.wp_u_sq = u_sq;
  t.wp_hdu_sq = du_sq;
  t.v_l2_sq = v_sq;
  return t;
}

AprioriReport audit_apriori_bound(const EnergyTrace& trace, double v_norm_sq) {
  AprioriReport r;
  r.lhs = (trace.E / 7.0) * trace.wp_u_sq + trace.wp_hdu_sq / 6.0;
  r.rhs = 15.0 / (2.0 * trace.h * trace.h) * v_norm_sq;
  r.ratio = r.lhs / std::max(r.rhs, 1e-300);
  r.pass = r.ratio <= 1.0;
  return r;
}

void dump_trace_csv(const EnergyTrace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_trace_csv: cannot open " + path);
  out << "x,F,wF,wF_prime,margin\n";
  char buf[200];
  for (size_t i = 0; i < t.x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e,%.12e,%.12e\n", t.x[i],
                  t.F[i], t.wF[i], t.wF_prime[i], t.margin[i]);
    out << buf;
  }
}

} // namespace semiscat
