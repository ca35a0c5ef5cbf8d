#include "semiscat/norm.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

extern "C" {
void zgttrf_(const int* n, std::complex<double>* dl, std::complex<double>* d,
             std::complex<double>* du, std::complex<double>* du2, int* ipiv, int* info);
void zgttrs_(const char* trans, const int* n, const int* nrhs,
             const std::complex<double>* dl, const std::complex<double>* d,
             const std::complex<double>* du, const std::complex<double>* du2,
             const int* ipiv, std::complex<double>* b, const int* ldb, int* info,
             size_t trans_len);
}

namespace semiscat {
namespace {

using Cd = std::complex<double>;

// deterministic start vector (mt19937_64 sequence is pinned by the standard)
std::vector<Cd> start_vector(size_t n) {
  std::mt19937_64 rng(0x5eed5ca7ULL);
  std::vector<Cd> z(n);
  for (auto& v : z) {
    const double a = 2.0 * (double(rng()) / double(UINT64_MAX)) - 1.0;
    const double b = 2.0 * (double(rng()) / double(UINT64_MAX)) - 1.0;
    v = {a, b};
  }
  return z;
}

double vec_norm(const std::vector<Cd>& z) {
  double s = 0;
  for (const auto& v : z) s += std::norm(v);
  return std::sqrt(s);
}

// ---------------------------------------------------------------- kernel op

// Discretized  a R a  on a window mesh, in the L^2-isometric scaling
// M_hat = D_{sqrt(q)} M_nystrom D_{1/sqrt(q)}. The semiseparable structure
// K(x,y) = cK * u_minus(min) u_plus(max) gives O(N p) applies; the |x-y| kink
// inside a panel is integrated exactly through the prefix/suffix matrices.
struct WindowOp {
  Mesh<double> mesh;
  int p = 0;
  std::vector<double> x, q, jc, av, sq;
  std::vector<Cd> up, um;
  Cd cK{};

  size_t n() const { return x.size(); }

  void apply(const Cd* z, Cd* out) const {
    const size_t npan = mesh.panels.size();
    std::vector<Cd> gm(n()), gp(n());
    for (size_t j = 0; j < n(); ++j) {
      const Cd f = av[j] * (z[j] / sq[j]);
      gm[j] = um[j] * f;
      gp[j] = up[j] * f;
    }
    std::vector<Cd> Gm(npan), Gp(npan);
    for (size_t k = 0; k < npan; ++k) {
      Cd sm{}, sp{};
      for (int j = 0; j < p; ++j) {
        const size_t jj = k * p + j;
        sm += q[jj] * gm[jj];
        sp += q[jj] * gp[jj];
      }
      Gm[k] = sm; Gp[k] = sp;
    }
    std::vector<Cd> pre(npan), suf(npan);
    Cd acc{};
    for (size_t k = 0; k < npan; ++k) { pre[k] = acc; acc += Gm[k]; }
    acc = Cd{};
    for (size_t k = npan; k-- > 0;) { suf[k] = acc; acc += Gp[k]; }
    for (size_t k = 0; k < npan; ++k) {
      const auto& pa = mesh.panels[k];
      for (int i = 0; i < p; ++i) {
        const size_t ii = k * p + i;
        Cd A = pre[k], B = suf[k];
        for (int j = 0; j < p; ++j) {
          const size_t jj = k * p + j;
          A += mesh.pre(pa, i, j) * jc[jj] * gm[jj];
          B += mesh.suf(pa, i, j) * jc[jj] * gp[jj];
        }
        out[ii] = sq[ii] * av[ii] * (cK * (up[ii] * A + um[ii] * B));
      }
    }
  }

  void applyT(const Cd* z, Cd* out) const {
    const size_t npan = mesh.panels.size();
    std::vector<Cd> v(n());
    for (size_t j = 0; j < n(); ++j) v[j] = av[j] * sq[j] * z[j];
    std::vector<Cd> Hp(npan), Hm(npan);
    for (size_t k = 0; k < npan; ++k) {
      Cd hp{}, hm{};
      for (int j = 0; j < p; ++j) {
        const size_t jj = k * p + j;
        hp += up[jj] * v[jj];
        hm += um[jj] * v[jj];
      }
      Hp[k] = hp; Hm[k] = hm;
    }
    std::vector<Cd> later(npan), earlier(npan);
    Cd acc{};
    for (size_t k = npan; k-- > 0;) { later[k] = acc; acc += Hp[k]; }
    acc = Cd{};
    for (size_t k = 0; k < npan; ++k) { earlier[k] = acc; acc += Hm[k]; }
    for (size_t k = 0; k < npan; ++k) {
      const auto& pa = mesh.panels[k];
      for (int i = 0; i < p; ++i) {
        const size_t ii = k * p + i;
        Cd t1{}, t2{};
        for (int j = 0; j < p; ++j) {
          const size_t jj = k * p + j;
          t1 += mesh.pre(pa, j, i) * (up[jj] * v[jj]);
          t2 += mesh.suf(pa, j, i) * (um[jj] * v[jj]);
        }
        const Cd r = cK * (q[ii] * (um[ii] * later[k] + up[ii] * earlier[k]) +
                           jc[ii] * (um[ii] * t1 + up[ii] * t2));
        out[ii] = (av[ii] / sq[ii]) * r;
      }
    }
  }

  void applyH(const Cd* z, Cd* out) const {
    std::vector<Cd> t(n());
    for (size_t i = 0; i < n(); ++i) t[i] = std::conj(z[i]);
    applyT(t.data(), out);
    for (size_t i = 0; i < n(); ++i) out[i] = std::conj(out[i]);
  }
};

WindowOp make_window_op(const Potential& V, const WeightMap& a, const JostPair& jp,
                        double X, int p, const NormOptions& opts) {
  MeshSpec ms;
  ms.lo = -X; ms.hi = X;
  for (double b : V.breakpoints) ms.breakpoints.push_back(b);
  for (double b : a.breakpoints) ms.breakpoints.push_back(b);
  // edges of the Jost mesh: evaluation switches to the closed exterior form
  ms.breakpoints.push_back(jp.plus.lo);
  ms.breakpoints.push_back(jp.plus.hi);
  // beta = 4 substitution regularizes every quarter-power family arising from
  // combinations of |x|^{-1/2} potentials and their (w')^{1/2} weights
  auto add_sing = [&ms](double pos) {
    for (const auto& s : ms.singular)
      if (std::fabs(s.position - pos) < 1e-12) return;
    ms.singular.push_back({pos, 0.75});
  };
  for (const auto& s : V.singular_points) add_sing(s.position);
  for (const auto& s : a.singular) add_sing(s.position);
  ms.p = p;
  const double abs_lam = std::sqrt(std::hypot(jp.plus.E, jp.plus.eps)) / jp.plus.h;
  ms.max_len = std::min(opts.max_len, opts.wl_factor / abs_lam);

  WindowOp op;
  op.mesh = build_mesh<double>(ms);
  op.p = p;
  const size_t N = op.mesh.n();
  op.x.resize(N); op.q.resize(N); op.jc.resize(N);
  op.av.resize(N); op.sq.resize(N);
  op.up.resize(N); op.um.resize(N);
  for (size_t k = 0; k < op.mesh.panels.size(); ++k) {
    const auto& pa = op.mesh.panels[k];
    for (int j = 0; j < p; ++j) {
      const size_t jj = k * p + j;
      op.x[jj] = pa.x[j];
      op.jc[jj] = pa.jac[j];
      op.q[jj] = op.mesh.wfull(pa, j) * pa.jac[j];
      op.sq[jj] = std::sqrt(op.q[jj]);
      const double aval = a.a(op.x[jj]);
      op.av[jj] = std::isfinite(aval) ? aval : 0.0;
      op.up[jj] = jp.plus.eval_u(op.x[jj]);
      op.um[jj] = jp.minus.eval_u(op.x[jj]);
    }
  }
  const double h = jp.plus.h;
  op.cK = -1.0 / (jp.sd.W * (h * h));
  return op;
}

// largest singular value of an abstract operator with given applies
template <class Op>
double sigma_max(const Op& op, const NormOptions& opts, int& iters, bool& ok) {
  const size_t N = op.n();
  iters = 0; ok = true;
  if (N == 0) return 0.0;
  if (int(N) <= opts.dense_cap) {
    Eigen::MatrixXcd M(N, N);
    std::vector<Cd> e(N, Cd{}), col(N);
    for (size_t j = 0; j < N; ++j) {
      e[j] = 1.0;
      op.apply(e.data(), col.data());
      e[j] = 0.0;
      for (size_t i = 0; i < N; ++i) M(long(i), long(j)) = col[i];
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(0);
  }
  std::vector<Cd> z = start_vector(N), w(N), g(N);
  double nz = vec_norm(z);
  for (auto& v : z) v /= nz;
  double sig = 0, s1 = -1, s0 = -1; // current and two previous estimates
  for (int it = 1; it <= opts.power_max; ++it) {
    iters = it;
    op.apply(z.data(), w.data());
    sig = vec_norm(w);
    if (sig == 0.0) return 0.0;
    op.applyH(w.data(), g.data());
    const double ng = vec_norm(g);
    if (ng == 0.0) return 0.0;
    for (size_t i = 0; i < N; ++i) z[i] = g[i] / ng;
    if (it >= 3) {
      const double d2 = sig - s1;
      if (std::fabs(d2) <= opts.power_tol * std::max(sig, 1e-300)) return sig;
      // The estimates increase monotonically (Rayleigh quotients of a
      // positive semidefinite Gram operator under power iteration), so a
      // stable ratio r = d_k / d_{k-1} < 1 predicts the remaining gap
      // d_k * r / (1 - r); accept once that prediction is negligible.
      const double d1 = s1 - s0;
      if (d1 > 0 && d2 > 0) {
        const double r = d2 / d1;
        if (r < 0.999) {
          const double remaining = d2 * r / (1.0 - r);
          if (remaining <= opts.power_extrap_tol * sig) return sig;
        }
      }
    }
    s0 = s1;
    s1 = sig;
  }
  ok = false;
  return sig;
}

struct KernelSolve {
  double value = 0;
  size_t n = 0;
  int iters = 0;
  bool ok = true;
};

KernelSolve solve_kernel_window(const Potential& V, const WeightMap& a,
                                const JostPair& jp, double X, int p,
                                const NormOptions& opts) {
  const WindowOp op = make_window_op(V, a, jp, X, p, opts);
  KernelSolve ks;
  ks.n = op.n();
  ks.value = sigma_max(op, opts, ks.iters, ks.ok);
  return ks;
}

// ---------------------------------------------------------------- FD op

// cell average with jump/singularity awareness: midpoint for smooth cells,
// adaptive quadrature when the cell contains a marked point
struct CellAverager {
  std::function<double(double)> f;
  std::vector<double> marks;
  std::vector<SingularPoint> sing;

  double operator()(double lo, double hi) const {
    bool special = false;
    for (double m : marks)
      if (m > lo - 1e-14 && m < hi + 1e-14) { special = true; break; }
    if (!special)
      for (const auto& s : sing)
        if (s.position > lo - 1e-14 && s.position < hi + 1e-14) { special = true; break; }
    if (!special) return f(0.5 * (lo + hi));
    std::vector<double> brk;
    for (double m : marks)
      if (m > lo && m < hi) brk.push_back(m);
    std::vector<SingularPoint> sg;
    for (const auto& s : sing)
      if (s.position >= lo && s.position <= hi) sg.push_back(s);
    const auto r = integrate_adaptive(f, lo, hi, brk, sg, 1e-12, 1e-15);
    return r.value / (hi - lo);
  }
};

struct FdOp {
  int nn = 0;
  std::vector<Cd> dl, d, du, du2; // zgttrf factors
  std::vector<int> ipiv;
  std::vector<double> diagA; // sqrt of cell-averaged a^2

  size_t n() const { return size_t(nn); }

  void solveG(Cd* b, char trans) const {
    int info = 0, nrhs = 1, ldb = nn;
    zgttrs_(&trans, &nn, &nrhs, dl.data(), d.data(), du.data(), du2.data(),
            ipiv.data(), b, &ldb, &info, 1);
    if (info != 0) throw std::runtime_error("norm_via_matrix: zgttrs failed");
  }
  void apply(const Cd* z, Cd* out) const {
    for (int i = 0; i < nn; ++i) out[i] = diagA[size_t(i)] * z[i];
    solveG(out, 'N');
    for (int i = 0; i < nn; ++i) out[i] *= diagA[size_t(i)];
  }
  void applyH(const Cd* z, Cd* out) const {
    for (int i = 0; i < nn; ++i) out[i] = diagA[size_t(i)] * z[i];
    solveG(out, 'C');
    for (int i = 0; i < nn; ++i) out[i] *= diagA[size_t(i)];
  }
};

FdOp make_fd_op(const Potential& V, double h, double E, double eps,
                const WeightMap& a, double L, double dx_target) {
  FdOp op;
  const int n = std::max(8, int(std::floor(2.0 * L / dx_target)) - 1);
  const double dx = 2.0 * L / (n + 1);
  op.nn = n;
  op.dl.assign(size_t(n) - 1, Cd{});
  op.du.assign(size_t(n) - 1, Cd{});
  op.d.assign(size_t(n), Cd{});
  op.du2.assign(size_t(n) >= 2 ? size_t(n) - 2 : 0, Cd{});
  op.ipiv.assign(size_t(n), 0);
  op.diagA.assign(size_t(n), 0.0);

  CellAverager avgV{V.eval, V.breakpoints, V.singular_points};
  CellAverager avgA{a.a_sq, a.breakpoints, a.singular_sq};
  const double w = h * h / (dx * dx);
  for (int i = 0; i < n; ++i) {
    const double xi = -L + (i + 1) * dx;
    const double vbar = avgV(xi - 0.5 * dx, xi + 0.5 * dx);
    op.d[size_t(i)] = Cd(2.0 * w + vbar - E, -eps);
    op.diagA[size_t(i)] = std::sqrt(std::max(0.0, avgA(xi - 0.5 * dx, xi + 0.5 * dx)));
  }
  for (int i = 0; i + 1 < n; ++i) {
    op.dl[size_t(i)] = Cd(-w, 0.0);
    op.du[size_t(i)] = Cd(-w, 0.0);
  }
  int info = 0;
  zgttrf_(&op.nn, op.dl.data(), op.d.data(), op.du.data(), op.du2.data(),
          op.ipiv.data(), &info);
  if (info != 0) throw std::runtime_error("norm_via_matrix: zgttrf failed");
  return op;
}

} // namespace

NormEstimate norm_via_kernel(const Potential& V, double h, double E, double eps,
                             const WeightMap& a, const NormOptions& opts) {
  if (!(h > 0) || !(E > 0) || eps < 0)
    throw std::invalid_argument("norm_via_kernel: need h > 0, E > 0, eps >= 0");
  NormEstimate est;
  est.backend = "kernel";
  const JostPair jp = jost_pair(V, h, E, eps, opts.jost);
  const double Rv = V.support_radius.value_or(0.0);

  double X = 0;
  bool window_exact = false;
  bool window_ok = true;
  KernelSolve ks;
  if (a.zero_outside) {
    X = std::max(*a.zero_outside, 1e-3);
    window_exact = true;
    ks = solve_kernel_window(V, a, jp, X, opts.p, opts);
  } else {
    if (eps > 0) {
      const double im_lam = std::imag(std::sqrt(Cd(E, eps))) / h;
      X = jp.plus.hi + std::log(1e5) / (2.0 * im_lam);
    } else {
      X = std::max(4.0 * (Rv + 1.0), 50.0);
    }
    const double cap = opts.window_cap_factor * std::max(1.0, Rv);
    if (X >= cap) {
      // The decay-based target exceeds the cap. Apply the same doubling
      // criterion the growth loop uses, comparing cap/2 against cap, so a
      // plateaued estimate is still recognized instead of being rejected
      // unmeasured.
      const KernelSolve khalf = solve_kernel_window(V, a, jp, 0.5 * cap, opts.p, opts);
      X = cap;
      ks = solve_kernel_window(V, a, jp, X, opts.p, opts);
      const double change =
          std::fabs(ks.value - khalf.value) / std::max(ks.value, 1e-300);
      if (!khalf.ok || change > opts.window_tol) {
        window_ok = false;
        est.message = "window cap reached before tail convergence";
      }
    } else {
      ks = solve_kernel_window(V, a, jp, X, opts.p, opts);
      while (true) {
        if (X >= cap) {
          window_ok = false;
          est.message = "window cap reached before tail convergence";
          break;
        }
        const double X2 = std::min(2.0 * X, cap);
        const KernelSolve k2 = solve_kernel_window(V, a, jp, X2, opts.p, opts);
        const double change = std::fabs(k2.value - ks.value) / std::max(k2.value, 1e-300);
        X = X2; ks = k2;
        if (change <= opts.window_tol) break;
      }
    }
  }

  // order-refinement agreement at the final window
  const KernelSolve fine = solve_kernel_window(V, a, jp, X, opts.p + opts.p_refine, opts);
  est.refine_rel_change =
      std::fabs(fine.value - ks.value) / std::max(fine.value, 1e-300);
  est.value = fine.value;
  est.window = X;
  est.n = fine.n;
  est.iterations = fine.iters;
  est.converged = window_ok && ks.ok && fine.ok &&
                  (est.refine_rel_change <= opts.refine_tol || fine.value == 0.0);
  if (!ks.ok || !fine.ok) est.message = "power iteration did not converge";
  if (est.converged && window_exact) est.message = "";
  return est;
}

NormEstimate norm_via_matrix(const Potential& V, double h, double E, double eps,
                             const WeightMap& a, const NormOptions& opts) {
  if (!(h > 0) || !(E > 0))
    throw std::invalid_argument("norm_via_matrix: need h > 0, E > 0");
  if (!(eps > 0))
    throw std::invalid_argument(
        "norm_via_matrix: requires eps > 0 (Dirichlet box cannot approximate the eps = 0 resolvent)");
  NormEstimate est;
  est.backend = "matrix";

  const double Rv = V.support_radius.value_or(0.0);
  const double Ra = a.zero_outside.value_or(0.0);
  const double im_lam = std::imag(std::sqrt(Cd(E, eps))) / h;
  double L = std::max(Rv, Ra) +
             std::max(opts.box_factor * h * std::sqrt(E) / eps,
                      std::log(1e5) / (2.0 * im_lam));
  bool capped = false;
  if (L > opts.domain_cap) { L = opts.domain_cap; capped = true; }

  const double abs_lam = std::sqrt(std::hypot(E, eps)) / h;
  const double wavelength = 2.0 * std::numbers::pi / abs_lam;

  auto solve_at = [&](double box, int ppw, int& iters, bool& ok) {
    const FdOp op = make_fd_op(V, h, E, eps, a, box, wavelength / ppw);
    est.n = op.n();
    return sigma_max(op, opts, iters, ok);
  };

  double prev = -1, val = 0;
  bool ok_all = true, agreed = false;
  int ppw = opts.ppw;
  int iters = 0;
  for (; ppw <= opts.ppw_max; ppw *= 2) {
    bool ok = true;
    val = solve_at(L, ppw, iters, ok);
    ok_all = ok_all && ok;
    if (prev >= 0 && std::fabs(val - prev) <= opts.ppw_agree_tol * std::max(val, 1e-300)) {
      agreed = true;
      break;
    }
    prev = val;
  }
  if (capped && agreed && ok_all) {
    // The decay-based box target exceeds the cap; verify the truncation the
    // same way the box check below does, by comparing against a half-size box.
    const auto n_kept = est.n;
    bool ok = true;
    int it2 = 0;
    const double vhalf = solve_at(0.5 * L, std::min(ppw, opts.ppw_max), it2, ok);
    est.n = n_kept;
    if (ok && std::fabs(vhalf - val) <= opts.ppw_agree_tol * std::max(val, 1e-300))
      capped = false;
  }
  est.value = val;
  est.window = L;
  est.ppw = std::min(ppw, opts.ppw_max);
  est.iterations = iters;
  est.converged = agreed && ok_all && !capped;
  if (!agreed) est.message = "grid refinement did not reach agreement";
  else if (capped) est.message = "domain cap reached";
  else if (!ok_all) est.message = "power iteration did not converge";

  if (est.converged && opts.check_box) {
    const auto n_kept = est.n;
    bool ok = true;
    int it2 = 0;
    const double v15 = solve_at(1.5 * L, est.ppw, it2, ok);
    est.n = n_kept;
    if (std::fabs(v15 - val) > opts.ppw_agree_tol * std::max(val, 1e-300) || !ok) {
      est.converged = false;
      est.message = "box truncation check failed";
    }
  }
  return est;
}

RescalingReport check_rescaling_invariance(const Potential& V, double h, double E,
                                           double eps, double tol,
                                           const NormOptions& opts) {
  RescalingReport rep;
  const WeightMap a = map_sqrt_envelope(envelope_abs(V));

  const NormEstimate base = norm_via_kernel(V, h, E, eps, a, opts);
  rep.base = base.value;

  const Potential Vd = dilate(V, h);
  const WeightMap ad = map_sqrt_envelope(envelope_abs(Vd));
  const NormEstimate dil = norm_via_kernel(Vd, 1.0, E, eps, ad, opts);
  rep.dilated = dil.value;

  const Potential Vs = scale_values(V, 1.0 / (h * h));
  const NormEstimate esc =
      norm_via_kernel(Vs, 1.0, E / (h * h), eps / (h * h), a, opts);
  rep.energy_scaled = esc.value / (h * h);

  const double denom = std::max(rep.base, 1e-300);
  rep.diff_dilation = std::fabs(rep.dilated - rep.base) / denom;
  rep.diff_energy = std::fabs(rep.energy_scaled - rep.base) / denom;
  rep.converged = base.converged && dil.converged && esc.converged;
  rep.pass = rep.converged && rep.diff_dilation <= tol && rep.diff_energy <= tol;
  return rep;
}

} // namespace semiscat
