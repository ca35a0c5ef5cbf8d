#pragma once

// Gauss-Legendre panel meshes with partial-integral ("suffix"/"prefix")
// matrices. On each panel with nodes x_0 < ... < x_{p-1},
//
//   integral_{x_i}^{b} g dx ~= sum_j suf(i,j) g(x_j) jac_j,
//   integral_{a}^{x_i} g dx ~= sum_j pre(i,j) g(x_j) jac_j,
//   integral_{a}^{b}   g dx ~= sum_j wfull(j) g(x_j) jac_j.
//
// The matrices integrate the degree-(p-1) interpolant of g; they are built by
// per-row Gauss quadrature of the barycentric Lagrange cardinal functions
// (monomial-basis formulas are catastrophically ill-conditioned past p ~ 13).
//
// Panels adjacent to an integrable singularity |f| ~ |x-s|^{-alpha} use the
// substitution x = s ± (len·sigma^beta), beta = 1/(1-alpha): the pulled-back
// integrand (value times Jacobian) is bounded, so the same node/weight logic
// applies with per-node Jacobians; a mirrored panel reuses the forward
// matrices with reversed indices.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "semiscat/quadrature.hpp"

namespace semiscat {

template <class Real>
struct PanelBasis {
  int p = 0;
  GaussLegendre<Real> gl;   // nodes/weights on [0,1]
  std::vector<Real> bary;   // barycentric weights
  std::vector<Real> Psuf;   // p*p row-major: integral_{tau_i}^{1} ell_j
};

namespace detail {

template <class Real>
std::vector<Real> barycentric_weights(const std::vector<Real>& tau) {
  const int p = int(tau.size());
  std::vector<Real> b(p, Real(1.0));
  for (int j = 0; j < p; ++j)
    for (int m = 0; m < p; ++m)
      if (m != j) b[j] = b[j] / (tau[j] - tau[m]);
  return b;
}

// Values of all cardinal functions ell_j at point s (not equal to a node).
template <class Real>
void cardinal_row(const std::vector<Real>& tau, const std::vector<Real>& bary,
                  Real s, Real* out) {
  const int p = int(tau.size());
  Real denom(0.0);
  for (int j = 0; j < p; ++j) {
    Real t = bary[j] / (s - tau[j]);
    out[j] = t;
    denom += t;
  }
  for (int j = 0; j < p; ++j) out[j] = out[j] / denom;
}

} // namespace detail

template <class Real>
PanelBasis<Real> make_panel_basis(int p) {
  PanelBasis<Real> b;
  b.p = p;
  b.gl = gauss_legendre_01<Real>(p);
  b.bary = detail::barycentric_weights(b.gl.x);
  b.Psuf.assign(size_t(p) * p, Real(0.0));
  const auto q = gauss_legendre_01<Real>(p + 6);
  std::vector<Real> row(p);
  for (int i = 0; i < p; ++i) {
    const Real a = b.gl.x[i];
    const Real len = Real(1.0) - a;
    for (size_t k = 0; k < q.x.size(); ++k) {
      Real s = a + len * q.x[k];
      detail::cardinal_row(b.gl.x, b.bary, s, row.data());
      for (int j = 0; j < p; ++j)
        b.Psuf[size_t(i) * p + j] += len * q.w[k] * row[j];
    }
  }
  return b;
}

// process-wide cache (meshes of the same order share one basis)
template <class Real>
const PanelBasis<Real>& panel_basis(int p) {
  static std::map<int, std::unique_ptr<PanelBasis<Real>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto& slot = cache[p];
  if (!slot) slot = std::make_unique<PanelBasis<Real>>(make_panel_basis<Real>(p));
  return *slot;
}

template <class Real>
struct Panel {
  double a = 0, b = 0;
  bool reversed = false; // true: substituted panel mirrored about its right end
  double alpha = 0;      // substitution exponent (0 = plain affine map)
  std::vector<Real> x;   // nodes, ascending
  std::vector<Real> jac; // dx/dsigma at nodes (positive)
};

template <class Real>
struct Mesh {
  int p = 0;
  const PanelBasis<Real>* basis = nullptr;
  std::vector<Panel<Real>> panels;

  size_t n() const { return panels.size() * size_t(p); }

  // partial/full weights respecting panel orientation
  Real suf(const Panel<Real>& pa, int i, int j) const {
    const auto& S = basis->Psuf;
    if (!pa.reversed) return S[size_t(i) * p + j];
    return basis->gl.w[size_t(p - 1 - j)] - S[size_t(p - 1 - i) * p + (p - 1 - j)];
  }
  Real pre(const Panel<Real>& pa, int i, int j) const {
    const auto& S = basis->Psuf;
    if (!pa.reversed) return basis->gl.w[size_t(j)] - S[size_t(i) * p + j];
    return S[size_t(p - 1 - i) * p + (p - 1 - j)];
  }
  Real wfull(const Panel<Real>& pa, int j) const {
    return pa.reversed ? basis->gl.w[size_t(p - 1 - j)] : basis->gl.w[size_t(j)];
  }
};

struct MeshSpec {
  double lo = 0, hi = 0;
  std::vector<double> breakpoints;
  std::vector<SingularPoint> singular;
  double max_len = 0.25;    // panel length cap
  double sing_width = 0.125; // width of substituted panels hugging a singularity
  int p = 16;
};

namespace detail {
template <class Real> Real pow_real(Real base, double e);
template <> inline double pow_real<double>(double b, double e) { return std::pow(b, e); }
template <> inline dd pow_real<dd>(dd b, double e) {
  if (e == 2.0) return sqr(b);
  if (e == 1.0) return b;
  return exp(log(b) * e);
}
inline double as_double(double x) { return x; }
inline double as_double(const dd& x) { return x.hi; }
} // namespace detail

template <class Real>
Mesh<Real> build_mesh(const MeshSpec& spec) {
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("build_mesh: empty interval");
  Mesh<Real> mesh;
  mesh.p = spec.p;
  mesh.basis = &panel_basis<Real>(spec.p);
  const auto& gl = mesh.basis->gl;

  const double sw = std::min(spec.sing_width, spec.max_len);
  std::vector<double> edges{spec.lo, spec.hi};
  for (double t : spec.breakpoints)
    if (t > spec.lo && t < spec.hi) edges.push_back(t);
  for (const auto& s : spec.singular) {
    for (double t : {s.position - sw, s.position, s.position + sw})
      if (t > spec.lo && t < spec.hi) edges.push_back(t);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double u, double v) { return std::fabs(u - v) < 1e-12; }),
              edges.end());

  auto find_singular = [&](double x) -> const SingularPoint* {
    for (const auto& s : spec.singular)
      if (std::fabs(x - s.position) < 1e-12) return &s;
    return nullptr;
  };

  for (size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    const SingularPoint* sl = find_singular(a);
    const SingularPoint* sr = find_singular(b);
    if (sl && b - a <= sw * (1.0 + 1e-9)) {
      // singularity at the left end: increasing substituted map
      Panel<Real> pa;
      pa.a = a; pa.b = b; pa.alpha = sl->alpha; pa.reversed = false;
      const double beta = 1.0 / (1.0 - sl->alpha);
      pa.x.resize(spec.p); pa.jac.resize(spec.p);
      for (int j = 0; j < spec.p; ++j) {
        Real sb = detail::pow_real(gl.x[j], beta);
        pa.x[j] = Real(a) + Real(b - a) * sb;
        pa.jac[j] = Real(b - a) * beta * detail::pow_real(gl.x[j], beta - 1.0);
      }
      mesh.panels.push_back(std::move(pa));
      continue;
    }
    if (sr && b - a <= sw * (1.0 + 1e-9)) {
      // singularity at the right end: mirrored map, nodes kept ascending
      Panel<Real> pa;
      pa.a = a; pa.b = b; pa.alpha = sr->alpha; pa.reversed = true;
      const double beta = 1.0 / (1.0 - sr->alpha);
      pa.x.resize(spec.p); pa.jac.resize(spec.p);
      for (int j = 0; j < spec.p; ++j) {
        const int m = spec.p - 1 - j; // source node in sigma
        Real sb = detail::pow_real(gl.x[m], beta);
        pa.x[j] = Real(b) - Real(b - a) * sb;
        pa.jac[j] = Real(b - a) * beta * detail::pow_real(gl.x[m], beta - 1.0);
      }
      mesh.panels.push_back(std::move(pa));
      continue;
    }
    const int nsub = std::max(1, int(std::ceil((b - a) / spec.max_len - 1e-9)));
    for (int s = 0; s < nsub; ++s) {
      Panel<Real> pa;
      pa.a = a + (b - a) * s / nsub;
      pa.b = a + (b - a) * (s + 1) / nsub;
      pa.x.resize(spec.p); pa.jac.resize(spec.p);
      for (int j = 0; j < spec.p; ++j) {
        pa.x[j] = Real(pa.a) + Real(pa.b - pa.a) * gl.x[j];
        pa.jac[j] = Real(pa.b - pa.a);
      }
      mesh.panels.push_back(std::move(pa));
    }
  }
  return mesh;
}

// barycentric interpolation of nodal values within panel `pa`
template <class Real, class Val>
Val interpolate_panel(const Mesh<Real>& mesh, const Panel<Real>& pa,
                      const Val* vals, double x) {
  const int p = mesh.p;
  const auto& bw = mesh.basis->bary;
  // work in the panel's parameter variable to reuse the [0,1] barycentric data
  // (nodes in x are images of the [0,1] Gauss nodes; for substituted panels the
  //  map is monotone so interpolation directly in x with recomputed weights
  //  would differ -- interpolate in sigma instead)
  // recover sigma for each node ordering
  const double len = pa.b - pa.a;
  Real sig;
  if (pa.alpha == 0.0) {
    sig = (Real(x) - Real(pa.a)) / Real(len);
  } else {
    const double beta = 1.0 / (1.0 - pa.alpha);
    sig = Real(pa.reversed ? std::pow((pa.b - x) / len, 1.0 / beta)
                           : std::pow((x - pa.a) / len, 1.0 / beta));
  }
  Val num{}; Real den(0.0);
  for (int j = 0; j < p; ++j) {
    const int m = pa.reversed ? (p - 1 - j) : j; // sigma-node index for x-node j
    Real d = sig - mesh.basis->gl.x[m];
    if (std::fabs(detail::as_double(d)) < 1e-300) return vals[j];
    Real t = bw[m] / d;
    num = num + vals[j] * t;
    den += t;
  }
  return num * (Real(1.0) / den);
}

} // namespace semiscat
