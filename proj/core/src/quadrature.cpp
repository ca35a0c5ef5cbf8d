#include "semiscat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace semiscat {

namespace {

// Legendre P_p and its derivative at x, by the three-term recurrence.
template <class Real>
void legendre_pd(int p, Real x, Real& P, Real& dP) {
  Real pm1(1.0), pk = x;
  for (int k = 2; k <= p; ++k) {
    Real pk1 = (x * pk * double(2 * k - 1) - pm1 * double(k - 1)) / double(k);
    pm1 = pk;
    pk = pk1;
  }
  P = pk;
  // (x^2 - 1) P_p' = p (x P_p - P_{p-1})
  dP = (x * pk - pm1) * double(p) / (x * x - 1.0);
}

template <class Real> constexpr double newton_eps();
template <> constexpr double newton_eps<double>() { return 1e-15; }
template <> constexpr double newton_eps<dd>() { return 1e-30; }

} // namespace

template <class Real>
GaussLegendre<Real> gauss_legendre_01(int p) {
  if (p < 2 || p > 64) throw std::invalid_argument("gauss_legendre_01: order out of range");
  GaussLegendre<Real> g;
  g.x.resize(p);
  g.w.resize(p);
  for (int i = 0; i < p; ++i) {
    // node on [-1,1], descending in i for the classic initial guess
    Real x(std::cos(M_PI * (i + 0.75) / (p + 0.5)));
    Real P, dP;
    for (int it = 0; it < 60; ++it) {
      legendre_pd(p, x, P, dP);
      Real dx = P / dP;
      x = x - dx;
      if (std::fabs(to_double(dd(double(dx)))) < newton_eps<Real>()) {
        // one extra polished step, then stop
        legendre_pd(p, x, P, dP);
        x = x - P / dP;
        break;
      }
    }
    legendre_pd(p, x, P, dP);
    Real w = 2.0 / ((1.0 - x * x) * dP * dP);
    g.x[p - 1 - i] = (x + 1.0) / 2.0; // map to [0,1], ascending
    g.w[p - 1 - i] = w / 2.0;
  }
  return g;
}

template GaussLegendre<double> gauss_legendre_01<double>(int);
template GaussLegendre<dd> gauss_legendre_01<dd>(int);

namespace {

// Classic 15-point Kronrod extension of 7-point Gauss (positive half).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GK {
  double integral;
  double err;
  double resabs;
};

GK gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  double fc = f(c);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::fabs(resk);
  for (int j = 0; j < 7; ++j) {
    double x = hl * xgk[j];
    double f1 = f(c - x), f2 = f(c + x);
    double fsum = f1 + f2;
    if (j % 2 == 1) resg += wg[j / 2] * fsum;
    resk += wgk[j] * fsum;
    resabs += wgk[j] * (std::fabs(f1) + std::fabs(f2));
  }
  double err = std::fabs((resk - resg) * hl);
  // standard sharpened error estimate
  err = std::min(err, resabs * std::fabs(hl) * std::pow(200.0 * err / (resabs * std::fabs(hl) + 1e-300), 0.5));
  return {resk * hl, err, resabs * std::fabs(hl)};
}

double adaptive_segment(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth, double& err_out, bool& ok,
                        long& budget) {
  GK r = gk15(f, a, b);
  --budget;
  const bool finite = std::isfinite(r.integral) && std::isfinite(r.err);
  // Roundoff floor: once the error estimate sits at machine noise relative to
  // the absolute mass of the segment, subdividing cannot improve anything.
  const bool at_noise =
      finite && r.err <= 64.0 * std::numeric_limits<double>::epsilon() * r.resabs;
  if (finite && (r.err <= tol || at_noise)) {
    err_out += r.err;
    return r.integral;
  }
  if (depth >= 52 || budget <= 0 ||
      b - a < 1e-15 * (std::fabs(a) + std::fabs(b) + 1.0)) {
    ok = false;
    if (!finite) return 0.0; // a node collided with the singular point itself
    err_out += r.err;
    return r.integral;
  }
  double m = 0.5 * (a + b);
  return adaptive_segment(f, a, m, 0.5 * tol, depth + 1, err_out, ok, budget) +
         adaptive_segment(f, m, b, 0.5 * tol, depth + 1, err_out, ok, budget);
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breakpoints,
                                    const std::vector<SingularPoint>& singular,
                                    double rel_tol, double abs_tol) {
  if (!(a < b)) return {0.0, 0.0, true};

  std::set<double> edges{a, b};
  for (double t : breakpoints)
    if (t > a && t < b) edges.insert(t);
  for (const auto& s : singular)
    if (s.position > a && s.position < b) edges.insert(s.position);
  std::vector<double> e(edges.begin(), edges.end());

  auto singular_at = [&](double x, double* alpha) {
    for (const auto& s : singular)
      if (std::fabs(x - s.position) < 1e-13 * (1.0 + std::fabs(x))) {
        *alpha = s.alpha;
        return true;
      }
    return false;
  };

  // First a crude total to scale the relative tolerance.
  double rough = 0.0;
  for (size_t k = 0; k + 1 < e.size(); ++k) {
    double lo = e[k], hi = e[k + 1], alpha;
    double mid = 0.5 * (lo + hi);
    double w = hi - lo;
    double fv = singular_at(lo, &alpha) || singular_at(hi, &alpha) ? 0.0 : std::fabs(f(mid));
    rough += fv * w;
  }
  double tol_total = std::max(abs_tol, rel_tol * std::max(rough, 1.0e-30));

  double total = 0.0, err = 0.0;
  bool ok = true;
  // A substituted node within one ulp of the singular point would evaluate f
  // at the singularity itself; such nodes contribute zero and flag the result.
  bool collided = false;
  // Work cap across all segments so jagged integrands (e.g. distances to a
  // singular point recovered with catastrophic cancellation) terminate with an
  // honest flag instead of subdividing without bound.
  long budget = 2'000'000;
  for (size_t k = 0; k + 1 < e.size(); ++k) {
    double lo = e[k], hi = e[k + 1];
    double seg_tol = tol_total * (hi - lo) / (b - a);
    double alpha;
    if (singular_at(lo, &alpha)) {
      // x = lo + t^beta, beta = 1/(1-alpha): integrand (f g) becomes bounded
      double beta = 1.0 / (1.0 - alpha);
      double T = std::pow(hi - lo, 1.0 / beta);
      auto g = [&, lo, beta](double t) {
        double tb = std::pow(t, beta);
        double x = lo + tb;
        if (!(x > lo)) {
          collided = true;
          return 0.0;
        }
        return f(x) * beta * (tb / std::max(t, 1e-300));
      };
      total += adaptive_segment(g, 0.0, T, seg_tol, 0, err, ok, budget);
    } else if (singular_at(hi, &alpha)) {
      double beta = 1.0 / (1.0 - alpha);
      double T = std::pow(hi - lo, 1.0 / beta);
      auto g = [&, hi, beta](double t) {
        double tb = std::pow(t, beta);
        double x = hi - tb;
        if (!(x < hi)) {
          collided = true;
          return 0.0;
        }
        return f(x) * beta * (tb / std::max(t, 1e-300));
      };
      total += adaptive_segment(g, 0.0, T, seg_tol, 0, err, ok, budget);
    } else {
      total += adaptive_segment(f, lo, hi, seg_tol, 0, err, ok, budget);
    }
  }
  if (collided) ok = false;
  return {total, err, ok};
}

} // namespace semiscat
