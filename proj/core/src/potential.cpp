#include "semiscat/potential.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace semiscat {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void fill_defaults(std::vector<double>& p, std::initializer_list<double> defs,
                   const char* name) {
  if (p.size() > defs.size())
    throw std::invalid_argument(std::string("catalog_get: too many parameters for ") + name);
  size_t i = p.size();
  for (auto it = defs.begin() + p.size(); it != defs.end(); ++it, ++i) p.push_back(*it);
}

void require_positive(double v, const char* what, const char* name) {
  if (!(v > 0.0))
    throw std::invalid_argument(std::string("catalog_get: ") + what +
                                " must be positive for " + name);
}

Potential make_free() {
  Potential V;
  V.name = "free";
  V.eval = [](double) { return 0.0; };
  V.cumulative = [](double) { return 0.0; };
  V.l1_norm = 0.0;
  V.support_radius = 0.0;
  return V;
}

Potential make_square_barrier(std::vector<double> p) {
  fill_defaults(p, {1.0, 1.0}, "square_barrier");
  const double A = p[0], R = p[1];
  require_positive(R, "R", "square_barrier");
  Potential V;
  V.name = "square_barrier";
  V.params = p;
  V.eval = [A, R](double x) { return std::fabs(x) <= R ? A : 0.0; };
  V.cumulative = [A, R](double x) {
    return std::fabs(A) * (std::clamp(x, -R, R) + R);
  };
  V.l1_norm = 2.0 * std::fabs(A) * R;
  V.support_radius = R;
  V.breakpoints = {-R, R};
  return V;
}

Potential make_gaussian_truncated(std::vector<double> p) {
  fill_defaults(p, {1.0, 0.5, 1.0}, "gaussian_truncated");
  const double A = p[0], sig = p[1], R = p[2];
  require_positive(sig, "sigma", "gaussian_truncated");
  require_positive(R, "R", "gaussian_truncated");
  Potential V;
  V.name = "gaussian_truncated";
  V.params = p;
  V.eval = [A, sig, R](double x) {
    return std::fabs(x) <= R ? A * std::exp(-x * x / (sig * sig)) : 0.0;
  };
  const double amp = std::fabs(A) * sig * std::sqrt(kPi) / 2.0;
  const double erfR = std::erf(R / sig);
  V.l1_norm = 2.0 * amp * erfR;
  V.cumulative = [amp, sig, R, erfR](double x) {
    const double xc = std::clamp(x, -R, R);
    return amp * (std::erf(xc / sig) + erfR);
  };
  V.support_radius = R;
  V.breakpoints = {-R, R};
  return V;
}

Potential make_inverse_sqrt(std::vector<double> p) {
  fill_defaults(p, {1.0, 1.0}, "inverse_sqrt_singular");
  const double A = p[0], R = p[1];
  require_positive(R, "R", "inverse_sqrt_singular");
  Potential V;
  V.name = "inverse_sqrt_singular";
  V.params = p;
  V.eval = [A, R](double x) {
    if (std::fabs(x) >= R) return 0.0;
    return A / std::sqrt(std::fabs(x)); // +inf at x = 0 (integrable)
  };
  const double a = std::fabs(A);
  V.cumulative = [a, R](double x) {
    if (x <= -R) return 0.0;
    if (x < 0.0) return 2.0 * a * (std::sqrt(R) - std::sqrt(-x));
    if (x < R) return 2.0 * a * (std::sqrt(R) + std::sqrt(x));
    return 4.0 * a * std::sqrt(R);
  };
  V.l1_norm = 4.0 * a * std::sqrt(R);
  V.support_radius = R;
  V.breakpoints = {-R, 0.0, R};
  V.singular_points = {{0.0, 0.5}};
  return V;
}

Potential make_sech_squared(std::vector<double> p) {
  fill_defaults(p, {1.0, 0.5, 1.0}, "sech_squared");
  const double A = p[0], ell = p[1], R = p[2];
  require_positive(ell, "ell", "sech_squared");
  require_positive(R, "R", "sech_squared");
  Potential V;
  V.name = "sech_squared";
  V.params = p;
  V.eval = [A, ell, R](double x) {
    if (std::fabs(x) > R) return 0.0;
    const double s = 1.0 / std::cosh(x / ell);
    return A * s * s;
  };
  const double a = std::fabs(A);
  const double tR = std::tanh(R / ell);
  V.cumulative = [a, ell, R, tR](double x) {
    return a * ell * (std::tanh(std::clamp(x, -R, R) / ell) + tR);
  };
  V.l1_norm = 2.0 * a * ell * tR;
  V.support_radius = R;
  V.breakpoints = {-R, R};
  return V;
}

// |V| cumulative for the oscillatory tail potential: prefix table of
// half-period integrals on [0, X0] plus a Fourier-corrected asymptotic tail.
struct OscTable {
  double A = 1, delta = 1;
  double X0 = 0;
  std::vector<double> prefix; // prefix[k] = int_0^{k pi/2} |sin 2t| g(t) dt, g=(1+t)^{-1-d}
  double half_total = 0;      // int_0^inf |sin 2t| g(t) dt

  double g(double t) const { return std::pow(1.0 + t, -1.0 - delta); }

  // int_x^inf |sin 2t| g dt for x >= X0 (also valid at any large x)
  double tail(double x) const {
    if (!(x < 1e300)) return 0.0;
    const double G = std::pow(1.0 + x, -delta) / delta;
    double corr = 0.0;
    const double gx = g(x);
    for (int j = 1; j <= 24; ++j) {
      corr += std::sin(4.0 * j * x) / (4.0 * j * (4.0 * j * j - 1.0));
    }
    return (2.0 / kPi) * G + (4.0 / kPi) * gx * corr;
  }

  // int over [a,b] inside one half-period by fixed Gauss rule
  double segment(double a, double b) const {
    static const GaussLegendre<double>& q = gauss_legendre_01<double>(20);
    double s = 0.0;
    for (size_t k = 0; k < q.x.size(); ++k) {
      const double t = a + (b - a) * q.x[k];
      s += q.w[k] * std::fabs(std::sin(2.0 * t)) * g(t);
    }
    return (b - a) * s;
  }

  // int_0^y |sin 2t| g dt, y >= 0
  double half(double y) const {
    if (y <= 0.0) return 0.0;
    if (y >= X0) return half_total - tail(y);
    const double hp = kPi / 2.0;
    const size_t k = std::min(prefix.size() - 1, size_t(y / hp));
    return prefix[k] + segment(k * hp, y);
  }
};

Potential make_oscillatory_decay(std::vector<double> p) {
  fill_defaults(p, {1.0, 1.0}, "oscillatory_decay");
  const double A = p[0], delta = p[1];
  if (!(delta > 0.0))
    throw std::invalid_argument(
        "catalog_get: delta must be positive for oscillatory_decay (|V| not integrable otherwise)");
  Potential V;
  V.name = "oscillatory_decay";
  V.params = p;
  V.eval = [A, delta](double x) {
    return A * std::sin(2.0 * x) * std::pow(1.0 + std::fabs(x), -1.0 - delta);
  };
  auto tab = std::make_shared<OscTable>();
  tab->A = std::fabs(A);
  tab->delta = delta;
  const double hp = kPi / 2.0;
  const size_t K = 1280;
  tab->X0 = K * hp;
  tab->prefix.resize(K + 1);
  tab->prefix[0] = 0.0;
  for (size_t k = 0; k < K; ++k)
    tab->prefix[k + 1] = tab->prefix[k] + tab->segment(k * hp, (k + 1) * hp);
  tab->half_total = tab->prefix[K] + tab->tail(tab->X0);
  const double aA = std::fabs(A);
  V.l1_norm = 2.0 * aA * tab->half_total;
  V.cumulative = [tab, aA](double x) {
    const double half = tab->half_total;
    if (!(x > -1e300)) return 0.0;
    if (x >= 0.0) return aA * (half + tab->half(x));
    return aA * (half - tab->half(-x));
  };
  V.breakpoints = {0.0};
  return V;
}

} // namespace

Potential catalog_get(const std::string& name, std::vector<double> params) {
  if (name == "free") {
    if (!params.empty()) throw std::invalid_argument("catalog_get: free takes no parameters");
    return make_free();
  }
  if (name == "square_barrier") return make_square_barrier(std::move(params));
  if (name == "gaussian_truncated") return make_gaussian_truncated(std::move(params));
  if (name == "inverse_sqrt_singular") return make_inverse_sqrt(std::move(params));
  if (name == "sech_squared") return make_sech_squared(std::move(params));
  if (name == "oscillatory_decay") return make_oscillatory_decay(std::move(params));
  throw std::invalid_argument("catalog_get: unknown potential name '" + name + "'");
}

std::vector<std::string> catalog_names() {
  return {"free",         "square_barrier",       "gaussian_truncated",
          "inverse_sqrt_singular", "sech_squared", "oscillatory_decay"};
}

Envelope envelope_abs(const Potential& V) {
  Envelope m;
  m.description = "abs(" + V.name + ")";
  auto f = V.eval;
  m.eval = [f](double x) { return std::fabs(f(x)); };
  m.cumulative = V.cumulative;
  m.l1_norm = V.l1_norm;
  m.support_radius = V.support_radius;
  m.breakpoints = V.breakpoints;
  m.singular_points = V.singular_points;
  return m;
}

Envelope envelope_indicator(double A, double R) {
  if (!(A > 0.0) || !(R > 0.0))
    throw std::invalid_argument("envelope_indicator: A and R must be positive");
  Envelope m;
  m.description = "indicator";
  m.eval = [A, R](double x) { return std::fabs(x) <= R ? A : 0.0; };
  m.cumulative = [A, R](double x) { return A * (std::clamp(x, -R, R) + R); };
  m.l1_norm = 2.0 * A * R;
  m.support_radius = R;
  m.breakpoints = {-R, R};
  return m;
}

Envelope envelope_power(double A, double delta) {
  if (!(A > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("envelope_power: A and delta must be positive");
  Envelope m;
  m.description = "power_tail";
  m.eval = [A, delta](double x) {
    return A * std::pow(1.0 + std::fabs(x), -1.0 - delta);
  };
  m.cumulative = [A, delta](double x) {
    if (x <= 0.0) return (A / delta) * std::pow(1.0 - x, -delta);
    return (A / delta) * (2.0 - std::pow(1.0 + x, -delta));
  };
  m.l1_norm = 2.0 * A / delta;
  m.decay_delta = delta;
  m.breakpoints = {0.0};
  return m;
}

bool envelope_dominates(const Envelope& m, const Potential& V, int samples) {
  double X = 30.0;
  if (V.support_radius) X = *V.support_radius + 1.0;
  std::vector<double> xs;
  xs.reserve(size_t(samples) + 64 * V.singular_points.size());
  for (int i = 0; i < samples; ++i)
    xs.push_back(-X + 2.0 * X * (i + 0.5) / samples);
  for (const auto& s : V.singular_points)
    for (int k = 1; k <= 32; ++k) {
      const double off = std::pow(10.0, -8.0 + 7.0 * (k - 1) / 31.0);
      xs.push_back(s.position + off);
      xs.push_back(s.position - off);
    }
  for (double x : xs) {
    const double v = std::fabs(V.eval(x));
    if (!std::isfinite(v)) continue; // exactly at a singular point
    if (m.eval(x) + 1e-12 * (1.0 + v) < v) return false;
  }
  return true;
}

Potential dilate(const Potential& V, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("dilate: h must be positive");
  Potential W;
  W.name = V.name + "_dilated";
  W.params = V.params;
  auto f = V.eval;
  auto C = V.cumulative;
  W.eval = [f, h](double y) { return f(h * y); };
  W.cumulative = [C, h](double y) { return C(h * y) / h; };
  W.l1_norm = V.l1_norm / h;
  if (V.support_radius) W.support_radius = *V.support_radius / h;
  for (double b : V.breakpoints) W.breakpoints.push_back(b / h);
  for (auto s : V.singular_points) {
    s.position /= h;
    W.singular_points.push_back(s);
  }
  return W;
}

Potential scale_values(const Potential& V, double c) {
  Potential W;
  W.name = "scaled_" + V.name;
  W.params = V.params;
  auto f = V.eval;
  auto C = V.cumulative;
  W.eval = [f, c](double x) { return c * f(x); };
  const double ac = std::fabs(c);
  W.cumulative = [C, ac](double x) { return ac * C(x); };
  W.l1_norm = ac * V.l1_norm;
  W.support_radius = V.support_radius;
  W.breakpoints = V.breakpoints;
  W.singular_points = V.singular_points;
  return W;
}

} // namespace semiscat
