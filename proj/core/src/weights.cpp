#include "semiscat/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace semiscat {

namespace {

// median of the envelope: cumulative(a) = l1/2, by bisection
double envelope_median(const Envelope& m) {
  const double half = 0.5 * m.l1_norm;
  double lo, hi;
  if (m.support_radius) {
    lo = -*m.support_radius;
    hi = *m.support_radius;
    if (lo == hi) return 0.0;
  } else {
    lo = -1.0; hi = 1.0;
    while (m.cumulative(lo) > half) lo *= 2.0;
    while (m.cumulative(hi) < half) hi *= 2.0;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::fabs(lo) + std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (m.cumulative(mid) < half) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

WeightFunction build_sinh_weight(const Envelope& m, double h, double E) {
  if (!(h > 0) || !(E > 0))
    throw std::invalid_argument("build_sinh_weight: h and E must be positive");
  WeightFunction wf;
  wf.kind = WeightFunction::Kind::sinh_envelope;
  wf.h = h; wf.E = E;
  wf.k = 4.0 / std::sqrt(E);
  wf.m_l1 = m.l1_norm;
  wf.description = "sinh_envelope(" + m.description + ")";
  wf.breakpoints = m.breakpoints;
  wf.wp_singular = m.singular_points;
  wf.wp_support_radius = m.support_radius;
  wf.wp_decay_delta = m.decay_delta; // w' ~ m inherits the tail

  if (!(m.l1_norm > 0)) {
    wf.degenerate = true;
    wf.w = [](double) { return 0.0; };
    wf.wp = [](double) { return 0.0; };
    wf.wp_l1 = 0.0;
    return wf;
  }

  const double M = m.l1_norm;
  const double koh = wf.k / h;
  const double a = envelope_median(m);
  wf.median_a = a;
  wf.breakpoints.push_back(a);
  const double halfKM = 0.5 * koh * M;
  auto C = m.cumulative;
  auto me = m.eval;
  // q(x) = (k/h)(C(x) - M/2) in [-kM/2h, kM/2h];
  // w  = e^{q - kM/2h} - e^{-q - kM/2h}   ( = 2 e^{-kM/2h} sinh q )
  // w' = (k/h)(e^{q - kM/2h} + e^{-q - kM/2h}) m(x)
  wf.w = [C, koh, M, halfKM](double x) {
    const double q = koh * (C(x) - 0.5 * M);
    return std::exp(q - halfKM) - std::exp(-q - halfKM);
  };
  wf.wp = [C, me, koh, M, halfKM](double x) {
    const double q = koh * (C(x) - 0.5 * M);
    return koh * (std::exp(q - halfKM) + std::exp(-q - halfKM)) * me(x);
  };
  wf.wp_l1 = 2.0 * (1.0 - std::exp(-koh * M));
  return wf;
}

WeightFunction build_exterior_weight(double R, double delta) {
  if (!(R > 0) || !(delta > 0))
    throw std::invalid_argument("build_exterior_weight: R and delta must be positive");
  WeightFunction wf;
  wf.kind = WeightFunction::Kind::exterior_polynomial;
  wf.R = R; wf.delta = delta;
  wf.description = "exterior_polynomial";
  wf.breakpoints = {-R, R};
  wf.w = [R, delta](double x) {
    const double ax = std::fabs(x);
    if (ax <= R) return 0.0;
    const double v = 1.0 - std::pow((1.0 + R) / (1.0 + ax), delta);
    return x > 0 ? v : -v;
  };
  const double amp = delta * std::pow(1.0 + R, delta);
  wf.wp = [R, amp, delta](double x) {
    const double ax = std::fabs(x);
    if (ax <= R) return 0.0;
    return amp * std::pow(1.0 + ax, -1.0 - delta);
  };
  wf.wp_l1 = 2.0;
  wf.wp_decay_delta = delta; // w' = amp (1+|x|)^{-1-delta} outside [-R, R]
  return wf;
}

W2Report verify_w2(const WeightFunction& wf, const Potential& V, double h, double E,
                   int n) {
  if (!(h > 0) || !(E > 0))
    throw std::invalid_argument("verify_w2: h and E must be positive");
  const double koh = 4.0 / (std::sqrt(E) * h);
  double X = 10.0;
  if (V.support_radius) X = std::max(X, *V.support_radius + 2.0);
  for (double b : wf.breakpoints) X = std::max(X, std::fabs(b) + 2.0);

  std::vector<double> xs;
  xs.reserve(size_t(n) + 128);
  for (int i = 0; i < n; ++i) xs.push_back(-X + 2.0 * X * (i + 0.5) / n);
  auto refine_near = [&xs](double s) {
    for (int k = 1; k <= 24; ++k) {
      const double off = std::pow(10.0, -9.0 + 8.0 * (k - 1) / 23.0);
      xs.push_back(s + off);
      xs.push_back(s - off);
    }
  };
  for (const auto& s : V.singular_points) refine_near(s.position);
  for (double b : wf.breakpoints) refine_near(b);

  W2Report rep;
  rep.min_rel_margin = 1.0;
  rep.n_samples = int(xs.size());
  rep.argmin_x = xs.empty() ? 0.0 : xs.front();
  for (double x : xs) {
    const double v = V.eval(x);
    if (!std::isfinite(v)) continue;
    const double lhs = koh * std::fabs(v * wf.w(x));
    const double rhs = wf.wp(x);
    const double margin = (rhs - lhs) / (rhs + lhs + 1e-300);
    if (margin < rep.min_rel_margin) {
      rep.min_rel_margin = margin;
      rep.argmin_x = x;
    }
  }
  rep.pass = rep.min_rel_margin >= -1e-12;
  return rep;
}

void dump_weight_csv(const WeightFunction& w, const std::string& path,
                     double lo, double hi, int n) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("dump_weight_csv: cannot open " + path);
  std::fprintf(f, "x,w,w_prime\n");
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    std::fprintf(f, "%.12e,%.12e,%.12e\n", x, w.w(x), w.wp(x));
  }
  std::fclose(f);
}

WeightMap map_sqrt_wprime(const WeightFunction& w) {
  WeightMap a;
  a.description = "sqrt_wprime(" + w.description + ")";
  auto wp = w.wp;
  a.a = [wp](double x) { return std::sqrt(std::max(0.0, wp(x))); };
  a.a_sq = [wp](double x) { return std::max(0.0, wp(x)); };
  a.breakpoints = w.breakpoints;
  a.singular_sq = w.wp_singular;
  for (auto s : w.wp_singular) {
    s.alpha *= 0.5;
    a.singular.push_back(s);
  }
  if (w.kind == WeightFunction::Kind::exterior_polynomial) {
    a.decays = true;
    a.decay_delta = w.delta;
  } else {
    a.zero_outside = w.wp_support_radius; // w' ~ m vanishes with the envelope
    if (w.degenerate) a.zero_outside = 0.0;
    if (w.wp_decay_delta > 0) {
      a.decays = true;
      a.decay_delta = w.wp_decay_delta;
    }
  }
  return a;
}

WeightMap map_sqrt_envelope(const Envelope& m) {
  WeightMap a;
  a.description = "sqrt_envelope(" + m.description + ")";
  auto me = m.eval;
  a.a = [me](double x) { return std::sqrt(std::max(0.0, me(x))); };
  a.a_sq = [me](double x) { return std::max(0.0, me(x)); };
  a.zero_outside = m.support_radius;
  if (m.decay_delta > 0) {
    a.decays = true;
    a.decay_delta = m.decay_delta;
  }
  a.breakpoints = m.breakpoints;
  a.singular_sq = m.singular_points;
  for (auto s : m.singular_points) {
    s.alpha *= 0.5;
    a.singular.push_back(s);
  }
  return a;
}

WeightMap map_exterior_pair(double R, double delta) {
  if (!(R > 0) || !(delta > 0))
    throw std::invalid_argument("map_exterior_pair: R and delta must be positive");
  WeightMap a;
  a.description = "exterior_pair";
  a.a = [R, delta](double x) {
    const double ax = std::fabs(x);
    if (ax <= R) return 0.0;
    return std::pow(1.0 + ax, -0.5 * (1.0 + delta));
  };
  a.a_sq = [R, delta](double x) {
    const double ax = std::fabs(x);
    if (ax <= R) return 0.0;
    return std::pow(1.0 + ax, -1.0 - delta);
  };
  a.decays = true;
  a.decay_delta = delta;
  a.breakpoints = {-R, R};
  return a;
}

WeightMap map_one() {
  WeightMap a;
  a.description = "one";
  a.a = [](double) { return 1.0; };
  a.a_sq = [](double) { return 1.0; };
  return a;
}

} // namespace semiscat
