// Weight constructions: closed-form values of the saturating-envelope weight
// and the exterior polynomial weight, the compatibility inequality
// (k/h)|V w| <= w', and the multiplier maps used by the norm solvers.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "semiscat/potential.hpp"
#include "semiscat/weights.hpp"

using namespace semiscat;

TEST_SUITE("weights") {

TEST_CASE("saturating weight closed form for the indicator envelope") {
  // m = 1 on [-1,1], h = 1, E = 4, so k = 2, M = 2, median 0:
  //   w(x)  = 2 e^{-2} sinh(2 C(x)) with C the signed cumulative from 0
  //   w(1)  = 2 e^{-2} sinh(2) = 1 - e^{-4}
  //   w'(0) = 2 * 2 e^{-2} cosh(0) * m(0) = 4 e^{-2}
  const Envelope m = envelope_indicator(1.0, 1.0);
  const WeightFunction w = build_sinh_weight(m, 1.0, 4.0);
  CHECK(w.kind == WeightFunction::Kind::sinh_envelope);
  CHECK(w.k == doctest::Approx(2.0));
  CHECK(w.m_l1 == doctest::Approx(2.0));
  CHECK(std::fabs(w.median_a) <= 1e-11);
  CHECK(std::fabs(w.w(0.0)) <= 1e-11);
  CHECK(w.w(1.0) == doctest::Approx(1.0 - std::exp(-4.0)).epsilon(1e-12));
  CHECK(w.w(5.0) == doctest::Approx(1.0 - std::exp(-4.0)).epsilon(1e-12)); // saturated
  CHECK(w.w(-1.0) == doctest::Approx(-(1.0 - std::exp(-4.0))).epsilon(1e-12)); // odd
  CHECK(w.wp(0.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(w.wp(2.0) == doctest::Approx(0.0)); // w' carried by the envelope
  // total variation: w(inf) - w(-inf) = 2 (1 - e^{-4})
  CHECK(w.wp_l1 == doctest::Approx(2.0 * (1.0 - std::exp(-4.0))).epsilon(1e-10));
  // |w| <= 1 everywhere
  for (double x : {-3.0, -0.5, 0.2, 0.9, 4.0}) CHECK(std::fabs(w.w(x)) <= 1.0);
}

TEST_CASE("saturating weight survives a large exponent without overflow") {
  // k M / h = (4/sqrt(0.5)) * 2 / 0.05 = 226: naive cosh/sinh would overflow
  const Envelope m = envelope_indicator(1.0, 1.0);
  const WeightFunction w = build_sinh_weight(m, 0.05, 0.5);
  for (double x : {-2.0, -1.0, 0.0, 0.3, 1.0, 2.0}) {
    CHECK(std::isfinite(w.w(x)));
    CHECK(std::isfinite(w.wp(x)));
    CHECK(std::fabs(w.w(x)) <= 1.0);
    CHECK(w.wp(x) >= 0.0);
  }
}

TEST_CASE("exterior polynomial weight closed form") {
  const WeightFunction w = build_exterior_weight(1.0, 1.0);
  CHECK(w.kind == WeightFunction::Kind::exterior_polynomial);
  CHECK(w.R == doctest::Approx(1.0));
  CHECK(w.delta == doctest::Approx(1.0));
  CHECK(w.w(0.5) == doctest::Approx(0.0));
  CHECK(w.wp(0.5) == doctest::Approx(0.0));
  CHECK(w.w(3.0) == doctest::Approx(0.5));        // 1 - (2/4)
  CHECK(w.w(-3.0) == doctest::Approx(-0.5));      // odd
  CHECK(w.wp(3.0) == doctest::Approx(0.125));     // 2 (1+3)^{-2}
  CHECK(w.wp(-3.0) == doctest::Approx(0.125));
  CHECK(w.wp_decay_delta == doctest::Approx(1.0));
  // w' integrates to 2 (limit of w at +inf minus -inf)
  CHECK(w.wp_l1 == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("degenerate envelope produces the zero weight") {
  const Envelope m = envelope_abs(catalog_get("free"));
  const WeightFunction w = build_sinh_weight(m, 1.0, 1.0);
  CHECK(w.degenerate);
  CHECK(w.w(0.3) == doctest::Approx(0.0));
  CHECK(w.wp(0.3) == doctest::Approx(0.0));
}

TEST_CASE("compatibility inequality holds for the matched construction") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const double h = 1.0, E = 4.0;
  const WeightFunction w = build_sinh_weight(envelope_abs(V), h, E);
  const W2Report rep = verify_w2(w, V, h, E);
  CHECK(rep.pass);
  CHECK(rep.min_rel_margin >= -1e-12);
  CHECK(rep.n_samples > 1000);
}

TEST_CASE("compatibility holds trivially when w vanishes on the support") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_exterior_weight(1.0, 1.0);
  CHECK(verify_w2(w, V, 1.0, 4.0).pass);
}

TEST_CASE("compatibility fails when the exterior weight overlaps the potential") {
  // support radius 1 but R = 0.5: at x = 1, (k/h)|V w| = 2 * 0.25 = 0.5
  // exceeds w'(1) = 0.375
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_exterior_weight(0.5, 1.0);
  const W2Report rep = verify_w2(w, V, 1.0, 4.0);
  CHECK(!rep.pass);
  CHECK(rep.min_rel_margin < 0.0);
  CHECK(std::fabs(rep.argmin_x) > 0.5);
  CHECK(std::fabs(rep.argmin_x) <= 1.0 + 1e-9);
}

TEST_CASE("sqrt-wprime map mirrors the weight metadata") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_sinh_weight(envelope_abs(V), 1.0, 4.0);
  const WeightMap a = map_sqrt_wprime(w);
  REQUIRE(a.zero_outside.has_value());
  CHECK(*a.zero_outside == doctest::Approx(1.0));
  CHECK(a.a(0.0) == doctest::Approx(std::sqrt(w.wp(0.0))).epsilon(1e-13));
  CHECK(a.a_sq(0.5) == doctest::Approx(w.wp(0.5)).epsilon(1e-13));
  CHECK(a.a(1.5) == doctest::Approx(0.0));
}

TEST_CASE("exterior pair map") {
  const WeightMap a = map_exterior_pair(1.0, 1.0);
  CHECK(!a.zero_outside.has_value());
  CHECK(a.decays);
  CHECK(a.decay_delta == doctest::Approx(1.0));
  CHECK(a.a(0.5) == doctest::Approx(0.0));
  CHECK(a.a_sq(2.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-13)); // (1+2)^{-2}
}

TEST_CASE("envelope map squares to the envelope") {
  const Envelope m = envelope_abs(catalog_get("sech_squared"));
  const WeightMap a = map_sqrt_envelope(m);
  CHECK(a.a(0.0) == doctest::Approx(std::sqrt(m.eval(0.0))).epsilon(1e-13));
  CHECK(a.a_sq(0.4) == doctest::Approx(m.eval(0.4)).epsilon(1e-13));
  REQUIRE(a.zero_outside.has_value());
}

TEST_CASE("csv dump has the documented shape") {
  const WeightFunction w = build_exterior_weight(1.0, 1.0);
  const std::string path = "weight_dump_test.csv";
  dump_weight_csv(w, path, -5.0, 5.0, 11);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,w,w_prime");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 11);
  std::remove(path.c_str());
}

} // TEST_SUITE
