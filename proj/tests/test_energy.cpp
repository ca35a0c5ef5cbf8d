// Energy-flux audit: the integral of (wF)' must vanish, the dissipation
// identity must close, the pointwise inequality must hold with nonnegative
// margin, and the a-priori bound ratio must stay below one.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "semiscat/energy.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/weights.hpp"

using namespace semiscat;

TEST_SUITE("energy") {

TEST_CASE("stock test functions are usable") {
  const auto fns = audit_test_functions();
  REQUIRE(fns.size() == 3);
  for (const auto& f : fns) {
    CHECK(!f.name.empty());
    CHECK(f.half_width > 0.0);
    CHECK(std::abs(f.v(0.5)) >= 0.0); // callable
    // decayed at the declared half width
    CHECK(std::abs(f.v(f.half_width)) <= 1e-6);
  }
}

TEST_CASE("identities close for the saturating weight") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_sinh_weight(envelope_abs(V), 1.0, 1.0);
  const auto fns = audit_test_functions();
  for (const auto& f : fns) {
    const EnergyTrace t = audit_energy(V, w, f, 1.0, 1.0, 0.1);
    CAPTURE(f.name);
    CHECK(t.flux_rel <= 1e-8);
    CHECK(t.eps_rel <= 1e-8);
    CHECK(t.min_margin_rel >= -1e-10);
    const AprioriReport ap = audit_apriori_bound(t, t.v_l2_sq);
    CHECK(ap.pass);
    CHECK(ap.ratio <= 1.0);
    CHECK(ap.ratio > 0.0);
  }
}

TEST_CASE("identities close for the exterior weight") {
  const Potential V = catalog_get("sech_squared");
  const WeightFunction w = build_exterior_weight(1.0, 1.0);
  const TestFunction f = audit_test_functions()[0];
  const EnergyTrace t = audit_energy(V, w, f, 0.5, 2.0, 0.2);
  CHECK(t.flux_rel <= 1e-8);
  CHECK(t.eps_rel <= 1e-8);
  CHECK(t.min_margin_rel >= -1e-10);
  // exterior weight carries no k of its own; the audit fills in 4/sqrt(E)
  CHECK(t.k == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("trace fields are mutually consistent") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_sinh_weight(envelope_abs(V), 1.0, 1.0);
  const TestFunction f = audit_test_functions()[0];
  const EnergyTrace t = audit_energy(V, w, f, 1.0, 1.0, 0.1);
  REQUIRE(t.x.size() == t.u.size());
  REQUIRE(t.x.size() == t.F.size());
  REQUIRE(t.x.size() == t.wF.size());
  REQUIRE(t.x.size() == t.wF_prime.size());
  REQUIRE(t.x.size() == t.margin.size());
  REQUIRE(t.x.size() == t.qw.size());
  // F is nonnegative; quadrature weights positive
  for (size_t i = 0; i < t.x.size(); i += 7) {
    CHECK(t.F[i] >= 0.0);
    CHECK(t.qw[i] > 0.0);
  }
  // the flux integral recomputes from the stored trace
  double flux = 0;
  for (size_t i = 0; i < t.x.size(); ++i) flux += t.qw[i] * t.wF_prime[i];
  CHECK(std::fabs(flux - t.flux_integral) <= 1e-12 * (1.0 + std::fabs(t.flux_integral)));
  CHECK(t.wp_u_sq > 0.0);
  CHECK(t.v_l2_sq > 0.0);
}

TEST_CASE("zero forcing gives the zero solution and trivial identities") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_sinh_weight(envelope_abs(V), 1.0, 1.0);
  TestFunction z;
  z.name = "zero";
  z.v = [](double) { return std::complex<double>(0.0, 0.0); };
  z.half_width = 2.0;
  const EnergyTrace t = audit_energy(V, w, z, 1.0, 1.0, 0.1);
  CHECK(t.flux_rel == doctest::Approx(0.0));
  CHECK(t.eps_lhs == doctest::Approx(0.0));
  CHECK(t.min_margin_rel >= 0.0);
}

TEST_CASE("audit requires genuine dissipation") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_sinh_weight(envelope_abs(V), 1.0, 1.0);
  const TestFunction f = audit_test_functions()[0];
  CHECK_THROWS_AS((void)audit_energy(V, w, f, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)audit_energy(V, w, f, 1.0, 1.0, 0.9), std::invalid_argument);
}

TEST_CASE("trace csv dump has the documented shape") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_sinh_weight(envelope_abs(V), 1.0, 1.0);
  const TestFunction f = audit_test_functions()[0];
  const EnergyTrace t = audit_energy(V, w, f, 1.0, 1.0, 0.1);
  const std::string path = "trace_dump_test.csv";
  dump_trace_csv(t, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,F,wF,wF_prime,margin");
  size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == t.x.size());
  std::remove(path.c_str());
}

} // TEST_SUITE
