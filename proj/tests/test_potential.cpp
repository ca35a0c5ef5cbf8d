// Potential catalog: closed-form L1 norms and cumulatives, envelope
// domination, and the exact dilation / value-scaling transforms.

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "semiscat/potential.hpp"

using namespace semiscat;

TEST_SUITE("potential") {

TEST_CASE("square barrier metadata and cumulative") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  CHECK(V.l1_norm == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(V.support_radius.has_value());
  CHECK(*V.support_radius == doctest::Approx(1.0));
  CHECK(V.eval(0.0) == doctest::Approx(1.0));
  CHECK(V.eval(2.0) == doctest::Approx(0.0));
  CHECK(V.cumulative(-2.0) == doctest::Approx(0.0));
  CHECK(V.cumulative(0.0) == doctest::Approx(1.0));
  CHECK(V.cumulative(5.0) == doctest::Approx(2.0));
}

TEST_CASE("inverse-sqrt singular potential") {
  const Potential V = catalog_get("inverse_sqrt_singular", {1.0, 1.0});
  // integral of |x|^{-1/2} over [-1,1] is 4
  CHECK(V.l1_norm == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(V.cumulative(0.0) == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(!V.singular_points.empty());
  CHECK(V.singular_points[0].position == doctest::Approx(0.0));
  CHECK(V.singular_points[0].alpha == doctest::Approx(0.5));
}

TEST_CASE("sech-squared bump cumulative matches closed form") {
  const double A = 1.0, ell = 0.5, R = 1.0;
  const Potential V = catalog_get("sech_squared", {A, ell, R});
  const double exact = 2.0 * A * ell * std::tanh(R / ell);
  CHECK(V.l1_norm == doctest::Approx(exact).epsilon(1e-13));
  const double c0 = V.cumulative(0.0);
  CHECK(c0 == doctest::Approx(exact / 2.0).epsilon(1e-13));
}

TEST_CASE("oscillatory decay has no compact support but finite L1") {
  const Potential V = catalog_get("oscillatory_decay", {1.0, 1.0});
  CHECK(!V.support_radius.has_value());
  CHECK(V.l1_norm > 0.0);
  // cumulative saturates at the L1 norm
  CHECK(V.cumulative(1e6) == doctest::Approx(V.l1_norm).epsilon(1e-6));
  // the power envelope (1+|x|)^{-2} dominates |sin(2x)| (1+|x|)^{-2}
  CHECK(envelope_dominates(envelope_power(1.0, 1.0), V));
}

TEST_CASE("catalog rejects unknown names and bad parameters") {
  CHECK_THROWS_AS((void)catalog_get("nosuch"), std::invalid_argument);
  CHECK_THROWS_AS((void)catalog_get("square_barrier", {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)catalog_get("free", {1.0}), std::invalid_argument);
}

TEST_CASE("catalog lists every entry") {
  const auto names = catalog_names();
  CHECK(names.size() >= 6);
  for (const auto& n : names) CHECK_NOTHROW((void)catalog_get(n));
}

TEST_CASE("abs envelope dominates and matches the L1 norm") {
  const Potential V = catalog_get("gaussian_truncated");
  const Envelope m = envelope_abs(V);
  CHECK(m.l1_norm == doctest::Approx(V.l1_norm).epsilon(1e-13));
  CHECK(envelope_dominates(m, V));
}

TEST_CASE("indicator envelope dominates only when tall enough") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  CHECK(envelope_dominates(envelope_indicator(1.0, 1.0), V));
  CHECK(!envelope_dominates(envelope_indicator(0.5, 1.0), V));
  CHECK(!envelope_dominates(envelope_indicator(1.0, 0.5), V));
}

TEST_CASE("dilation x -> h x transforms support and L1 exactly") {
  const Potential V = catalog_get("square_barrier", {2.0, 1.5});
  const double h = 0.4;
  const Potential W = dilate(V, h);
  CHECK(W.eval(1.5 / h - 0.01) == doctest::Approx(2.0));
  CHECK(W.eval(1.5 / h + 0.01) == doctest::Approx(0.0));
  REQUIRE(W.support_radius.has_value());
  CHECK(*W.support_radius == doctest::Approx(1.5 / h));
  CHECK(W.l1_norm == doctest::Approx(V.l1_norm / h).epsilon(1e-14));
  CHECK(W.cumulative(0.0) == doctest::Approx(V.cumulative(0.0) / h).epsilon(1e-14));
}

TEST_CASE("value scaling multiplies the L1 norm") {
  const Potential V = catalog_get("sech_squared");
  const Potential W = scale_values(V, -3.0);
  CHECK(W.eval(0.2) == doctest::Approx(-3.0 * V.eval(0.2)));
  CHECK(W.l1_norm == doctest::Approx(3.0 * V.l1_norm).epsilon(1e-14));
  CHECK(W.support_radius == V.support_radius);
}

} // TEST_SUITE
