// Operator-norm solvers: the dense SVD and the power iteration must agree,
// the two independent backends must agree, the free resolvent reproduces its
// exact norm 1/eps, and the exact rescaling invariances hold.

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "semiscat/norm.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/weights.hpp"

using namespace semiscat;

TEST_SUITE("norm") {

TEST_CASE("dense SVD and power iteration agree on the same discretization") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightMap a = map_sqrt_envelope(envelope_abs(V));
  NormOptions dense_opts;           // default: dense below 700 unknowns
  NormOptions power_opts;
  power_opts.dense_cap = 0;         // force the iterative path
  const NormEstimate nd = norm_via_kernel(V, 0.5, 2.0, 0.0, a, dense_opts);
  const NormEstimate np = norm_via_kernel(V, 0.5, 2.0, 0.0, a, power_opts);
  REQUIRE(nd.converged);
  REQUIRE(np.converged);
  CHECK(nd.iterations == 0);  // dense path
  CHECK(np.iterations > 0);   // iterative path
  // The iterative path stops when its extrapolated remaining error is below
  // 1e-6 of the estimate, so agreement with the dense SVD is promised at that
  // level (5x slop for the extrapolation itself), not at machine precision.
  CHECK(std::fabs(nd.value - np.value) <= 5e-6 * nd.value);
}

TEST_CASE("free resolvent norm is 1/eps on the matrix backend") {
  const Potential V = catalog_get("free");
  const WeightMap one = map_one();
  for (double eps : {0.1, 0.2}) {
    const double E = (eps == 0.1) ? 1.0 : 2.0;
    const NormEstimate est = norm_via_matrix(V, 1.0, E, eps, one);
    REQUIRE(est.converged);
    CHECK(std::fabs(est.value - 1.0 / eps) <= 0.01 / eps);
  }
}

TEST_CASE("backends agree within two percent on a compact potential") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightMap a = map_sqrt_wprime(build_sinh_weight(envelope_abs(V), 0.5, 2.0));
  const double h = 0.5, E = 2.0, eps = 0.2;
  const NormEstimate k = norm_via_kernel(V, h, E, eps, a);
  const NormEstimate m = norm_via_matrix(V, h, E, eps, a);
  REQUIRE(k.converged);
  REQUIRE(m.converged);
  CHECK(std::fabs(k.value - m.value) <= 0.02 * std::max(k.value, m.value));
}

TEST_CASE("kernel backend handles eps = 0 with a decaying multiplier") {
  const Potential V = catalog_get("free");
  const WeightMap a = map_exterior_pair(1.0, 1.0);
  const NormEstimate est = norm_via_kernel(V, 1.0, 1.0, 0.0, a);
  CHECK(est.value > 0.1);
  // the proved bound for this pair at h = E = delta = R = 1 is
  // 2 / (h delta (1+R)^delta sqrt(E)) = 1
  CHECK(est.value <= 1.0);
}

TEST_CASE("matrix backend refuses eps = 0") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightMap one = map_one();
  CHECK_THROWS_AS((void)norm_via_matrix(V, 1.0, 1.0, 0.0, one), std::invalid_argument);
}

TEST_CASE("norm decreases as eps grows") {
  // larger dissipation -> smaller resolvent, on either backend
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightMap a = map_sqrt_envelope(envelope_abs(V));
  const NormEstimate n1 = norm_via_kernel(V, 1.0, 1.0, 0.05, a);
  const NormEstimate n2 = norm_via_kernel(V, 1.0, 1.0, 0.5, a);
  REQUIRE(n1.converged);
  REQUIRE(n2.converged);
  CHECK(n1.value > n2.value);
}

TEST_CASE("estimate reports discretization provenance") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightMap a = map_sqrt_envelope(envelope_abs(V));
  const NormEstimate est = norm_via_kernel(V, 1.0, 2.0, 0.1, a);
  CHECK(est.backend == "kernel");
  CHECK(est.n > 0);
  CHECK(est.window > 0.0);
  CHECK(est.refine_rel_change >= 0.0);
  const NormEstimate fd = norm_via_matrix(V, 1.0, 2.0, 0.1, map_one());
  CHECK(fd.backend == "matrix");
  CHECK(fd.ppw >= 20);
}

TEST_CASE("rescaling invariances") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const RescalingReport rep = check_rescaling_invariance(V, 0.7, 1.5, 0.15);
  REQUIRE(rep.converged);
  CHECK(rep.pass);
  CHECK(rep.diff_dilation <= 1e-4);
  CHECK(rep.diff_energy <= 1e-4);
  CHECK(rep.base > 0.0);
}

} // TEST_SUITE
