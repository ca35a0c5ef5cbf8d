// Resolvent kernel: free-space closed form, the defining jump condition of a
// Green's function, symmetry, and the closed-form exterior bound scan.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>

#include "semiscat/kernel.hpp"
#include "semiscat/potential.hpp"

using namespace semiscat;
using Cd = std::complex<double>;

TEST_SUITE("kernel") {

TEST_CASE("free kernel closed form at marked points") {
  // h = 1, E = 1: K(x,y) = i e^{i|x-y|} / 2
  CHECK(std::abs(free_kernel(1, 1, 0, 0.0, 0.0) - Cd(0, 0.5)) <= 1e-15);
  const double pi = 3.14159265358979323846;
  CHECK(std::abs(free_kernel(1, 1, 0, 0.0, pi) - Cd(0, -0.5)) <= 1e-14);
}

TEST_CASE("zero-amplitude barrier reproduces the free kernel through the full solver") {
  const Potential V = catalog_get("square_barrier", {0.0, 1.0});
  for (double h : {1.0, 0.5}) {
    const double E = (h == 1.0) ? 1.0 : 2.0;
    const KernelEval K = make_kernel(V, h, E, 0.0);
    double worst = 0;
    for (int i = 0; i < 25; ++i) {
      for (int j = 0; j < 25; ++j) {
        const double x = -6.0 + 12.0 * i / 24.0, y = -6.0 + 12.0 * j / 24.0;
        const Cd ref = free_kernel(h, E, 0.0, x, y);
        worst = std::max(worst, std::abs(K.value(x, y) - ref) / std::abs(ref));
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("derivative jump across the diagonal equals -1/h^2") {
  // For the Green's function of h^2: d/dx K at x = y+ minus x = y- must be
  // -1/h^2; assembled from the two one-sided scattering solutions.
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const double h = 0.7, E = 1.3, eps = 0.05;
  const KernelEval K = make_kernel(V, h, E, eps);
  for (double y : {0.3, -0.8, 1.7}) {
    const Cd right = -K.um.eval_u(y) * K.up.eval_du(y) / (K.sd.W * (h * h));
    const Cd left = -K.um.eval_du(y) * K.up.eval_u(y) / (K.sd.W * (h * h));
    const Cd jump = right - left;
    CHECK(std::abs(jump - Cd(-1.0 / (h * h), 0.0)) <= 1e-10 / (h * h));
  }
}

TEST_CASE("kernel is symmetric by construction") {
  const Potential V = catalog_get("gaussian_truncated");
  const KernelEval K = make_kernel(V, 0.6, 1.7, 0.1);
  for (double x : {-2.0, 0.1}) {
    for (double y : {-0.5, 1.9}) {
      CHECK(std::abs(K.value(x, y) - K.value(y, x)) <= 1e-15);
    }
  }
}

TEST_CASE("kernel solves the equation away from the diagonal") {
  // (-h^2 d^2/dx^2 + V - E - i eps) K(., y) = 0 for x != y; test with a
  // five-point second-difference in a region where V is smooth (inside the
  // barrier plateau).
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const double h = 1.0, E = 2.0, eps = 0.1, y = 3.0;
  const KernelEval K = make_kernel(V, h, E, eps);
  const double x0 = 0.0, d = 1e-3;
  const Cd k0 = K.value(x0, y);
  const Cd kp = K.value(x0 + d, y), km = K.value(x0 - d, y);
  const Cd kpp = K.value(x0 + 2 * d, y), kmm = K.value(x0 - 2 * d, y);
  const Cd d2 = (-kpp + 16.0 * kp - 30.0 * k0 + 16.0 * km - kmm) / (12.0 * d * d);
  const Cd resid = -h * h * d2 + (V.eval(x0) - E - Cd(0, eps)) * k0;
  CHECK(std::abs(resid) <= 1e-6 * std::abs(k0));
}

TEST_CASE("exterior bound report passes with ratios below one") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const auto rep = check_exterior_kernel_bound(V, 0.5, 2.0);
  CHECK(rep.pass);
  CHECK(rep.bound_coarse == doctest::Approx(1.0 / (0.5 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(rep.ratio_sharp <= 1.0 + 1e-12);
  CHECK(rep.ratio_coarse <= 1.0 + 1e-12);
  CHECK(rep.max_abs_K > 0.0);
  // the sharp bound is genuinely sharper
  CHECK(rep.bound_sharp <= rep.bound_coarse * (1.0 + 1e-12));
}

TEST_CASE("csv dump has the documented shape") {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const KernelEval K = make_kernel(V, 1.0, 1.0, 0.1);
  const std::string path = "kernel_dump_test.csv";
  dump_kernel_csv(K, path, {-1.0, 0.0, 1.0}, {-1.0, 1.0});
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y,re_K,im_K");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);
  std::remove(path.c_str());
}

} // TEST_SUITE
