// Acceptance gate: ten self-contained criteria, one pass/fail line each.
// Every criterion recomputes what it checks from scratch -- closed forms,
// independent discretizations, or proved inequalities -- with pinned
// tolerances and wall-clock budgets. Exit code 0 only if all ten pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "semiscat/energy.hpp"
#include "semiscat/jost.hpp"
#include "semiscat/kernel.hpp"
#include "semiscat/norm.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/sweep.hpp"
#include "semiscat/weights.hpp"

using namespace semiscat;
using Cd = std::complex<double>;

namespace {

int g_failures = 0;
int g_index = 0;

void criterion(const char* name, double budget_s,
               const std::function<bool(std::string&)>& body) {
  ++g_index;
  std::string info;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(info);
  } catch (const std::exception& e) {
    ok = false;
    info = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    ok = false;
    info += (info.empty() ? "" : "; ") + std::string("over budget");
  }
  if (!ok) ++g_failures;
  std::printf("[%2d/10] %s  %-34s  %-46s  %6.1fs (budget %.0fs)\n", g_index,
              ok ? "PASS" : "FAIL", name, info.c_str(), secs, budget_s);
  std::fflush(stdout);
}

const std::vector<double> kHGrid = {1.0, 0.5, 0.2, 0.1};
const std::vector<double> kEGrid = {0.5, 1.0, 2.0, 4.0};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

} // namespace

int main() {
  std::printf("acceptance suite: %s %s\n", kToolName, kToolVersion);

  // 1. Scattering identities |A|^2-|B|^2 = 1, A = D, B = -conj(C) at eps = 0
  //    for three potentials over the full (h, E) grid, defects <= 1e-8.
  criterion("scattering identities", 10.0, [](std::string& info) {
    // The absolute unitarity defect is demanded even deep in the tunneling
    // regime (h = 0.1, E = 0.5), where |A|^2 ~ 1e11 and double precision can
    // do no better than ~1e3; the certified double-double solve computes the
    // coefficients and the defects in extended precision.
    double worst = 0;
    for (const char* name :
         {"square_barrier", "gaussian_truncated", "inverse_sqrt_singular"}) {
      const Potential V = catalog_get(name);
      for (double h : kHGrid) {
        for (double E : kEGrid) {
          const JostPairDD jp = jost_pair_dd(V, h, E, 0.0);
          worst = std::max({worst, jp.sd.defect_unitarity_plus,
                            jp.sd.defect_AD_rel, jp.sd.defect_BC});
        }
      }
    }
    info = fmt("max defect %.2e (tol 1e-8)", worst);
    return worst <= 1e-8;
  });

  // 2. Kernel oracle: the zero-amplitude barrier runs the full solver stack
  //    and must reproduce i e^{i lam |x-y|} / (2 h^2 lam) to 1e-10 relative
  //    on a 50 x 50 grid for (h, E) = (1, 1) and (0.5, 2).
  criterion("free-kernel closed form", 1.0, [](std::string& info) {
    const Potential V = catalog_get("square_barrier", {0.0, 1.0});
    double worst = 0;
    for (const auto& [h, E] : std::vector<std::pair<double, double>>{{1, 1}, {0.5, 2}}) {
      const KernelEval K = make_kernel(V, h, E, 0.0);
      for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
          const double x = -8.0 + 16.0 * i / 49.0;
          const double y = -8.0 + 16.0 * j / 49.0;
          const Cd ref = free_kernel(h, E, 0.0, x, y);
          worst = std::max(worst, std::abs(K.value(x, y) - ref) / std::abs(ref));
        }
      }
    }
    info = fmt("max rel err %.2e (tol 1e-10)", worst);
    return worst <= 1e-10;
  });

  // 3. Exterior kernel bounds with zero slack for every compactly supported
  //    catalog potential over the same (h, E) grid; coefficients from the
  //    double-double solve.
  criterion("exterior kernel bounds", 10.0, [](std::string& info) {
    std::vector<std::future<std::pair<bool, double>>> jobs;
    for (const char* name : {"free", "square_barrier", "gaussian_truncated",
                             "inverse_sqrt_singular", "sech_squared"}) {
      for (double h : kHGrid) {
        for (double E : kEGrid) {
          jobs.push_back(std::async(std::launch::async, [name, h, E]() {
            const auto rep = check_exterior_kernel_bound(catalog_get(name), h, E);
            return std::make_pair(rep.pass,
                                  std::max(rep.ratio_sharp, rep.ratio_coarse));
          }));
        }
      }
    }
    bool all = true;
    double worst_ratio = 0;
    for (auto& j : jobs) {
      const auto [ok, ratio] = j.get();
      all = all && ok;
      worst_ratio = std::max(worst_ratio, ratio);
    }
    info = fmt("%.0f cases, max ratio %.6f (<= 1)", double(jobs.size()), worst_ratio);
    return all;
  });

  // 4. Saturating and exterior weights: computed weighted norms stay below
  //    1.05 x 8 E^{-1/2}/h on a 3 x 4 x 3 (h, E, eps) grid, both backends.
  criterion("derivative-weight norm sweep", 300.0, [](std::string& info) {
    double max_ratio = 0;
    int rows = 0;
    for (const char* weight : {"sinh", "exterior"}) {
      for (const char* backend : {"kernel", "matrix"}) {
        SweepSpec s;
        s.potential = "square_barrier";
        s.potential_params = {1.0, 1.0};
        s.weight = weight;
        s.weight_R = 1.0;
        s.weight_delta = 1.0;
        s.backend = backend;
        s.h_grid = {1.0, 0.5, 0.2};
        s.E_grid = kEGrid;
        s.eps_fracs = {0.01, 0.1, 0.5};
        s.slack = 1.05;
        const SweepReport rep = run_sweep(s);
        rows += rep.summary.total;
        max_ratio = std::max(max_ratio, rep.summary.max_ratio);
        if (!rep.summary.all_pass || rep.summary.nonconverged > 0) {
          info = std::string("violations with ") + weight + "/" + backend;
          return false;
        }
      }
    }
    info = fmt("%.0f rows, max ratio %.4f (slack 1.05)", double(rows), max_ratio);
    return true;
  });

  // 5. Envelope weight m = |V| for the square barrier down to h = 0.1 at
  //    eps = 0: norms below 1.05 x exp(2 E^{-1/2} l1(m) / h).
  criterion("envelope-weight norm sweep", 300.0, [](std::string& info) {
    SweepSpec s;
    s.potential = "square_barrier";
    s.potential_params = {1.0, 1.0};
    s.weight = "envelope";
    s.envelope.kind = "abs";
    s.backend = "kernel";
    s.h_grid = kHGrid;
    s.E_grid = kEGrid;
    s.eps_values = {0.0};
    s.slack = 1.05;
    const SweepReport rep = run_sweep(s);
    info = fmt("%.0f rows, max ratio %.2e", double(rep.summary.total),
               rep.summary.max_ratio);
    return rep.summary.all_pass && rep.summary.nonconverged == 0;
  });

  // 6. Exterior pair weight at eps = 0: norms satisfy both the scale-2 and
  //    the implied scale-8 constants with slack 1.05 for delta in
  //    {0.5, 1, 2}, R = 1. Truncated windows underestimate, so rows that hit
  //    the window cap are reported but the inequality check stays one-sided.
  criterion("exterior-pair norm sweep", 120.0, [](std::string& info) {
    double max_ratio = 0;
    int rows = 0, shaky = 0;
    for (double delta : {0.5, 1.0, 2.0}) {
      SweepSpec s;
      s.potential = "square_barrier";
      s.potential_params = {1.0, 1.0};
      s.weight = "exterior_pair";
      s.weight_R = 1.0;
      s.weight_delta = delta;
      s.backend = "kernel";
      s.h_grid = {1.0, 0.5};
      s.E_grid = {1.0, 2.0};
      s.eps_values = {0.0};
      s.slack = 1.05;
      const SweepReport rep = run_sweep(s);
      rows += rep.summary.total;
      shaky += rep.summary.nonconverged;
      max_ratio = std::max(max_ratio, rep.summary.max_ratio);
      for (const auto& row : rep.rows) {
        // row.bound is the scale-2 constant; the scale-8 companion is 4x
        // weaker, so row.pass already implies it -- assert both anyway
        if (!row.pass) return false;
        if (row.computed_norm > 1.05 * 4.0 * row.bound) return false;
      }
    }
    info = fmt("%.0f rows, max ratio %.3f", double(rows), max_ratio);
    if (shaky > 0) info += fmt(", %.0f at window cap", double(shaky));
    return true;
  });

  // 7. Backend cross-validation: kernel and matrix norms within 2% of each
  //    other over a 2 x 2 x 3 grid.
  criterion("backend cross-validation", 180.0, [](std::string& info) {
    SweepSpec s;
    s.potential = "square_barrier";
    s.potential_params = {1.0, 1.0};
    s.weight = "sinh";
    s.backend = "kernel";
    s.h_grid = {1.0, 0.5};
    s.E_grid = {1.0, 2.0};
    s.eps_fracs = {0.01, 0.1, 0.5};
    const SweepReport rk = run_sweep(s);
    s.backend = "matrix";
    const SweepReport rm = run_sweep(s);
    if (rk.rows.size() != rm.rows.size()) return false;
    double worst = 0;
    for (size_t i = 0; i < rk.rows.size(); ++i) {
      if (!rk.rows[i].converged || !rm.rows[i].converged) return false;
      const double a = rk.rows[i].computed_norm, b = rm.rows[i].computed_norm;
      worst = std::max(worst, std::fabs(a - b) / std::max(a, b));
    }
    info = fmt("%.0f pairs, max disagreement %.2e (tol 2e-2)",
               double(rk.rows.size()), worst);
    return worst <= 0.02;
  });

  // 8. Energy audit: flux and dissipation identities to 1e-6 relative and
  //    a-priori ratio <= 1 across 3 test functions x 2 weights x 2 potentials.
  criterion("energy-flux audit", 120.0, [](std::string& info) {
    double worst_id = 0, worst_ratio = 0;
    int rows = 0;
    for (const char* name : {"square_barrier", "sech_squared"}) {
      const AuditBatchReport rep = run_audit_batch(catalog_get(name), 1.0, 1.0, 0.1);
      for (const auto& row : rep.rows) {
        ++rows;
        worst_id = std::max({worst_id, row.flux_rel, row.eps_rel});
        worst_ratio = std::max(worst_ratio, row.apriori_ratio);
        if (row.flux_rel > 1e-6 || row.eps_rel > 1e-6 || row.apriori_ratio > 1.0 ||
            row.min_margin_rel < -1e-8)
          return false;
      }
    }
    info = fmt("%.0f rows, max identity defect %.1e, max apriori %.3f",
               double(rows), worst_id, worst_ratio);
    return rows == 12;
  });

  // 9. Exact rescaling invariances (dilation and energy scaling) within
  //    1e-4 relative for three catalog potentials.
  criterion("rescaling invariance", 120.0, [](std::string& info) {
    double worst = 0;
    for (const char* name : {"square_barrier", "gaussian_truncated", "sech_squared"}) {
      const RescalingReport rep =
          check_rescaling_invariance(catalog_get(name), 0.7, 1.5, 0.15, 1e-4);
      worst = std::max({worst, rep.diff_dilation, rep.diff_energy});
      if (!rep.pass || !rep.converged) {
        info = std::string("failed for ") + name;
        return false;
      }
    }
    info = fmt("max rel diff %.1e (tol 1e-4)", worst);
    return true;
  });

  // 10. Free-operator oracle: the matrix backend with a = 1 reproduces the
  //     exact resolvent norm 1/eps within 1%.
  criterion("free-resolvent norm oracle", 30.0, [](std::string& info) {
    const Potential V = catalog_get("free");
    const WeightMap one = map_one();
    double worst = 0;
    for (const auto& [E, eps] :
         std::vector<std::pair<double, double>>{{1.0, 0.1}, {2.0, 0.2}}) {
      const NormEstimate est = norm_via_matrix(V, 1.0, E, eps, one);
      if (!est.converged) return false;
      worst = std::max(worst, std::fabs(est.value - 1.0 / eps) * eps);
    }
    info = fmt("max rel err %.2e (tol 1e-2)", worst);
    return worst <= 0.01;
  });

  std::printf("ACCEPTANCE %d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
