// Command-line driver: Jost/scattering diagnostics, kernel and weight dumps,
// single norm evaluations, energy audits, parameter sweeps, and reproduction
// of failing sweep rows.
//
// Exit codes: 0 all checks pass; 1 bound or identity violation;
//             2 usage/validation error; 3 numerical nonconvergence.

#include <semiscat/energy.hpp>
#include <semiscat/jost.hpp>
#include <semiscat/kernel.hpp>
#include <semiscat/norm.hpp>
#include <semiscat/potential.hpp>
#include <semiscat/sweep.hpp>
#include <semiscat/weights.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace semiscat;

// "name" or "name:p1,p2,..."
void parse_potential_arg(const std::string& arg, std::string& name,
                         std::vector<double>& params) {
  const auto colon = arg.find(':');
  name = arg.substr(0, colon == std::string::npos ? arg.size() : colon);
  params.clear();
  if (colon == std::string::npos) return;
  std::stringstream ss(arg.substr(colon + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) params.push_back(std::stod(tok));
  }
}

// each element: plain value "0.1" or "frac:0.25" meaning eps = 0.25 E
void parse_eps_list(const std::vector<std::string>& toks,
                    std::vector<double>& values, std::vector<double>& fracs) {
  for (const auto& t : toks) {
    if (t.rfind("frac:", 0) == 0) {
      const double r = std::stod(t.substr(5));
      if (!(r > 0) || r > 0.5)
        throw std::invalid_argument("--eps: frac:r requires 0 < r <= 1/2");
      fracs.push_back(r);
    } else {
      const double v = std::stod(t);
      if (v < 0) throw std::invalid_argument("--eps: eps must be >= 0");
      values.push_back(v);
    }
  }
}

Potential load_potential(const std::string& arg) {
  std::string name;
  std::vector<double> params;
  parse_potential_arg(arg, name, params);
  return catalog_get(name, params);
}

int cmd_jost(const std::string& pot, double h, double E, double eps, bool use_dd,
             const std::string& out) {
  const Potential V = load_potential(pot);
  if (use_dd) {
    const JostPairDD jp = jost_pair_dd(V, h, E, eps);
    std::printf("lambda = %.17e + %.17ei\n", to_double(jp.sd.lambda.re),
                to_double(jp.sd.lambda.im));
    std::printf("A = %.17e + %.17ei\n", to_double(jp.sd.A.re), to_double(jp.sd.A.im));
    std::printf("B = %.17e + %.17ei\n", to_double(jp.sd.B.re), to_double(jp.sd.B.im));
    std::printf("C = %.17e + %.17ei\n", to_double(jp.sd.C.re), to_double(jp.sd.C.im));
    std::printf("D = %.17e + %.17ei\n", to_double(jp.sd.D.re), to_double(jp.sd.D.im));
    std::printf("defect |A|^2-|B|^2-1      : %.3e\n", jp.sd.defect_unitarity_plus);
    std::printf("defect |D|^2-|C|^2-1 (neg): %.3e\n", jp.sd.defect_unitarity_minus);
    std::printf("defect |A-D|/|A|          : %.3e\n", jp.sd.defect_AD_rel);
    std::printf("defect |B+conj(C)|        : %.3e\n", jp.sd.defect_BC);
    std::printf("wronskian spread          : %.3e\n", jp.sd.W_spread_rel);
    return 0;
  }
  const JostPair jp = jost_pair(V, h, E, eps);
  std::printf("lambda = %.17e + %.17ei\n", jp.sd.lambda.real(), jp.sd.lambda.imag());
  std::printf("A = %.17e + %.17ei\n", jp.sd.A.real(), jp.sd.A.imag());
  std::printf("B = %.17e + %.17ei\n", jp.sd.B.real(), jp.sd.B.imag());
  std::printf("C = %.17e + %.17ei\n", jp.sd.C.real(), jp.sd.C.imag());
  std::printf("D = %.17e + %.17ei\n", jp.sd.D.real(), jp.sd.D.imag());
  std::printf("defect |A|^2-|B|^2-1      : %.3e\n", jp.sd.defect_unitarity_plus);
  std::printf("defect |D|^2-|C|^2-1 (neg): %.3e\n", jp.sd.defect_unitarity_minus);
  std::printf("defect |A-D|/|A|          : %.3e\n", jp.sd.defect_AD_rel);
  std::printf("defect |B+conj(C)|        : %.3e\n", jp.sd.defect_BC);
  std::printf("wronskian spread          : %.3e\n", jp.sd.W_spread_rel);
  const double res_p = jost_residual(jp.plus, V);
  const double res_m = jost_residual(jp.minus, V);
  std::printf("volterra residual (+,-)   : %.3e  %.3e\n", res_p, res_m);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream f(out + "/jost.csv");
    f << "x,re_u_plus,im_u_plus,re_u_minus,im_u_minus\n";
    char buf[256];
    const double lo = jp.plus.lo - 2.0, hi = jp.plus.hi + 2.0;
    const int n = 1201;
    for (int i = 0; i < n; ++i) {
      const double x = lo + (hi - lo) * i / (n - 1);
      const auto up = jp.plus.eval_u(x), um = jp.minus.eval_u(x);
      std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e,%.12e,%.12e\n", x,
                    up.real(), up.imag(), um.real(), um.imag());
      f << buf;
    }
    std::printf("wrote %s/jost.csv\n", out.c_str());
  }
  return 0;
}

int cmd_kernel(const std::string& pot, double h, double E, double eps,
               const std::string& out, int grid, double span) {
  const Potential V = load_potential(pot);
  if (eps == 0.0) {
    const auto rep = check_exterior_kernel_bound(V, h, E, grid, span);
    std::printf("max exterior |K|  : %.12e\n", rep.max_abs_K);
    std::printf("bound (sharp)     : %.12e  ratio %.6f\n", rep.bound_sharp,
                rep.ratio_sharp);
    std::printf("bound (coarse)    : %.12e  ratio %.6f\n", rep.bound_coarse,
                rep.ratio_coarse);
    std::printf("pass              : %s\n", rep.pass ? "yes" : "no");
    if (!out.empty()) {
      std::filesystem::create_directories(out);
      const KernelEval K = make_kernel(V, h, E, eps);
      std::vector<double> xs;
      for (int i = 0; i < grid; ++i)
        xs.push_back(-span + 2.0 * span * i / (grid - 1));
      dump_kernel_csv(K, out + "/kernel.csv", xs, xs);
      std::printf("wrote %s/kernel.csv\n", out.c_str());
    }
    return rep.pass ? 0 : 1;
  }
  const KernelEval K = make_kernel(V, h, E, eps);
  std::printf("lambda = %.12e + %.12ei\n", K.sd.lambda.real(), K.sd.lambda.imag());
  const auto k00 = K.value(0.0, 0.0);
  std::printf("K(0,0) = %.12e + %.12ei\n", k00.real(), k00.imag());
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::vector<double> xs;
    for (int i = 0; i < grid; ++i)
      xs.push_back(-span + 2.0 * span * i / (grid - 1));
    dump_kernel_csv(K, out + "/kernel.csv", xs, xs);
    std::printf("wrote %s/kernel.csv\n", out.c_str());
  }
  return 0;
}

int cmd_weights(const std::string& pot, double h, double E,
                const std::string& weight, double wR, double wdelta,
                const std::string& out) {
  const Potential V = load_potential(pot);
  WeightFunction w;
  if (weight == "sinh") {
    w = build_sinh_weight(envelope_abs(V), h, E);
  } else if (weight == "exterior") {
    w = build_exterior_weight(wR, wdelta);
  } else {
    throw CLI::ValidationError("--weight", "weights subcommand supports sinh|exterior");
  }
  const char* kind_name = w.kind == WeightFunction::Kind::sinh_envelope
                              ? "sinh_envelope"
                              : (w.kind == WeightFunction::Kind::exterior_polynomial
                                     ? "exterior_polynomial"
                                     : "custom");
  std::printf("kind        : %s\n", kind_name);
  std::printf("median a    : %.12e\n", w.median_a);
  std::printf("w' L1 norm  : %.12e\n", w.wp_l1);
  const W2Report r = verify_w2(w, V, h, E);
  std::printf("compatibility (k/h)|Vw| <= w': min margin %.3e at x = %.6f over %d samples -> %s\n",
              r.min_rel_margin, r.argmin_x, r.n_samples, r.pass ? "pass" : "FAIL");
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    const double R = std::max({w.R, V.support_radius.value_or(1.0), 1.0});
    dump_weight_csv(w, out + "/weight.csv", -4.0 * R, 4.0 * R);
    std::printf("wrote %s/weight.csv\n", out.c_str());
  }
  return r.pass ? 0 : 1;
}

SweepSpec spec_from_flags(const std::string& config, const std::string& pot,
                          const std::string& weight, double wR, double wdelta,
                          const std::string& envelope_kind,
                          const std::vector<double>& envelope_params,
                          const std::string& backend,
                          const std::vector<double>& hs,
                          const std::vector<double>& Es,
                          const std::vector<std::string>& eps_toks,
                          double slack, const std::string& out, int ppw,
                          int threads) {
  SweepSpec s;
  if (!config.empty()) s = sweep_spec_from_json_file(config);
  if (!pot.empty()) parse_potential_arg(pot, s.potential, s.potential_params);
  if (!weight.empty()) s.weight = weight;
  if (wR > 0) s.weight_R = wR;
  if (wdelta > 0) s.weight_delta = wdelta;
  if (!envelope_kind.empty()) s.envelope.kind = envelope_kind;
  if (!envelope_params.empty()) s.envelope.params = envelope_params;
  if (!backend.empty()) s.backend = backend;
  if (!hs.empty()) s.h_grid = hs;
  if (!Es.empty()) s.E_grid = Es;
  if (!eps_toks.empty()) {
    s.eps_values.clear();
    s.eps_fracs.clear();
    parse_eps_list(eps_toks, s.eps_values, s.eps_fracs);
  }
  if (slack > 0) s.slack = slack;
  if (!out.empty()) s.out_dir = out;
  if (ppw > 0) s.norm.ppw = ppw;
  if (threads >= 0) s.threads = threads;
  return s;
}

void print_report(const SweepReport& rep) {
  std::printf("%-10s %-10s %-10s %-16s %-16s %-10s %-5s %s\n", "h", "E", "eps",
              "computed_norm", "bound", "ratio", "pass", "note");
  for (const auto& r : rep.rows) {
    std::printf("%-10.4g %-10.4g %-10.4g %-16.8e %-16.8e %-10.4f %-5s %s\n",
                r.h, r.E, r.eps, r.computed_norm, r.bound, r.ratio,
                r.pass ? "yes" : "NO", r.converged ? r.message.c_str()
                                                   : ("NONCONVERGED " + r.message).c_str());
  }
  std::printf("summary: %d rows, max ratio %.4f, %d failures, %d nonconverged\n",
              rep.summary.total, rep.summary.max_ratio, rep.summary.failures,
              rep.summary.nonconverged);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted resolvent norms for 1-d semiclassical Schrodinger operators"};
  app.require_subcommand(1);
  // --h is a domain flag here, so the short help alias must go
  app.set_help_flag("--help", "print help");
  auto sub = [&app](const char* name, const char* desc) {
    auto* s = app.add_subcommand(name, desc);
    s->set_help_flag("--help", "print help");
    return s;
  };

  // shared flag storage
  std::string pot = "square_barrier:1,1";
  double h = 1.0, E = 1.0;
  std::string eps_tok = "0";
  std::vector<std::string> eps_list;
  std::string weight, backend, out, config, report_path;
  std::string envelope_kind;
  std::vector<double> envelope_params, hs, Es;
  double wR = 0, wdelta = 0, slack = 0;
  int ppw = 0, threads = -1, grid = 48;
  double span = 40.0;
  bool use_dd = false;

  auto* jost = sub("jost", "solve the outgoing solutions, print scattering data");
  jost->add_option("--potential", pot, "catalog potential, name[:p1,p2,...]");
  jost->add_option("--h", h, "semiclassical parameter")->check(CLI::PositiveNumber);
  jost->add_option("--E", E, "energy")->check(CLI::PositiveNumber);
  jost->add_option("--eps", eps_tok, "spectral imaginary part: value or frac:r");
  jost->add_flag("--dd", use_dd, "solve in double-double precision");
  jost->add_option("--out", out, "directory for jost.csv");

  auto* kernel = sub("kernel", "resolvent integral kernel and exterior bounds");
  kernel->add_option("--potential", pot, "catalog potential");
  kernel->add_option("--h", h)->check(CLI::PositiveNumber);
  kernel->add_option("--E", E)->check(CLI::PositiveNumber);
  kernel->add_option("--eps", eps_tok, "value or frac:r");
  kernel->add_option("--out", out, "directory for kernel.csv");
  kernel->add_option("--grid", grid, "evaluation grid per axis");
  kernel->add_option("--span", span, "evaluation half-width");

  auto* weights = sub("weights", "build a weight, verify its hypothesis, dump CSV");
  weights->add_option("--potential", pot, "catalog potential");
  weights->add_option("--h", h)->check(CLI::PositiveNumber);
  weights->add_option("--E", E)->check(CLI::PositiveNumber);
  weights->add_option("--weight", weight, "sinh | exterior")->required();
  weights->add_option("--weight-R", wR, "exterior weight inner radius");
  weights->add_option("--weight-delta", wdelta, "exterior weight decay power");
  weights->add_option("--out", out, "directory for weight.csv");

  auto* norm = sub("norm", "one weighted resolvent norm vs its bound");
  norm->add_option("--potential", pot, "catalog potential");
  norm->add_option("--h", h)->check(CLI::PositiveNumber);
  norm->add_option("--E", E)->check(CLI::PositiveNumber);
  norm->add_option("--eps", eps_tok, "value or frac:r");
  norm->add_option("--weight", weight, "sinh | exterior | exterior_pair | envelope");
  norm->add_option("--weight-R", wR);
  norm->add_option("--weight-delta", wdelta);
  norm->add_option("--envelope", envelope_kind, "abs | indicator | power");
  norm->add_option("--envelope-params", envelope_params, "A,R or A,delta")->delimiter(',');
  norm->add_option("--backend", backend, "kernel | matrix");
  norm->add_option("--slack", slack, "bound slack factor");
  norm->add_option("--grid-ppw", ppw, "matrix backend points per wavelength");
  norm->add_option("--out", out, "report directory");

  auto* audit = sub("audit", "energy-flux identities and the a-priori inequality");
  audit->add_option("--potential", pot, "catalog potential");
  audit->add_option("--h", h)->check(CLI::PositiveNumber);
  audit->add_option("--E", E)->check(CLI::PositiveNumber);
  audit->add_option("--eps", eps_tok, "value or frac:r (must be > 0)");
  audit->add_option("--out", out, "directory for trace CSVs");

  std::string sweep_pot; // empty: keep the config file's potential
  auto* sweep = sub("sweep", "grid sweep with CSV/JSON report");
  sweep->add_option("--config", config, "JSON config mirroring the sweep spec");
  sweep->add_option("--potential", sweep_pot, "catalog potential");
  sweep->add_option("--weight", weight, "sinh | exterior | exterior_pair | envelope");
  sweep->add_option("--weight-R", wR);
  sweep->add_option("--weight-delta", wdelta);
  sweep->add_option("--envelope", envelope_kind, "abs | indicator | power");
  sweep->add_option("--envelope-params", envelope_params)->delimiter(',');
  sweep->add_option("--backend", backend, "kernel | matrix");
  sweep->add_option("--h", hs, "h grid")->delimiter(',');
  sweep->add_option("--E", Es, "E grid")->delimiter(',');
  sweep->add_option("--eps", eps_list, "eps grid; elements value or frac:r")->delimiter(',');
  sweep->add_option("--slack", slack, "bound slack factor");
  sweep->add_option("--grid-ppw", ppw, "matrix backend points per wavelength");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");
  sweep->add_option("--out", out, "report directory");

  auto* repro = sub("repro", "re-run the failing rows of a report.json");
  repro->add_option("--report", report_path, "path to report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto resolve_eps = [&](double Eval) {
      if (eps_tok.rfind("frac:", 0) == 0) {
        const double r = std::stod(eps_tok.substr(5));
        if (!(r > 0) || r > 0.5)
          throw std::invalid_argument("--eps frac:r requires 0 < r <= 1/2");
        return r * Eval;
      }
      const double v = std::stod(eps_tok);
      if (v < 0) throw std::invalid_argument("--eps must be >= 0");
      return v;
    };

    if (jost->parsed()) return cmd_jost(pot, h, E, resolve_eps(E), use_dd, out);
    if (kernel->parsed()) return cmd_kernel(pot, h, E, resolve_eps(E), out, grid, span);
    if (weights->parsed())
      return cmd_weights(pot, h, E, weight, wR > 0 ? wR : 1.0,
                         wdelta > 0 ? wdelta : 1.0, out);
    if (norm->parsed()) {
      SweepSpec s = spec_from_flags("", pot, weight.empty() ? "sinh" : weight, wR,
                                    wdelta, envelope_kind, envelope_params,
                                    backend.empty() ? "kernel" : backend, {h}, {E},
                                    {eps_tok}, slack, out, ppw, 1);
      const SweepReport rep = run_sweep(s);
      print_report(rep);
      return sweep_exit_code(rep);
    }
    if (audit->parsed()) {
      const Potential V = load_potential(pot);
      const auto rep = run_audit_batch(V, h, E, resolve_eps(E), out);
      std::printf("%-20s %-20s %-12s %-12s %-12s %-12s %s\n", "test_function",
                  "weight", "flux_rel", "eps_rel", "apriori", "min_margin", "pass");
      for (const auto& r : rep.rows)
        std::printf("%-20s %-20s %-12.3e %-12.3e %-12.6f %-12.3e %s\n",
                    r.test_function.c_str(), r.weight_kind.c_str(), r.flux_rel,
                    r.eps_rel, r.apriori_ratio, r.min_margin_rel,
                    r.pass ? "yes" : "NO");
      return rep.all_pass ? 0 : 1;
    }
    if (sweep->parsed()) {
      const SweepSpec s =
          spec_from_flags(config, sweep_pot, weight, wR, wdelta, envelope_kind,
                          envelope_params, backend, hs, Es, eps_list, slack, out,
                          ppw, threads);
      const SweepReport rep = run_sweep(s);
      print_report(rep);
      if (!s.out_dir.empty())
        std::printf("wrote %s/report.csv and %s/report.json\n", s.out_dir.c_str(),
                    s.out_dir.c_str());
      return sweep_exit_code(rep);
    }
    if (repro->parsed()) {
      const SweepReport rep = rerun_failures(report_path);
      if (rep.rows.empty()) {
        std::printf("no failing rows recorded; nothing to re-run\n");
        return 0;
      }
      print_report(rep);
      return sweep_exit_code(rep);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 2;
}
