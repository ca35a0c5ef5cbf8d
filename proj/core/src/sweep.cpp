#include "semiscat/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace semiscat {
namespace {

using nlohmann::json;

Envelope make_envelope(const EnvelopeSpec& es, const Potential& V) {
  if (es.kind == "abs") return envelope_abs(V);
  if (es.kind == "indicator") {
    if (es.params.size() != 2)
      throw std::invalid_argument("envelope indicator needs params [A, R]");
    return envelope_indicator(es.params[0], es.params[1]);
  }
  if (es.kind == "power") {
    if (es.params.size() != 2)
      throw std::invalid_argument("envelope power needs params [A, delta]");
    return envelope_power(es.params[0], es.params[1]);
  }
  throw std::invalid_argument("unknown envelope kind: " + es.kind);
}

bool needs_envelope(const std::string& weight) {
  return weight == "sinh" || weight == "envelope";
}

struct RowSetup {
  WeightMap a;
  double bound = 0;
};

RowSetup setup_row(const SweepSpec& spec, const Potential& V, const Envelope* m,
                   double h, double E) {
  RowSetup rs;
  if (spec.weight == "sinh") {
    const WeightFunction w = build_sinh_weight(*m, h, E);
    const W2Report w2 = verify_w2(w, V, h, E);
    if (!w2.pass)
      throw std::invalid_argument(
          "weight hypothesis (k/h)|Vw| <= w' violated; no bound attributable");
    rs.a = map_sqrt_wprime(w);
    rs.bound = 8.0 / (std::sqrt(E) * h);
  } else if (spec.weight == "exterior") {
    const WeightFunction w = build_exterior_weight(spec.weight_R, spec.weight_delta);
    const W2Report w2 = verify_w2(w, V, h, E);
    if (!w2.pass)
      throw std::invalid_argument(
          "weight hypothesis (k/h)|Vw| <= w' violated; no bound attributable");
    rs.a = map_sqrt_wprime(w);
    rs.bound = 8.0 / (std::sqrt(E) * h);
  } else if (spec.weight == "exterior_pair") {
    rs.a = map_exterior_pair(spec.weight_R, spec.weight_delta);
    rs.bound = 2.0 / (h * spec.weight_delta *
                      std::pow(1.0 + spec.weight_R, spec.weight_delta) *
                      std::sqrt(E));
  } else if (spec.weight == "envelope") {
    rs.a = map_sqrt_envelope(*m);
    rs.bound = std::exp(2.0 * m->l1_norm / (std::sqrt(E) * h));
  } else {
    throw std::invalid_argument("unknown weight kind: " + spec.weight);
  }
  return rs;
}

std::vector<double> resolved_eps(const SweepSpec& spec, double E) {
  std::vector<double> out = spec.eps_values;
  for (double r : spec.eps_fracs) out.push_back(r * E);
  return out;
}

void validate_spec(const SweepSpec& spec, const Potential& V) {
  if (spec.h_grid.empty() || spec.E_grid.empty())
    throw std::invalid_argument("sweep: empty h or E grid");
  if (spec.eps_values.empty() && spec.eps_fracs.empty())
    throw std::invalid_argument("sweep: no eps values given");
  for (double h : spec.h_grid)
    if (!(h > 0)) throw std::invalid_argument("sweep: h must be positive");
  for (double E : spec.E_grid)
    if (!(E > 0)) throw std::invalid_argument("sweep: E must be positive");
  for (double r : spec.eps_fracs)
    if (!(r > 0) || r > 0.5)
      throw std::invalid_argument("sweep: eps fraction must satisfy 0 < r <= 1/2");
  if (!(spec.slack > 0)) throw std::invalid_argument("sweep: slack must be positive");
  if (spec.backend != "kernel" && spec.backend != "matrix")
    throw std::invalid_argument("sweep: backend must be kernel or matrix");
  for (double E : spec.E_grid)
    for (double eps : resolved_eps(spec, E)) {
      if (eps < 0) throw std::invalid_argument("sweep: eps must be >= 0");
      if (eps == 0 && spec.backend != "kernel")
        throw std::invalid_argument("sweep: eps = 0 requires the kernel backend");
      if (eps > 0 && !(E >= 2 * eps))
        throw std::invalid_argument("sweep: outside the regime E >= 2 eps");
    }
  if (spec.weight == "exterior" || spec.weight == "exterior_pair") {
    if (!(spec.weight_R > 0) || !(spec.weight_delta > 0))
      throw std::invalid_argument("sweep: exterior weight needs R > 0, delta > 0");
    if (spec.weight == "exterior") {
      if (!V.support_radius || *V.support_radius > spec.weight_R + 1e-12)
        throw std::invalid_argument(
            "sweep: exterior weight requires supp V inside [-R, R]");
    }
  }
  if (needs_envelope(spec.weight)) {
    const Envelope m = make_envelope(spec.envelope, V);
    if (!envelope_dominates(m, V))
      throw std::invalid_argument("sweep: envelope does not dominate |V|");
  }
}

json spec_to_json(const SweepSpec& s) {
  json j;
  j["potential"] = {{"name", s.potential}, {"params", s.potential_params}};
  j["weight"] = {{"kind", s.weight},
                 {"R", s.weight_R},
                 {"delta", s.weight_delta},
                 {"envelope", {{"kind", s.envelope.kind}, {"params", s.envelope.params}}}};
  j["backend"] = s.backend;
  j["h"] = s.h_grid;
  j["E"] = s.E_grid;
  j["eps"] = s.eps_values;
  j["eps_frac"] = s.eps_fracs;
  j["slack"] = s.slack;
  j["out"] = s.out_dir;
  j["threads"] = s.threads;
  j["norm"] = {{"p", s.norm.p},
               {"max_len", s.norm.max_len},
               {"wl_factor", s.norm.wl_factor},
               {"window_tol", s.norm.window_tol},
               {"window_cap_factor", s.norm.window_cap_factor},
               {"dense_cap", s.norm.dense_cap},
               {"power_max", s.norm.power_max},
               {"power_tol", s.norm.power_tol},
               {"power_extrap_tol", s.norm.power_extrap_tol},
               {"p_refine", s.norm.p_refine},
               {"refine_tol", s.norm.refine_tol},
               {"ppw", s.norm.ppw},
               {"ppw_max", s.norm.ppw_max},
               {"ppw_agree_tol", s.norm.ppw_agree_tol},
               {"box_factor", s.norm.box_factor},
               {"domain_cap", s.norm.domain_cap},
               {"check_box", s.norm.check_box}};
  return j;
}

SweepSpec spec_from_json(const json& j) {
  SweepSpec s;
  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    if (p.is_string()) {
      s.potential = p.get<std::string>();
    } else {
      s.potential = p.value("name", s.potential);
      s.potential_params = p.value("params", s.potential_params);
    }
  }
  if (j.contains("weight")) {
    const auto& w = j.at("weight");
    if (w.is_string()) {
      s.weight = w.get<std::string>();
    } else {
      s.weight = w.value("kind", s.weight);
      s.weight_R = w.value("R", s.weight_R);
      s.weight_delta = w.value("delta", s.weight_delta);
      if (w.contains("envelope")) {
        s.envelope.kind = w.at("envelope").value("kind", s.envelope.kind);
        s.envelope.params = w.at("envelope").value("params", s.envelope.params);
      }
    }
  }
  s.backend = j.value("backend", s.backend);
  s.h_grid = j.value("h", s.h_grid);
  s.E_grid = j.value("E", s.E_grid);
  s.eps_values = j.value("eps", s.eps_values);
  s.eps_fracs = j.value("eps_frac", s.eps_fracs);
  s.slack = j.value("slack", s.slack);
  s.out_dir = j.value("out", s.out_dir);
  s.threads = j.value("threads", s.threads);
  if (j.contains("norm")) {
    const auto& n = j.at("norm");
    s.norm.p = n.value("p", s.norm.p);
    s.norm.max_len = n.value("max_len", s.norm.max_len);
    s.norm.wl_factor = n.value("wl_factor", s.norm.wl_factor);
    s.norm.window_tol = n.value("window_tol", s.norm.window_tol);
    s.norm.window_cap_factor = n.value("window_cap_factor", s.norm.window_cap_factor);
    s.norm.dense_cap = n.value("dense_cap", s.norm.dense_cap);
    s.norm.power_max = n.value("power_max", s.norm.power_max);
    s.norm.power_tol = n.value("power_tol", s.norm.power_tol);
    s.norm.power_extrap_tol = n.value("power_extrap_tol", s.norm.power_extrap_tol);
    s.norm.p_refine = n.value("p_refine", s.norm.p_refine);
    s.norm.refine_tol = n.value("refine_tol", s.norm.refine_tol);
    s.norm.ppw = n.value("ppw", s.norm.ppw);
    s.norm.ppw_max = n.value("ppw_max", s.norm.ppw_max);
    s.norm.ppw_agree_tol = n.value("ppw_agree_tol", s.norm.ppw_agree_tol);
    s.norm.box_factor = n.value("box_factor", s.norm.box_factor);
    s.norm.domain_cap = n.value("domain_cap", s.norm.domain_cap);
    s.norm.check_box = n.value("check_box", s.norm.check_box);
  }
  return s;
}

} // namespace

SweepReport run_sweep(const SweepSpec& spec) {
  const Potential V = catalog_get(spec.potential, spec.potential_params);
  validate_spec(spec, V);

  Envelope m_storage;
  const Envelope* m = nullptr;
  if (needs_envelope(spec.weight)) {
    m_storage = make_envelope(spec.envelope, V);
    m = &m_storage;
  }

  SweepReport rep;
  rep.spec = spec;
  for (double h : spec.h_grid)
    for (double E : spec.E_grid)
      for (double eps : resolved_eps(spec, E)) {
        SweepRow row;
        row.h = h;
        row.E = E;
        row.eps = eps;
        rep.rows.push_back(row);
      }

  const size_t nrows = rep.rows.size();
  unsigned nt = spec.threads > 0 ? unsigned(spec.threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, unsigned(nrows));

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= nrows) return;
      SweepRow& row = rep.rows[i];
      try {
        const RowSetup rs = setup_row(spec, V, m, row.h, row.E);
        const NormEstimate est =
            spec.backend == "kernel"
                ? norm_via_kernel(V, row.h, row.E, row.eps, rs.a, spec.norm)
                : norm_via_matrix(V, row.h, row.E, row.eps, rs.a, spec.norm);
        row.computed_norm = est.value;
        row.bound = rs.bound;
        row.ratio = est.value / rs.bound;
        row.pass = est.value <= spec.slack * rs.bound;
        row.converged = est.converged;
        row.n = est.n;
        row.window = est.window;
        row.message = est.message;
      } catch (const std::exception& e) {
        row.converged = false;
        row.pass = false;
        row.message = e.what();
      }
    }
  };
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepSummary& s = rep.summary;
  s.total = int(nrows);
  for (const auto& row : rep.rows) {
    s.max_ratio = std::max(s.max_ratio, row.ratio);
    if (!row.pass) ++s.failures;
    if (!row.converged) ++s.nonconverged;
  }
  s.all_pass = (s.failures == 0);

  if (!spec.out_dir.empty()) {
    std::filesystem::create_directories(spec.out_dir);
    write_report_csv(rep, spec.out_dir + "/report.csv");
    write_report_json(rep, spec.out_dir + "/report.json");
  }
  return rep;
}

int sweep_exit_code(const SweepReport& report) {
  bool violation = false, nonconverged = false;
  for (const auto& row : report.rows) {
    if (!row.converged) nonconverged = true;
    else if (!row.pass) violation = true;
  }
  if (violation) return 1;
  if (nonconverged) return 3;
  return 0;
}

void write_report_csv(const SweepReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "h,E,eps,computed_norm,bound,ratio,pass\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%d\n",
                  r.h, r.E, r.eps, r.computed_norm, r.bound, r.ratio,
                  r.pass ? 1 : 0);
    out << buf;
  }
}

void write_report_json(const SweepReport& report, const std::string& path) {
  json j;
  j["provenance"] = {
      {"tool", kToolName},
      {"version", kToolVersion},
      {"potential", {{"name", report.spec.potential}, {"params", report.spec.potential_params}}},
      {"weight",
       {{"kind", report.spec.weight},
        {"R", report.spec.weight_R},
        {"delta", report.spec.weight_delta},
        {"envelope",
         {{"kind", report.spec.envelope.kind}, {"params", report.spec.envelope.params}}}}},
      {"backend", report.spec.backend},
      {"discretization", spec_to_json(report.spec)["norm"]},
      {"slack", report.spec.slack},
  };
  j["spec"] = spec_to_json(report.spec);
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"h", r.h},
                    {"E", r.E},
                    {"eps", r.eps},
                    {"computed_norm", r.computed_norm},
                    {"bound", r.bound},
                    {"ratio", r.ratio},
                    {"pass", r.pass},
                    {"converged", r.converged},
                    {"n", r.n},
                    {"window", r.window},
                    {"message", r.message}});
  }
  j["rows"] = rows;
  j["summary"] = {{"max_ratio", report.summary.max_ratio},
                  {"failures", report.summary.failures},
                  {"nonconverged", report.summary.nonconverged},
                  {"total", report.summary.total},
                  {"all_pass", report.summary.all_pass}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_json: cannot open " + path);
  out << j.dump(2) << "\n";
}

SweepSpec sweep_spec_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  // accept a previously written report.json as a config: reuse its spec block
  if (j.contains("spec") && j.at("spec").is_object()) return spec_from_json(j.at("spec"));
  return spec_from_json(j);
}

SweepReport rerun_failures(const std::string& report_json_path) {
  std::ifstream in(report_json_path);
  if (!in)
    throw std::invalid_argument("cannot open report: " + report_json_path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("report parse error: ") + e.what());
  }
  if (!j.contains("spec") || !j.contains("rows"))
    throw std::invalid_argument("report lacks spec/rows blocks");
  const SweepSpec base = spec_from_json(j.at("spec"));

  SweepReport out;
  out.spec = base;
  for (const auto& r : j.at("rows")) {
    if (r.value("pass", false) && r.value("converged", false)) continue;
    SweepSpec one = base;
    one.h_grid = {r.at("h").get<double>()};
    one.E_grid = {r.at("E").get<double>()};
    one.eps_values = {r.at("eps").get<double>()};
    one.eps_fracs.clear();
    one.out_dir.clear();
    one.threads = 1;
    const SweepReport rr = run_sweep(one);
    out.rows.insert(out.rows.end(), rr.rows.begin(), rr.rows.end());
  }
  out.summary.total = int(out.rows.size());
  for (const auto& row : out.rows) {
    out.summary.max_ratio = std::max(out.summary.max_ratio, row.ratio);
    if (!row.pass) ++out.summary.failures;
    if (!row.converged) ++out.summary.nonconverged;
  }
  out.summary.all_pass = (out.summary.failures == 0);
  return out;
}

AuditBatchReport run_audit_batch(const Potential& V, double h, double E,
                                 double eps, const std::string& out_dir,
                                 const EnergyAuditOptions& opts) {
  AuditBatchReport rep;
  const Envelope m = envelope_abs(V);
  const double Rw = std::max(1.0, V.support_radius.value_or(1.0));

  struct WCase {
    std::string name;
    WeightFunction w;
  };
  std::vector<WCase> wcases;
  wcases.push_back({"sinh_envelope", build_sinh_weight(m, h, E)});
  wcases.push_back({"exterior_polynomial", build_exterior_weight(Rw, 1.0)});

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  rep.all_pass = true;
  for (const auto& tf : audit_test_functions()) {
    for (const auto& wc : wcases) {
      const EnergyTrace t = audit_energy(V, wc.w, tf, h, E, eps, opts);
      const AprioriReport apr = audit_apriori_bound(t, t.v_l2_sq);
      AuditRow row;
      row.test_function = tf.name;
      row.weight_kind = wc.name;
      row.flux_rel = t.flux_rel;
      row.eps_rel = t.eps_rel;
      row.apriori_ratio = apr.ratio;
      row.min_margin_rel = t.min_margin_rel;
      row.pass = t.flux_rel <= 1e-6 && t.eps_rel <= 1e-6 && apr.ratio <= 1.0 &&
                 t.min_margin_rel >= -1e-8;
      rep.all_pass = rep.all_pass && row.pass;
      rep.rows.push_back(row);
      if (!out_dir.empty())
        dump_trace_csv(t, out_dir + "/trace_" + tf.name + "_" + wc.name + ".csv");
    }
  }
  return rep;
}

} // namespace semiscat
