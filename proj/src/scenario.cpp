#include "skl/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "skl/krylov.hpp"
#include "skl/metrics.hpp"
#include "skl/moments.hpp"
#include "skl/orthopoly.hpp"
#include "skl/space.hpp"
#include "skl/truncation.hpp"

namespace skl {

namespace {

// ---------------------------------------------------------------- parameters

void check_keys(const nlohmann::json& p, std::initializer_list<const char*> allowed) {
  for (auto it = p.begin(); it != p.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw schema_error("params: unknown key '" + it.key() + "'");
  }
}

double get_num(const nlohmann::json& p, const char* key, double dflt) {
  if (!p.contains(key)) return dflt;
  if (!p[key].is_number()) throw schema_error(std::string("params.") + key + ": expected a number");
  return p[key].get<double>();
}

int get_int(const nlohmann::json& p, const char* key, int dflt) {
  if (!p.contains(key)) return dflt;
  if (!p[key].is_number_integer())
    throw schema_error(std::string("params.") + key + ": expected an integer");
  return p[key].get<int>();
}

bool get_bool(const nlohmann::json& p, const char* key, bool dflt) {
  if (!p.contains(key)) return dflt;
  if (!p[key].is_boolean())
    throw schema_error(std::string("params.") + key + ": expected a boolean");
  return p[key].get<bool>();
}

std::vector<double> get_num_array(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw schema_error(where + ": expected a non-empty array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw schema_error(where + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// Node-value specifications for cyclic data and test panels.
std::function<double(double)> parse_vector_spec(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw schema_error(where + ": expected an object with a string 'kind'");
  const std::string k = j["kind"].get<std::string>();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "kind" && it.key() != "coeffs" && it.key() != "scale")
      throw schema_error(where + ": unknown key '" + it.key() + "'");
  if (k == "ones") return [](double) { return 1.0; };
  if (k == "poly") {
    if (!j.contains("coeffs")) throw schema_error(where + ": poly needs 'coeffs'");
    const auto coeffs = get_num_array(j["coeffs"], where + ".coeffs");
    return [coeffs](double l) {
      double v = 0.0;  // Horner
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * l + *it;
      return v;
    };
  }
  if (k == "sin" || k == "sin_log") {
    if (!j.contains("scale") || !j["scale"].is_number())
      throw schema_error(where + ": '" + k + "' needs a numeric 'scale'");
    const double s = j["scale"].get<double>();
    if (k == "sin") return [s](double l) { return std::sin(s * l); };
    return [s](double l) { return l > 0.0 ? std::sin(s * std::log(l)) : 0.0; };
  }
  throw schema_error(where + ": unknown vector kind '" + k + "'");
}

struct moments_params {
  int max_order = 20;
  bool hankel = true;
  double hankel_tol = 1e-10;
  int log_horizon = 0;
};

moments_params parse_moments(const nlohmann::json& p) {
  check_keys(p, {"max_order", "hankel", "hankel_tol", "log_horizon"});
  moments_params out;
  out.max_order = get_int(p, "max_order", 20);
  if (out.max_order < 1) throw schema_error("params.max_order: must be >= 1");
  out.hankel = get_bool(p, "hankel", true);
  out.hankel_tol = get_num(p, "hankel_tol", 1e-10);
  if (!(out.hankel_tol > 0.0)) throw schema_error("params.hankel_tol: must be positive");
  out.log_horizon = get_int(p, "log_horizon", 0);
  if (out.log_horizon < 0) throw schema_error("params.log_horizon: must be >= 0");
  return out;
}

struct determinacy_params {
  int K = 24;
  std::complex<double> z0{0.0, 1.0};
  int tail_window = 6;
  double tail_tol = 1e-4;
};

determinacy_params parse_determinacy(const nlohmann::json& p) {
  check_keys(p, {"K", "z0", "tail_window", "tail_tol"});
  determinacy_params out;
  out.K = get_int(p, "K", 24);
  if (out.K < 2) throw schema_error("params.K: must be >= 2");
  if (p.contains("z0")) {
    const auto z = get_num_array(p["z0"], "params.z0");
    if (z.size() != 2) throw schema_error("params.z0: expected [re, im]");
    out.z0 = {z[0], z[1]};
    if (out.z0.imag() == 0.0) throw schema_error("params.z0: must be non-real");
  }
  out.tail_window = get_int(p, "tail_window", 6);
  if (out.tail_window < 3) throw schema_error("params.tail_window: must be >= 3");
  out.tail_tol = get_num(p, "tail_tol", 1e-4);
  if (!(out.tail_tol > 0.0)) throw schema_error("params.tail_tol: must be positive");
  return out;
}

struct classify_params {
  int max_order = 20;
  int log_horizon = 0;
  double tail_tol = 1e-4;
};

classify_params parse_classify(const nlohmann::json& p) {
  check_keys(p, {"max_order", "log_horizon", "tail_tol"});
  classify_params out;
  out.max_order = get_int(p, "max_order", 20);
  if (out.max_order < 2) throw schema_error("params.max_order: must be >= 2");
  out.log_horizon = get_int(p, "log_horizon", 0);
  if (out.log_horizon < 0) throw schema_error("params.log_horizon: must be >= 0");
  out.tail_tol = get_num(p, "tail_tol", 1e-4);
  if (!(out.tail_tol > 0.0)) throw schema_error("params.tail_tol: must be positive");
  return out;
}

struct solve_params {
  int m_max = 20;
  double tol = 1e-10;
  std::function<double(double)> g;  // empty = ones
  std::vector<std::function<double(double)>> core_panel;
  int core_degree = 12;
};

solve_params parse_solve(const nlohmann::json& p) {
  check_keys(p, {"m_max", "tol", "g", "core_panel", "core_degree"});
  solve_params out;
  out.m_max = get_int(p, "m_max", 20);
  if (out.m_max < 0) throw schema_error("params.m_max: must be >= 0");
  out.tol = get_num(p, "tol", 1e-10);
  if (!(out.tol > 0.0)) throw schema_error("params.tol: must be positive");
  if (p.contains("g")) out.g = parse_vector_spec(p["g"], "params.g");
  if (p.contains("core_panel")) {
    if (!p["core_panel"].is_array()) throw schema_error("params.core_panel: expected an array");
    int i = 0;
    for (const auto& s : p["core_panel"])
      out.core_panel.push_back(
          parse_vector_spec(s, "params.core_panel[" + std::to_string(i++) + "]"));
  }
  out.core_degree = get_int(p, "core_degree", 12);
  if (out.core_degree < 0) throw schema_error("params.core_degree: must be >= 0");
  return out;
}

struct kint_params {
  int m = 0;
  int M_big = 0;
  int samples = 16;
  double threshold = kSqrt2 - 1e-3;
};

kint_params parse_kint(const nlohmann::json& p) {
  check_keys(p, {"m", "M_big", "samples", "threshold"});
  kint_params out;
  if (!p.contains("m") || !p.contains("M_big"))
    throw schema_error("params: kint needs 'm' and 'M_big'");
  out.m = get_int(p, "m", 0);
  out.M_big = get_int(p, "M_big", 0);
  if (out.m < 0) throw schema_error("params.m: must be >= 0");
  if (out.M_big <= out.m) throw schema_error("params.M_big: must exceed m");
  out.samples = get_int(p, "samples", 16);
  if (out.samples < 1) throw schema_error("params.samples: must be >= 1");
  out.threshold = get_num(p, "threshold", kSqrt2 - 1e-3);
  if (!(out.threshold > 0.0)) throw schema_error("params.threshold: must be positive");
  return out;
}

struct weakgap_params_doc {
  int k1 = 0, k2 = 0;
  int samples = 12;
  int probes = 16;
  double inner_tol = 1e-6;
  int triples = 3;
};

weakgap_params_doc parse_weakgap(const nlohmann::json& p) {
  check_keys(p, {"degrees", "samples", "probes", "inner_tol", "triples"});
  weakgap_params_doc out;
  if (!p.contains("degrees")) throw schema_error("params: weakgap needs 'degrees'");
  const auto d = get_num_array(p["degrees"], "params.degrees");
  if (d.size() != 2 || d[0] != std::floor(d[0]) || d[1] != std::floor(d[1]))
    throw schema_error("params.degrees: expected two integers [k1, k2]");
  out.k1 = static_cast<int>(d[0]);
  out.k2 = static_cast<int>(d[1]);
  if (out.k1 < 0 || out.k2 < out.k1)
    throw schema_error("params.degrees: need 0 <= k1 <= k2");
  out.samples = get_int(p, "samples", 12);
  if (out.samples < 1) throw schema_error("params.samples: must be >= 1");
  out.probes = get_int(p, "probes", 16);
  if (out.probes < 1) throw schema_error("params.probes: must be >= 1");
  out.inner_tol = get_num(p, "inner_tol", 1e-6);
  if (!(out.inner_tol > 0.0)) throw schema_error("params.inner_tol: must be positive");
  out.triples = get_int(p, "triples", 3);
  if (out.triples < 0) throw schema_error("params.triples: must be >= 0");
  return out;
}

struct truncation_params_doc {
  truncation_params par;
  std::function<double(double)> g;  // empty = ones
  std::vector<std::function<double(double)>> panel;
  std::vector<std::vector<double>> polys;
};

truncation_params_doc parse_truncation(const nlohmann::json& p) {
  check_keys(p, {"radii", "degree", "samples", "probes", "inner_tol", "g", "panel", "polys"});
  truncation_params_doc out;
  if (!p.contains("radii")) throw schema_error("params: truncation needs 'radii'");
  out.par.radii = get_num_array(p["radii"], "params.radii");
  for (std::size_t t = 0; t < out.par.radii.size(); ++t) {
    if (!(out.par.radii[t] > 0.0) || !std::isfinite(out.par.radii[t]))
      throw schema_error("params.radii: must be positive and finite");
    if (t > 0 && !(out.par.radii[t] > out.par.radii[t - 1]))
      throw schema_error("params.radii: must be strictly increasing");
  }
  out.par.degree = get_int(p, "degree", 24);
  if (out.par.degree < 0) throw schema_error("params.degree: must be >= 0");
  out.par.samples = get_int(p, "samples", 12);
  if (out.par.samples < 1) throw schema_error("params.samples: must be >= 1");
  out.par.probes = get_int(p, "probes", 64);
  if (out.par.probes < 1) throw schema_error("params.probes: must be >= 1");
  out.par.inner_tol = get_num(p, "inner_tol", 1e-6);
  if (!(out.par.inner_tol > 0.0)) throw schema_error("params.inner_tol: must be positive");
  if (p.contains("g")) out.g = parse_vector_spec(p["g"], "params.g");
  if (p.contains("panel")) {
    if (!p["panel"].is_array()) throw schema_error("params.panel: expected an array");
    int i = 0;
    for (const auto& s : p["panel"])
      out.panel.push_back(parse_vector_spec(s, "params.panel[" + std::to_string(i++) + "]"));
  } else {
    out.panel.push_back([](double) { return 1.0; });
  }
  if (p.contains("polys")) {
    if (!p["polys"].is_array() || p["polys"].empty())
      throw schema_error("params.polys: expected a non-empty array of coefficient arrays");
    int i = 0;
    for (const auto& c : p["polys"])
      out.polys.push_back(get_num_array(c, "params.polys[" + std::to_string(i++) + "]"));
  } else {
    out.polys = {{1.0}, {0.0, 1.0}, {0.0, 0.0, 1.0}};
  }
  return out;
}

void validate_params_for(task_kind task, const nlohmann::json& p) {
  switch (task) {
    case task_kind::moments: parse_moments(p); return;
    case task_kind::determinacy: parse_determinacy(p); return;
    case task_kind::classify: parse_classify(p); return;
    case task_kind::solve: parse_solve(p); return;
    case task_kind::kint: parse_kint(p); return;
    case task_kind::weakgap: parse_weakgap(p); return;
    case task_kind::truncation: parse_truncation(p); return;
  }
  throw schema_error("unknown task");
}

bool needs_seed(task_kind t) {
  return t == task_kind::kint || t == task_kind::weakgap || t == task_kind::truncation;
}

// ------------------------------------------------------------------- tables

std::string num_str(double x) { return nlohmann::json(x).dump(); }

struct csv {
  std::ostringstream os;
  explicit csv(const std::string& header) { os << header << "\n"; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  }
  std::string str() const { return os.str(); }
};

nlohmann::json space_meta(const discretized_space& sp) {
  nlohmann::json j;
  j["dim"] = sp.dim();
  if (sp.declared_exactness == std::numeric_limits<int>::max())
    j["declared_exactness"] = nullptr;  // atoms only: every moment is exact
  else
    j["declared_exactness"] = sp.declared_exactness;
  if (!sp.note.empty()) j["note"] = sp.note;
  return j;
}

struct task_output {
  nlohmann::json result;
  nlohmann::json space;
  std::vector<std::pair<std::string, std::string>> tables;
};

// --------------------------------------------------------------- task runs

task_output run_moments_task(const scenario& sc) {
  const auto par = parse_moments(sc.params);
  const discretized_space sp = discretize(sc.measure);
  moment_sequence ms = compute_moments(sp, par.max_order);
  if (par.log_horizon > 0) ms.log_even = log_even_moments(sp, par.log_horizon);

  task_output out;
  out.space = space_meta(sp);
  out.result["moments"] = ms.to_json();
  csv t("n,s_n");
  for (std::size_t n = 0; n < ms.s.size(); ++n)
    t.row({std::to_string(n), num_str(ms.s[n])});
  out.tables.emplace_back("moments", t.str());

  if (par.hankel) {
    const hankel_report h = hankel_psd_check(ms, par.hankel_tol);
    out.result["hankel"] = h.to_json();
    csv th("k,min_eigenvalue,norm");
    for (std::size_t k = 0; k < h.min_eigenvalues.size(); ++k)
      th.row({std::to_string(k + 1), num_str(h.min_eigenvalues[k]), num_str(h.norms[k])});
    out.tables.emplace_back("hankel", th.str());
  }
  return out;
}

task_output run_determinacy_task(const scenario& sc) {
  const auto par = parse_determinacy(sc.params);
  const discretized_space sp = discretize(sc.measure);
  const recurrence_coefficients rc = stieltjes_recurrence(sp, par.K);
  const determinacy_report rep =
      determinacy_series_test(rc, par.z0, par.tail_window, par.tail_tol);

  task_output out;
  out.space = space_meta(sp);
  out.result["recurrence"] = rc.to_json();
  out.result["determinacy"] = rep.to_json();
  out.result["indication"] = indication(rep.verdict);
  csv t("k,alpha_k,beta_k,term,partial_sum");
  for (std::size_t k = 0; k < rep.terms.size(); ++k)
    t.row({std::to_string(k), k < rc.alpha.size() ? num_str(rc.alpha[k]) : std::string(),
           k >= 1 && k - 1 < rc.beta.size() ? num_str(rc.beta[k - 1]) : std::string(),
           num_str(rep.terms[k]), num_str(rep.partial_sums[k])});
  out.tables.emplace_back("series", t.str());
  return out;
}

task_output run_classify_task(const scenario& sc) {
  const auto par = parse_classify(sc.params);
  const discretized_space sp = discretize(sc.measure);
  moment_sequence ms = compute_moments(sp, par.max_order);
  if (par.log_horizon > 0) ms.log_even = log_even_moments(sp, par.log_horizon);
  const vector_class_report rep = classify_vector(ms, par.tail_tol);

  task_output out;
  out.space = space_meta(sp);
  out.result["moments"] = ms.to_json();
  out.result["class"] = rep.to_json();
  csv t("n,term,partial_sum");
  for (std::size_t n = 0; n < rep.carleman.terms.size(); ++n)
    t.row({std::to_string(n + 1), num_str(rep.carleman.terms[n]),
           num_str(rep.carleman.partial_sums[n])});
  out.tables.emplace_back("carleman", t.str());
  return out;
}

// <h, lambda^n G> in both inner products via per-node running products
// (factored powers overflow long before the weighted sums do), with the
// relative magnitudes |<h, lambda^n>| / (||h|| * ||lambda^n||).
nlohmann::json monomial_ip_table(const discretized_space& sp, const Vec& h, int degree) {
  const moment_sequence ms = compute_moments(sp, 2 * degree + 2);
  Vec amb = sp.weight.array() * h.array();
  Vec gra = sp.gweight.array() * h.array();
  const double hn = sp.norm(h), hg = sp.norm_graph(h);
  nlohmann::json rows = nlohmann::json::array();
  for (int n = 0; n <= degree; ++n) {
    if (n > 0) {
      amb.array() *= sp.lambda.array();
      gra.array() *= sp.lambda.array();
    }
    const double a = csum(amb), g = csum(gra);
    const double na = std::sqrt(ms.s[2 * n]);
    const double ng = std::sqrt(ms.s[2 * n] + ms.s[2 * n + 2]);
    nlohmann::json r;
    r["n"] = n;
    r["ambient"] = a;
    r["graph"] = g;
    r["ambient_rel"] = std::abs(a) / (hn * na);
    r["graph_rel"] = std::abs(g) / (hg * ng);
    rows.push_back(std::move(r));
  }
  return rows;
}

task_output run_solve_task(const scenario& sc) {
  const auto par = parse_solve(sc.params);
  const discretized_space sp = discretize(sc.measure);
  const Vec g = par.g ? sp.eval(par.g) : sp.ones();
  const gap_report gap = spectral_gap_at_zero(sc.measure);
  const solvability_report rep = solve_krylov(sp, g, par.m_max, par.tol, gap);

  task_output out;
  out.space = space_meta(sp);
  out.result["solve"] = rep.to_json();
  csv t("degree,residual,graph_increment");
  for (std::size_t i = 0; i < rep.residuals.size(); ++i)
    t.row({std::to_string(rep.degrees[i]), num_str(rep.residuals[i]),
           num_str(rep.graph_increments[i])});
  out.tables.emplace_back("residuals", t.str());

  if (!par.core_panel.empty()) {
    std::vector<Vec> vecs;
    for (const auto& f : par.core_panel) vecs.push_back(sp.eval(f));
    const core_gap_report cg = core_condition_gap(sp, g, par.core_degree, vecs);
    out.result["core_gap"] = cg.to_json();
    nlohmann::json tabs = nlohmann::json::array();
    for (const Vec& h : vecs) tabs.push_back(monomial_ip_table(sp, h, par.core_degree));
    out.result["panel_monomials"] = std::move(tabs);

    std::string header = "degree";
    for (std::size_t v = 0; v < vecs.size(); ++v) header += ",t" + std::to_string(v);
    csv tc(header);
    for (int k = 0; k <= cg.m; ++k) {
      std::vector<std::string> cells{std::to_string(k)};
      for (const auto& res : cg.residuals) cells.push_back(num_str(res[k]));
      tc.row(cells);
    }
    out.tables.emplace_back("core_gap", tc.str());
  }
  return out;
}

task_output run_kint_task(const scenario& sc) {
  const auto par = parse_kint(sc.params);
  const discretized_space sp = discretize(sc.measure);
  const separation_report rep =
      kint_indicator(sp, sp.ones(), par.m, par.M_big, par.threshold, par.samples, *sc.seed);

  task_output out;
  out.space = space_meta(sp);
  out.result["kint"] = rep.to_json();
  csv t("sample,distance");
  for (std::size_t i = 0; i < rep.sampled_range.size(); ++i)
    t.row({std::to_string(i), num_str(rep.sampled_range[i])});
  out.tables.emplace_back("separation", t.str());
  return out;
}

task_output run_weakgap_task(const scenario& sc) {
  const auto par = parse_weakgap(sc.params);
  const discretized_space sp = discretize(sc.measure);
  const std::uint64_t seed = *sc.seed;
  const Mat probes = weak_probes(sp, par.probes);
  const subspace_frame C = krylov_frame(sp, sp.ones(), par.k1, ip_kind::ambient);
  const subspace_frame D = krylov_frame(sp, sp.ones(), par.k2, ip_kind::ambient);

  task_output out;
  out.space = space_meta(sp);
  out.result["frames"] = {{"degrees", {par.k1, par.k2}}, {"dims", {C.dim(), D.dim()}}};
  out.result["self"] = dw_estimate(C, C, probes, par.samples, par.inner_tol, seed).to_json();
  out.result["nested"] =
      dw_estimate(C, D, probes, par.samples, par.inner_tol, seed + 1).to_json();

  nlohmann::json tris = nlohmann::json::array();
  csv t("triple,d_ab,d_bc,d_ac,holds");
  rng64 rng(seed + 1000);
  for (int i = 0; i < par.triples; ++i) {
    subspace_frame f[3];
    for (int q = 0; q < 3; ++q) {
      const int dim = 1 + static_cast<int>(rng.next() % 3);
      Mat cols(sp.dim(), dim);
      for (int c = 0; c < dim; ++c) cols.col(c) = rng.unit_vector(sp.dim());
      f[q] = frame_from_columns(sp, cols, ip_kind::ambient);
    }
    const std::uint64_t s = seed + 2000 + 10 * static_cast<std::uint64_t>(i);
    const double ab = dw_estimate(f[0], f[1], probes, par.samples, par.inner_tol, s).dhat;
    const double bc = dw_estimate(f[1], f[2], probes, par.samples, par.inner_tol, s + 2).dhat;
    const double ac = dw_estimate(f[0], f[2], probes, par.samples, par.inner_tol, s + 4).dhat;
    const bool holds = ac <= ab + bc + 3.0 * par.inner_tol;
    tris.push_back({{"d_ab", ab}, {"d_bc", bc}, {"d_ac", ac}, {"holds", holds}});
    t.row({std::to_string(i), num_str(ab), num_str(bc), num_str(ac), holds ? "true" : "false"});
  }
  out.result["triangles"] = std::move(tris);
  out.tables.emplace_back("triangles", t.str());
  return out;
}

task_output run_truncation_task(const scenario& sc) {
  const auto doc = parse_truncation(sc.params);
  truncation_params par = doc.par;
  par.seed = *sc.seed;
  const truncation_study study = run_truncation_study(sc.measure, par, doc.g, doc.panel);

  // the same master space the study used, for the norm tables
  const discretized_space sp = discretize(split_at_radii(sc.measure, par.radii));
  const Vec g = doc.g ? sp.eval(doc.g) : sp.ones();
  const auto norm_tables = monotone_norm_check(sp, g, par.radii, doc.polys);

  task_output out;
  out.space = space_meta(sp);
  out.result["study"] = study.to_json();
  nlohmann::json tabs = nlohmann::json::array();
  for (const auto& tab : norm_tables) tabs.push_back(tab.to_json());
  out.result["norm_tables"] = std::move(tabs);
  out.result["polys"] = doc.polys;

  std::string header =
      "radius,skipped,inside_nodes,degree_used,mass_captured,tail_mass,graph_norm_gap,"
      "nesting_residual,nesting_residual_hull,dhat,complement_dhat,complement_upper";
  for (std::size_t v = 0; v < doc.panel.size(); ++v) header += ",panel_" + std::to_string(v);
  csv t(header);
  for (const auto& s : study.steps) {
    std::vector<std::string> cells{num_str(s.radius), s.skipped ? "true" : "false"};
    if (s.skipped) {
      cells.resize(12 + doc.panel.size());
    } else {
      cells.push_back(std::to_string(s.inside_nodes));
      cells.push_back(std::to_string(s.degree_used));
      cells.push_back(num_str(s.mass_captured));
      cells.push_back(num_str(s.tail_mass));
      cells.push_back(num_str(s.graph_norm_gap));
      cells.push_back(num_str(s.nesting_residual));
      cells.push_back(num_str(s.nesting_residual_hull));
      cells.push_back(num_str(s.dhat_to_hull.dhat));
      cells.push_back(num_str(s.complement_dhat));
      cells.push_back(num_str(s.complement_upper));
      for (double e : s.panel_errors) cells.push_back(num_str(e));
    }
    t.row(cells);
  }
  out.tables.emplace_back("steps", t.str());
  return out;
}

task_output dispatch(const scenario& sc) {
  switch (sc.task) {
    case task_kind::moments: return run_moments_task(sc);
    case task_kind::determinacy: return run_determinacy_task(sc);
    case task_kind::classify: return run_classify_task(sc);
    case task_kind::solve: return run_solve_task(sc);
    case task_kind::kint: return run_kint_task(sc);
    case task_kind::weakgap: return run_weakgap_task(sc);
    case task_kind::truncation: return run_truncation_task(sc);
  }
  throw schema_error("unknown task");
}

std::string utc_now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string to_string(task_kind t) {
  switch (t) {
    case task_kind::moments: return "moments";
    case task_kind::determinacy: return "determinacy";
    case task_kind::classify: return "classify";
    case task_kind::solve: return "solve";
    case task_kind::kint: return "kint";
    case task_kind::weakgap: return "weakgap";
    case task_kind::truncation: return "truncation";
  }
  return "moments";
}

task_kind task_kind_from_string(const std::string& s) {
  if (s == "moments") return task_kind::moments;
  if (s == "determinacy") return task_kind::determinacy;
  if (s == "classify") return task_kind::classify;
  if (s == "solve") return task_kind::solve;
  if (s == "kint") return task_kind::kint;
  if (s == "weakgap") return task_kind::weakgap;
  if (s == "truncation") return task_kind::truncation;
  throw schema_error("unknown task: " + s);
}

scenario scenario::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw schema_error("scenario: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "name" && k != "measure" && k != "task" && k != "params" && k != "seed" &&
        k != "output")
      throw schema_error("scenario: unknown key '" + k + "'");
  }
  scenario sc;
  if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty())
    throw schema_error("scenario: missing non-empty string 'name'");
  sc.name = j["name"].get<std::string>();
  if (!j.contains("measure")) throw schema_error("scenario: missing 'measure'");
  sc.measure = spectral_measure::from_json(j["measure"]);
  if (!j.contains("task") || !j["task"].is_string())
    throw schema_error("scenario: missing string 'task'");
  sc.task = task_kind_from_string(j["task"].get<std::string>());
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw schema_error("scenario: 'params' must be an object");
    sc.params = j["params"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      throw schema_error("scenario: 'seed' must be a non-negative integer");
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  sc.output_prefix = sc.name;
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) throw schema_error("scenario: 'output' must be an object");
    for (auto it = o.begin(); it != o.end(); ++it)
      if (it.key() != "prefix") throw schema_error("scenario: unknown output key '" + it.key() + "'");
    if (o.contains("prefix")) {
      if (!o["prefix"].is_string()) throw schema_error("scenario: output.prefix must be a string");
      sc.output_prefix = o["prefix"].get<std::string>();
    }
  }
  if (sc.output_prefix.empty() || sc.output_prefix.front() == '.' ||
      sc.output_prefix.find('/') != std::string::npos ||
      sc.output_prefix.find('\\') != std::string::npos)
    throw schema_error("scenario: output.prefix must be a bare file stem");
  return sc;
}

nlohmann::json scenario::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["measure"] = measure.to_json();
  j["task"] = to_string(task);
  j["params"] = params;
  if (seed) j["seed"] = *seed;
  j["output"] = {{"prefix", output_prefix}};
  return j;
}

scenario validate_scenario(const nlohmann::json& j) {
  scenario sc = scenario::from_json(j);
  validate_params_for(sc.task, sc.params);
  if (needs_seed(sc.task) && !sc.seed)
    throw schema_error("scenario: task '" + to_string(sc.task) +
                       "' needs a seed (document field or --seed)");
  return sc;
}

run_result run_scenario(const scenario& sc) {
  validate_params_for(sc.task, sc.params);
  if (needs_seed(sc.task) && !sc.seed)
    throw schema_error("scenario: task '" + to_string(sc.task) +
                       "' needs a seed (document field or --seed)");
  task_output t = dispatch(sc);
  run_result r;
  r.report["name"] = sc.name;
  r.report["task"] = to_string(sc.task);
  r.report["document"] = sc.to_json();
  r.report["space"] = std::move(t.space);
  r.report["result"] = std::move(t.result);
  r.tables = std::move(t.tables);
  return r;
}

run_result run_scenario_to_files(const scenario& sc, const std::string& dir) {
  run_result r = run_scenario(sc);
  namespace fs = std::filesystem;
  const fs::path root = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw schema_error("output: cannot create directory " + root.string());

  auto emit = [&](const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    os << content;
    if (!os) {
      for (const auto& done : r.written) std::remove(done.c_str());
      throw schema_error("output: cannot write " + p.string());
    }
    r.written.push_back(p.string());
  };

  emit(root / (sc.output_prefix + ".json"), r.report.dump(2) + "\n");
  for (const auto& [suffix, content] : r.tables)
    emit(root / (sc.output_prefix + "." + suffix + ".csv"), content);

  nlohmann::json meta;
  meta["generated_at"] = utc_now_iso8601();
  meta["name"] = sc.name;
  meta["task"] = to_string(sc.task);
  if (sc.seed) meta["seed"] = *sc.seed;
  meta["files"] = r.written;
  emit(root / (sc.output_prefix + ".meta.json"), meta.dump(2) + "\n");
  return r;
}

// ------------------------------------------------------------------ presets

namespace {

nlohmann::json gaussian_measure(int nodes) {
  return {{"ac", {{{"kind", "gaussian"},
                   {"support", {"-inf", "inf"}},
                   {"params", {{"mean", 0.0}, {"sigma", 1.0}, {"mass", 1.0}}},
                   {"nodes", nodes}}}}};
}

nlohmann::json lognormal_measure(int nodes) {
  return {{"ac", {{{"kind", "lognormal"},
                   {"support", {0.0, "inf"}},
                   {"params", {{"mu", 0.0}, {"sigma", 1.0}, {"mass", 1.0}}},
                   {"nodes", nodes}}}}};
}

nlohmann::json uniform_measure(double a, double b, int nodes) {
  return {{"ac", {{{"kind", "uniform"},
                   {"support", {a, b}},
                   {"params", {{"mass", 1.0}}},
                   {"nodes", nodes}}}}};
}

nlohmann::json with_map(nlohmann::json measure, const std::string& kind, double center,
                        double scale) {
  measure["ac"][0]["map"] = {{"kind", kind}, {"center", center}, {"scale", scale}, {"sign", 1.0}};
  return measure;
}

nlohmann::json make_preset(const std::string& name, nlohmann::json measure, const char* task,
                           nlohmann::json params, std::optional<std::uint64_t> seed = {}) {
  nlohmann::json j;
  j["name"] = name;
  j["measure"] = std::move(measure);
  j["task"] = task;
  j["params"] = std::move(params);
  if (seed) j["seed"] = *seed;
  return j;
}

const double kTwoPiScale = 6.283185307179586;

nlohmann::json build_preset(const std::string& name) {
  if (name == "gaussian_moments")
    return make_preset(name, gaussian_measure(200), "moments",
                       {{"max_order", 20}, {"hankel", true}});
  if (name == "lognormal_moments")
    return make_preset(name, lognormal_measure(200), "moments",
                       {{"max_order", 12}, {"hankel", false}});
  if (name == "atoms_hankel") {
    nlohmann::json atoms = nlohmann::json::array();
    const double x[] = {-2.35, -1.70, -1.15, -0.60, -0.20, 0.15,
                        0.45,  0.90,  1.30,  1.75,  2.20,  2.60};
    const double w[] = {0.32, 0.54, 0.17, 0.81, 0.29, 0.66,
                        0.23, 0.48, 0.75, 0.17, 0.38, 0.12};
    for (int i = 0; i < 12; ++i) atoms.push_back({{"x", x[i]}, {"w", w[i]}});
    return make_preset(name, {{"atoms", atoms}}, "moments", {{"max_order", 16}, {"hankel", true}});
  }
  if (name == "gaussian_carleman")
    return make_preset(name, with_map(gaussian_measure(800), "logistic", 0.0, 6.0), "classify",
                       {{"max_order", 20}, {"log_horizon", 10000}});
  if (name == "lognormal_carleman")
    return make_preset(name, with_map(lognormal_measure(800), "loglogistic", 0.0, 6.0),
                       "classify", {{"max_order", 16}, {"log_horizon", 16}});
  if (name == "gaussian_determinacy")
    return make_preset(name, gaussian_measure(400), "determinacy", {{"K", 40}});
  if (name == "lognormal_determinacy")
    return make_preset(name, lognormal_measure(400), "determinacy", {{"K", 12}});
  if (name == "legendre_recurrence")
    return make_preset(name, uniform_measure(-1.0, 1.0, 64), "determinacy", {{"K", 20}});
  if (name == "hermite_recurrence")
    return make_preset(name, gaussian_measure(400), "determinacy", {{"K", 20}});
  if (name == "uniform12_solve")
    return make_preset(name, uniform_measure(1.0, 2.0, 64), "solve",
                       {{"m_max", 20}, {"tol", 1e-10}});
  if (name == "uniform12_kint")
    return make_preset(name, uniform_measure(1.0, 2.0, 64), "kint",
                       {{"m", 5}, {"M_big", 30}, {"samples", 16}}, 1);
  if (name == "gaussian_kint")
    return make_preset(name, gaussian_measure(200), "kint",
                       {{"m", 5}, {"M_big", 40}, {"samples", 16}}, 1);
  if (name == "lognormal_witness")
    return make_preset(name, lognormal_measure(800), "solve",
                       {{"m_max", 8},
                        {"tol", 1e-10},
                        {"core_panel", {{{"kind", "sin_log"}, {"scale", kTwoPiScale}}}},
                        {"core_degree", 12}});
  if (name == "uniform12_core")
    return make_preset(name, uniform_measure(1.0, 2.0, 64), "solve",
                       {{"m_max", 16},
                        {"tol", 1e-10},
                        {"core_panel", {{{"kind", "sin_log"}, {"scale", kTwoPiScale}}}},
                        {"core_degree", 16}});
  if (name == "weakgap_props")
    return make_preset(name, uniform_measure(-1.0, 1.0, 8), "weakgap",
                       {{"degrees", {2, 5}},
                        {"samples", 12},
                        {"probes", 8},
                        {"inner_tol", 1e-6},
                        {"triples", 3}},
                       1);
  if (name == "twoatom_truncation") {
    nlohmann::json atoms = {{{"x", -1.0}, {"w", 0.5}}, {{"x", 1.0}, {"w", 0.5}}};
    return make_preset(name, {{"atoms", atoms}}, "truncation",
                       {{"radii", {0.5, 2.0}},
                        {"degree", 4},
                        {"samples", 8},
                        {"probes", 8},
                        {"inner_tol", 1e-6}},
                       1);
  }
  if (name == "gaussian_truncation")
    return make_preset(name, gaussian_measure(128), "truncation",
                       {{"radii", {1.0, 2.0, 3.0, 4.0}},
                        {"degree", 24},
                        {"samples", 12},
                        {"probes", 64},
                        {"inner_tol", 1e-6}},
                       1);
  if (name == "uniform11_truncation")
    return make_preset(name, uniform_measure(-1.0, 1.0, 48), "truncation",
                       {{"radii", {0.25, 0.5, 1.0}},
                        {"degree", 4},
                        {"samples", 8},
                        {"probes", 16},
                        {"inner_tol", 1e-6}},
                       1);
  throw schema_error("unknown preset: " + name);
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& preset_catalog() {
  static const std::vector<std::pair<std::string, std::string>> catalog = {
      {"gaussian_moments", "Gaussian moments s_0..s_20 at 200 nodes with the Hankel check"},
      {"lognormal_moments", "log-normal moments s_0..s_12 at 200 nodes"},
      {"atoms_hankel", "12-atom measure: exact moments and the Hankel positivity report"},
      {"gaussian_carleman", "Gaussian divergence sum to horizon 10^4 (log-domain moments)"},
      {"lognormal_carleman", "log-normal divergence sum: convergent tail toward 1/(e-1)"},
      {"gaussian_determinacy", "series test at z0=i, K=40: divergent trend (determinate)"},
      {"lognormal_determinacy", "series test at z0=i, K=12: convergent tail (indeterminate)"},
      {"legendre_recurrence", "uniform[-1,1] recurrence: beta_k = k/sqrt(4k^2-1)"},
      {"hermite_recurrence", "Gaussian recurrence: beta_k = sqrt(k)"},
      {"uniform12_solve", "A f = 1 on uniform[1,2]: geometric residual decay"},
      {"uniform12_kint", "intersection indicator on uniform[1,2]: separation ~ sqrt(2)"},
      {"gaussian_kint", "intersection indicator on the Gaussian: truncation-limited separation"},
      {"lognormal_witness", "log-normal witness sin(2 pi ln lambda): orthogonality + flat core gap"},
      {"uniform12_core", "same witness on uniform[1,2]: the core gap decays"},
      {"weakgap_props", "weak-gap estimator battery on an 8-node space"},
      {"twoatom_truncation", "two atoms: empty first window, exact second window"},
      {"gaussian_truncation", "Gaussian window study at radii 1..4: tail masses and weak gaps"},
      {"uniform11_truncation", "uniform[-1,1] window study at radii .25/.5/1"},
  };
  return catalog;
}

nlohmann::json preset_document(const std::string& name) { return build_preset(name); }

}  // namespace skl
