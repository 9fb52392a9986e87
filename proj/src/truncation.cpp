#include "skl/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace skl {

namespace {

std::vector<int> nodes_inside(const discretized_space& sp, double radius) {
  std::vector<int> idx;
  for (int i = 0; i < sp.dim(); ++i)
    if (std::abs(sp.lambda[i]) <= radius) idx.push_back(i);
  return idx;
}

subspace_frame indicator_frame(const discretized_space& sp, const std::vector<int>& idx,
                               ip_kind ip) {
  subspace_frame f;
  f.space = &sp;
  f.ip = ip;
  f.basis = Mat::Zero(sp.dim(), static_cast<int>(idx.size()));
  const Vec& wv = ip == ip_kind::ambient ? sp.weight : sp.gweight;
  for (std::size_t j = 0; j < idx.size(); ++j)
    f.basis(idx[j], static_cast<int>(j)) = 1.0 / std::sqrt(wv[idx[j]]);
  return f;
}

void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw schema_error("truncation: empty radius grid");
  for (std::size_t t = 0; t < radii.size(); ++t) {
    if (!(radii[t] > 0.0) || !std::isfinite(radii[t]))
      throw schema_error("truncation: radii must be positive and finite");
    if (t > 0 && !(radii[t] > radii[t - 1]))
      throw schema_error("truncation: radii must be strictly increasing");
  }
}

// Masked probe-coefficient matrix: row p, column j = <v_p, e_i/sqrt(w_i)>_H
// = sqrt(w_i) v_p(lambda_i) for node i = idx[j]. Closed form, no summation.
Mat masked_probe_coeffs(const discretized_space& sp, const Mat& probes,
                        const std::vector<int>& idx) {
  Mat G(probes.cols(), static_cast<int>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const int i = idx[j];
    const double s = std::sqrt(sp.weight[i]);
    for (int p = 0; p < probes.cols(); ++p) G(p, static_cast<int>(j)) = s * probes(i, p);
  }
  return G;
}

double weighted_l1(const std::vector<double>& w, const Vec& y) {
  neumaier acc;
  for (int p = 0; p < y.size(); ++p) acc.add(w[p] * std::abs(y[p]));
  return acc.value();
}

// Sampled sup of sum_p w_p |(G c)_p| over ||c||_2 <= 1, polished by
// alternating maximization (c <- normalized G^T (w .* sign(G c))), which can
// only increase the objective along the fixed candidate prefix.
double sampled_sup_l1(const std::vector<double>& w, const Mat& G, int samples, rng64& rng) {
  const int dim = static_cast<int>(G.cols());
  double best = 0.0;
  for (const Vec& c0 : candidate_directions(dim, samples, rng)) {
    Vec c = c0;
    for (int it = 0; it < 20; ++it) {
      const Vec y = G * c;
      Vec s(y.size());
      for (int p = 0; p < y.size(); ++p) s[p] = y[p] >= 0.0 ? w[p] : -w[p];
      Vec next = G.transpose() * s;
      const double nn = next.norm();
      if (nn <= 1e-300) break;
      next /= nn;
      const bool settled = (next - c).norm() < 1e-14;
      c = next;
      if (settled) break;
    }
    best = std::max(best, weighted_l1(w, G * c));
  }
  return best;
}

}  // namespace

subspace_frame lspace_frame(const discretized_space& sp, ip_kind ip) {
  std::vector<int> idx(sp.dim());
  for (int i = 0; i < sp.dim(); ++i) idx[i] = i;
  return indicator_frame(sp, idx, ip);
}

subspace_frame window_frame(const discretized_space& sp, double radius, ip_kind ip) {
  if (!(radius > 0.0)) throw schema_error("window frame: radius must be positive");
  const auto idx = nodes_inside(sp, radius);
  if (idx.empty())
    throw degeneration_error("window frame: no node inside |lambda| <= " + std::to_string(radius));
  return indicator_frame(sp, idx, ip);
}

spectral_measure split_at_radii(const spectral_measure& mu, const std::vector<double>& radii) {
  check_radii(radii);
  std::vector<double> cuts;
  for (double r : radii) {
    cuts.push_back(-r);
    cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<ac_part> parts;
  for (const auto& p : mu.parts) {
    std::vector<double> pts{p.a};
    for (double c : cuts)
      if (c > p.a && c < p.b) pts.push_back(c);
    pts.push_back(p.b);
    if (pts.size() == 2) {  // untouched: keep verbatim, map included
      parts.push_back(p);
      continue;
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      ac_part q = p;
      q.a = pts[i];
      q.b = pts[i + 1];
      if (p.kind == density_kind::uniform) q.mass = p.mass * (q.b - q.a) / (p.b - p.a);
      q.map.reset();  // re-resolve per piece
      if (!(part_mass(q) > 0.0)) continue;  // numerically empty slice
      parts.push_back(std::move(q));
    }
  }
  return spectral_measure::build(mu.atoms, std::move(parts));
}

truncation_study run_truncation_study(const spectral_measure& mu, const truncation_params& par,
                                      const std::function<double(double)>& g_spec,
                                      const std::vector<std::function<double(double)>>& panel,
                                      const discretize_options& opt) {
  check_radii(par.radii);
  if (par.degree < 0) throw schema_error("truncation: degree must be >= 0");
  if (par.samples < 1) throw schema_error("truncation: samples must be >= 1");
  if (par.probes < 1) throw schema_error("truncation: probes must be >= 1");
  if (!(par.inner_tol > 0.0)) throw schema_error("truncation: inner_tol must be positive");

  const spectral_measure master = split_at_radii(mu, par.radii);
  const discretized_space sp = discretize(master, opt);

  truncation_study st;
  st.dim = sp.dim();
  st.degree = par.degree;

  const Vec g = g_spec ? sp.eval(g_spec) : sp.ones();
  st.total_mass = sp.ip(g, g);
  if (!(st.total_mass > 0.0)) throw degeneration_error("truncation: cyclic data vanishes");

  const Mat probes = weak_probes(sp, par.probes);
  const auto ww = weak_weights(static_cast<int>(probes.cols()));
  const subspace_frame hull = lspace_frame(sp);

  std::vector<Vec> panel_values;
  panel_values.reserve(panel.size());
  for (const auto& f : panel) {
    if (!f) throw schema_error("truncation: empty panel entry");
    panel_values.push_back(sp.eval(f));
  }

  int skipped = 0;
  for (std::size_t t = 0; t < par.radii.size(); ++t) {
    truncation_step s;
    s.radius = par.radii[t];
    const auto idx = nodes_inside(sp, s.radius);
    s.inside_nodes = static_cast<int>(idx.size());
    if (idx.empty()) {
      s.skipped = true;
      s.note = "empty window: no node inside; step skipped";
      ++skipped;
      st.steps.push_back(std::move(s));
      continue;
    }

    const Vec gn = truncation_projection(sp, g, s.radius);
    s.mass_captured = sp.ip(gn, gn);
    s.tail_mass = sp.ip(g - gn, g - gn);
    s.graph_norm_gap = sp.norm_graph(g - gn);

    s.degree_used = std::min(par.degree, s.inside_nodes - 1);
    const subspace_frame kry = krylov_frame(sp, gn, s.degree_used, ip_kind::ambient);
    const subspace_frame next = t + 1 < par.radii.size()
                                    ? window_frame(sp, par.radii[t + 1])
                                    : hull;
    for (int k = 0; k < kry.dim(); ++k) {
      const Vec col = kry.basis.col(k);
      s.nesting_residual = std::max(s.nesting_residual, next.projection_residual(col));
      s.nesting_residual_hull = std::max(s.nesting_residual_hull, hull.projection_residual(col));
    }

    const subspace_frame closure = indicator_frame(sp, idx, ip_kind::ambient);
    // the hull side of the estimate sees one fixed candidate stream, so the
    // sup faces the same directions at every window
    s.dhat_to_hull = dw_estimate(closure, hull, probes, par.samples, par.inner_tol, par.seed);

    std::vector<int> outside;
    for (int i = 0, j = 0; i < sp.dim(); ++i) {
      if (j < s.inside_nodes && idx[j] == i)
        ++j;
      else
        outside.push_back(i);
    }
    s.complement_dim = static_cast<int>(outside.size());
    if (!outside.empty()) {
      const Mat Gout = masked_probe_coeffs(sp, probes, outside);
      neumaier ub;
      for (int p = 0; p < Gout.rows(); ++p) ub.add(ww[p] * Gout.row(p).norm());
      s.complement_upper = ub.value();
      rng64 rng(par.seed + 2);  // decoupled from the dw streams
      s.complement_dhat = sampled_sup_l1(ww, Gout, par.samples, rng);
    }

    for (const Vec& v : panel_values)
      s.panel_errors.push_back(sp.norm(v - truncation_projection(sp, v, s.radius)));

    st.steps.push_back(std::move(s));
  }

  if (skipped > 0)
    st.note = std::to_string(skipped) + " window(s) empty and skipped";

  std::vector<const truncation_step*> live;
  for (const auto& s : st.steps)
    if (!s.skipped) live.push_back(&s);

  st.mass_nondecreasing = true;
  st.gap_nonincreasing = true;
  st.nesting_ok = !live.empty();
  st.dhat_nonincreasing = true;
  st.panel_nonincreasing = true;
  for (std::size_t t = 0; t < live.size(); ++t) {
    const auto& s = *live[t];
    if (s.nesting_residual > 1e-8 || s.nesting_residual_hull > 1e-10) st.nesting_ok = false;
    if (t == 0) continue;
    const auto& prev = *live[t - 1];
    if (s.mass_captured < prev.mass_captured - 1e-12 * std::abs(prev.mass_captured))
      st.mass_nondecreasing = false;
    if (s.graph_norm_gap > prev.graph_norm_gap + 1e-12 * std::abs(prev.graph_norm_gap))
      st.gap_nonincreasing = false;
    if (s.dhat_to_hull.dhat > prev.dhat_to_hull.dhat + par.inner_tol)
      st.dhat_nonincreasing = false;
    for (std::size_t j = 0; j < s.panel_errors.size(); ++j)
      if (s.panel_errors[j] > prev.panel_errors[j] + 1e-12 * (1.0 + prev.panel_errors[j]))
        st.panel_nonincreasing = false;
  }
  return st;
}

std::vector<norm_monotonicity> monotone_norm_check(const discretized_space& sp, const Vec& g,
                                                   const std::vector<double>& radii,
                                                   const std::vector<std::vector<double>>& polys) {
  check_radii(radii);
  std::vector<norm_monotonicity> out;
  for (const auto& coeffs : polys) {
    if (coeffs.empty()) throw schema_error("norm check: empty polynomial");
    Vec pg(sp.dim());
    for (int i = 0; i < sp.dim(); ++i) {
      double v = 0.0;  // Horner
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * sp.lambda[i] + *it;
      pg[i] = v * g[i];
    }
    norm_monotonicity tab;
    tab.h_full = sp.norm(pg);
    tab.graph_full = sp.norm_graph(pg);
    for (double r : radii) {
      const Vec pgn = truncation_projection(sp, pg, r);
      tab.h_norms.push_back(sp.norm(pgn));
      tab.graph_norms.push_back(sp.norm_graph(pgn));
    }
    tab.nondecreasing = true;
    tab.bounded_by_full = true;
    for (std::size_t t = 0; t < radii.size(); ++t) {
      if (t > 0 && (tab.h_norms[t] < tab.h_norms[t - 1] - 1e-12 * tab.h_norms[t - 1] ||
                    tab.graph_norms[t] < tab.graph_norms[t - 1] - 1e-12 * tab.graph_norms[t - 1]))
        tab.nondecreasing = false;
      if (tab.h_norms[t] > tab.h_full * (1.0 + 1e-12) ||
          tab.graph_norms[t] > tab.graph_full * (1.0 + 1e-12))
        tab.bounded_by_full = false;
    }
    out.push_back(std::move(tab));
  }
  return out;
}

nlohmann::json truncation_step::to_json() const {
  nlohmann::json j;
  j["radius"] = radius;
  j["skipped"] = skipped;
  if (!note.empty()) j["note"] = note;
  if (skipped) return j;
  j["inside_nodes"] = inside_nodes;
  j["degree_used"] = degree_used;
  j["mass_captured"] = mass_captured;
  j["tail_mass"] = tail_mass;
  j["graph_norm_gap"] = graph_norm_gap;
  j["nesting_residual"] = nesting_residual;
  j["nesting_residual_hull"] = nesting_residual_hull;
  j["dhat_to_hull"] = dhat_to_hull.to_json();
  j["complement_dhat"] = complement_dhat;
  j["complement_upper"] = complement_upper;
  j["complement_dim"] = complement_dim;
  j["panel_errors"] = panel_errors;
  return j;
}

nlohmann::json truncation_study::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["total_mass"] = total_mass;
  j["degree"] = degree;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : steps) j["steps"].push_back(s.to_json());
  j["verdicts"] = {{"mass_nondecreasing", mass_nondecreasing},
                   {"gap_nonincreasing", gap_nonincreasing},
                   {"nesting_ok", nesting_ok},
                   {"dhat_nonincreasing", dhat_nonincreasing},
                   {"panel_nonincreasing", panel_nonincreasing}};
  if (!note.empty()) j["note"] = note;
  return j;
}

nlohmann::json norm_monotonicity::to_json() const {
  nlohmann::json j;
  j["h_norms"] = h_norms;
  j["graph_norms"] = graph_norms;
  j["h_full"] = h_full;
  j["graph_full"] = graph_full;
  j["nondecreasing"] = nondecreasing;
  j["bounded_by_full"] = bounded_by_full;
  return j;
}

}  // namespace skl
