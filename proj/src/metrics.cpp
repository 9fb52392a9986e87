#include "skl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "skl/orthopoly.hpp"

namespace skl {

namespace {

double separation_of(double proj_norm) {
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - std::min(proj_norm, 1.0))));
}

void check_ambient_pair(const subspace_frame& M, const subspace_frame& N) {
  if (M.space == nullptr || N.space == nullptr || M.space != N.space)
    throw schema_error("separation: frames must share one discretized space");
  if (M.ip != ip_kind::ambient || N.ip != ip_kind::ambient)
    throw schema_error("separation: frames must be ambient-orthonormal");
  if (M.dim() < 1 || N.dim() < 1) throw schema_error("separation: zero frame");
}

// Fast orthonormality audit (plain BLAS products; the check is not a
// measurement, 1e-8 slack absorbs the lost compensation).
void check_probes(const discretized_space& sp, const Mat& probes) {
  if (probes.rows() != sp.dim() || probes.cols() < 1)
    throw schema_error("weak norm: probe frame does not match the space");
  const Mat G = probes.transpose() * sp.weight.asDiagonal() * probes;
  const double defect = (G - Mat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-8)
    throw schema_error("weak norm: probe frame is not ambient-orthonormal (defect " +
                       std::to_string(defect) + ")");
}


// phi(d) = sum_n w_n |a_n - (G d)_n|
double l1_objective(const std::vector<double>& w, const Vec& a, const Mat& G, const Vec& d) {
  const Vec r = a - G * d;
  neumaier acc;
  for (int n = 0; n < r.size(); ++n) acc.add(w[n] * std::abs(r[n]));
  return acc.value();
}

// Exact minimization of phi(t*dir) over t in [t_lo, t_hi]: the objective is
// piecewise linear in t, so the minimum sits at a breakpoint or an endpoint.
double exact_line_min(const std::vector<double>& w, const Vec& a, const Mat& G,
                      const Vec& dir, double t_lo, double t_hi, double& t_best) {
  const Vec gd = G * dir;
  std::vector<double> ts = {t_lo, t_hi};
  for (int n = 0; n < a.size(); ++n) {
    if (gd[n] != 0.0) {
      const double t = a[n] / gd[n];
      if (t > t_lo && t < t_hi) ts.push_back(t);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    neumaier acc;
    for (int n = 0; n < a.size(); ++n) acc.add(w[n] * std::abs(a[n] - t * gd[n]));
    const double f = acc.value();
    if (f < best) {
      best = f;
      t_best = t;
    }
  }
  return best;
}

Vec clip_to_ball(Vec d) {
  const double n = d.norm();
  if (n > 1.0) d /= n;
  return d;
}

// min over ||d||_2 <= 1 of phi(d); init from the ambient projection.
double inner_min(const std::vector<double>& w, const Vec& a, const Mat& G, const Vec& init,
                 double tol) {
  const int dim = static_cast<int>(G.cols());
  double tb;
  if (dim == 1) return exact_line_min(w, a, G, Vec::Ones(1), -1.0, 1.0, tb);

  if (dim == 2) {
    // polar sweep with exact radial minimization, then a golden polish
    const int grid = 512;
    double best = std::numeric_limits<double>::infinity(), best_th = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double th = 2.0 * M_PI * i / grid;
      Vec dir(2);
      dir << std::cos(th), std::sin(th);
      const double f = exact_line_min(w, a, G, dir, 0.0, 1.0, tb);
      if (f < best) {
        best = f;
        best_th = th;
      }
    }
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best_th - 2.0 * M_PI / grid, hi = best_th + 2.0 * M_PI / grid;
    auto radial = [&](double th) {
      Vec dir(2);
      dir << std::cos(th), std::sin(th);
      return exact_line_min(w, a, G, dir, 0.0, 1.0, tb);
    };
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = radial(x1), f2 = radial(x2);
    for (int it = 0; it < 48; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = radial(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = radial(x2);
      }
    }
    return std::min(best, std::min(f1, f2));
  }

  // projected subgradient, Polyak step toward 0, best-iterate tracking
  Vec d = clip_to_ball(init);
  double best = l1_objective(w, a, G, d);
  for (int it = 0; it < 800 && best > 0.25 * tol; ++it) {
    const Vec r = a - G * d;
    Vec s(r.size());
    for (int n = 0; n < r.size(); ++n)
      s[n] = r[n] > 0.0 ? w[n] : (r[n] < 0.0 ? -w[n] : 0.0);
    const Vec sub = -G.transpose() * s;
    const double sn2 = sub.squaredNorm();
    if (sn2 <= 1e-300) break;
    const double f = l1_objective(w, a, G, d);
    d = clip_to_ball(d - (f / sn2) * sub);
    best = std::min(best, l1_objective(w, a, G, d));
  }
  return best;
}

// Coefficients of the columns against the probe frame, compensated.
Mat probe_coefficients(const discretized_space& sp, const Mat& probes, const Mat& cols) {
  Mat A(probes.cols(), cols.cols());
  for (int n = 0; n < probes.cols(); ++n)
    for (int c = 0; c < cols.cols(); ++c) A(n, c) = sp.ip(probes.col(n), cols.col(c));
  return A;
}

double directed_dw(const std::vector<double>& w, const subspace_frame& from,
                   const subspace_frame& to, const Mat& A_from, const Mat& A_to,
                   int samples, double inner_tol, rng64& rng) {
  const auto cands = candidate_directions(from.dim(), samples, rng);
  double sup = 0.0;
  for (const Vec& c : cands) {
    const Vec a = A_from * c;                       // probe coefficients of u
    const Vec u = from.basis * c;                   // value vector
    const Vec init = to.project_coeffs(u);          // ambient projection onto target
    sup = std::max(sup, inner_min(w, a, A_to, init, inner_tol));
  }
  return sup;
}

}  // namespace

std::vector<double> weak_weights(int count) {
  std::vector<double> w(count);
  double v = 0.5;
  for (int n = 0; n < count; ++n, v *= 0.5) w[n] = v;
  return w;
}

std::vector<Vec> candidate_directions(int dim, int samples, rng64& rng) {
  std::vector<Vec> out;
  for (int i = 0; i < dim && static_cast<int>(out.size()) < samples; ++i) {
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    out.push_back(e);
  }
  if (static_cast<int>(out.size()) < samples) {
    Vec v = Vec::Ones(dim) / std::sqrt(static_cast<double>(dim));
    out.push_back(v);
  }
  if (static_cast<int>(out.size()) < samples) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = (i % 2 == 0 ? 1.0 : -1.0);
    out.push_back(v / v.norm());
  }
  while (static_cast<int>(out.size()) < samples) out.push_back(rng.unit_vector(dim));
  return out;
}

separation_report separation_range(const subspace_frame& M, const subspace_frame& N,
                                   int samples, std::uint64_t seed) {
  check_ambient_pair(M, N);
  const discretized_space& sp = *M.space;

  separation_report rep;
  rep.dim_M = M.dim();
  rep.dim_N = N.dim();
  rep.D = sp.dim();
  rep.samples = samples;
  rep.seed = seed;
  rep.threshold = kSqrt2 - 1e-3;

  Mat C(M.dim(), N.dim());
  for (int i = 0; i < M.dim(); ++i)
    for (int j = 0; j < N.dim(); ++j) C(i, j) = sp.ip(M.basis.col(i), N.basis.col(j));

  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  rep.sigma_max = svd.singularValues()(0);
  rep.min_separation = separation_of(rep.sigma_max);

  rng64 rng(seed);
  rep.sampled_range.push_back(separation_of((C * svd.matrixV().col(0)).norm()));
  for (int s = 0; s < samples; ++s)
    rep.sampled_range.push_back(separation_of((C * rng.unit_vector(N.dim())).norm()));

  rep.trivial_intersection_indicated = rep.min_separation >= rep.threshold;
  return rep;
}

separation_report kint_indicator(const discretized_space& sp, const Vec& g, int m,
                                 int M_big, double threshold, int samples,
                                 std::uint64_t seed) {
  if (m >= M_big) throw schema_error("kint_indicator: need m < M_big");
  if (M_big + 1 > sp.dim()) throw schema_error("kint_indicator: M_big + 1 exceeds node count");

  const subspace_frame M = krylov_frame(sp, g, m, ip_kind::ambient);
  const subspace_frame Kbig = krylov_frame(sp, g, M_big, ip_kind::graph);
  const subspace_frame comp = complement_frame(Kbig);
  if (comp.dim() == 0) {
    separation_report rep;
    rep.dim_M = M.dim();
    rep.dim_N = 0;
    rep.D = sp.dim();
    rep.samples = samples;
    rep.seed = seed;
    rep.threshold = threshold;
    rep.degenerate = true;
    rep.note = "graph Krylov span saturates the space: empty complement";
    return rep;
  }

  const subspace_frame N = frame_from_columns(sp, apply_A(sp, comp.basis), ip_kind::ambient);
  separation_report rep = separation_range(M, N, samples, seed);
  rep.threshold = threshold;
  rep.trivial_intersection_indicated = rep.min_separation >= threshold;
  if (Kbig.degenerated) rep.note = Kbig.note;
  return rep;
}

Mat weak_probes(const discretized_space& sp, int count) {
  const int K = std::min(count, sp.dim());
  return stieltjes_recurrence(sp, K).values;
}

double weak_norm(const discretized_space& sp, const Mat& probes, const Vec& x) {
  check_probes(sp, probes);
  const auto w = weak_weights(static_cast<int>(probes.cols()));
  neumaier acc;
  for (int n = 0; n < probes.cols(); ++n) acc.add(w[n] * std::abs(sp.ip(probes.col(n), x)));
  return acc.value();
}

double dw_point_to_ball(const discretized_space& sp, const Mat& probes,
                        const subspace_frame& frame, const Vec& u, double inner_tol) {
  const auto w = weak_weights(static_cast<int>(probes.cols()));
  Vec a(probes.cols());
  for (int n = 0; n < probes.cols(); ++n) a[n] = sp.ip(probes.col(n), u);
  const Mat G = probe_coefficients(sp, probes, frame.basis);
  return inner_min(w, a, G, frame.project_coeffs(u), inner_tol);
}

weak_gap_estimate dw_estimate(const subspace_frame& C, const subspace_frame& Dfr,
                              const Mat& probes, int samples, double inner_tol,
                              std::uint64_t seed) {
  check_ambient_pair(C, Dfr);
  const discretized_space& sp = *C.space;
  check_probes(sp, probes);
  if (samples < 1) throw schema_error("dw_estimate: need at least one sample");

  const auto w = weak_weights(static_cast<int>(probes.cols()));
  const Mat A_C = probe_coefficients(sp, probes, C.basis);
  const Mat A_D = probe_coefficients(sp, probes, Dfr.basis);

  weak_gap_estimate est;
  est.samples = samples;
  est.inner_tol = inner_tol;
  est.seed = seed;
  rng64 rng_cd(seed), rng_dc(seed + 1);
  est.dw_CD = directed_dw(w, C, Dfr, A_C, A_D, samples, inner_tol, rng_cd);
  est.dw_DC = directed_dw(w, Dfr, C, A_D, A_C, samples, inner_tol, rng_dc);
  est.dhat = std::max(est.dw_CD, est.dw_DC);
  return est;
}

nlohmann::json separation_report::to_json() const {
  nlohmann::json j;
  j["sigma_max"] = sigma_max;
  j["min_separation"] = min_separation;
  j["sampled_range"] = sampled_range;
  j["trivial_intersection_indicated"] = trivial_intersection_indicated;
  j["threshold"] = threshold;
  j["dim_M"] = dim_M;
  j["dim_N"] = dim_N;
  j["D"] = D;
  j["degenerate"] = degenerate;
  if (!note.empty()) j["note"] = note;
  j["seed"] = seed;
  j["samples"] = samples;
  return j;
}

nlohmann::json weak_gap_estimate::to_json() const {
  nlohmann::json j;
  j["dw_CD"] = dw_CD;
  j["dw_DC"] = dw_DC;
  j["dhat"] = dhat;
  j["samples"] = samples;
  j["inner_tol"] = inner_tol;
  j["seed"] = seed;
  return j;
}

}  // namespace skl
