#include "skl/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace skl {

std::string to_string(ip_kind ip) { return ip == ip_kind::ambient ? "ambient" : "graph"; }

Vec subspace_frame::project_coeffs(const Vec& x) const {
  Vec c(dim());
  for (int j = 0; j < dim(); ++j) c[j] = ipv(basis.col(j), x);
  return c;
}

double subspace_frame::projection_residual(const Vec& x) const {
  const Vec c = project_coeffs(x);
  const Vec r = x - basis * c;
  return ip == ip_kind::ambient ? space->norm(r) : space->norm_graph(r);
}

double subspace_frame::gram_defect() const {
  double d = 0.0;
  for (int i = 0; i < dim(); ++i)
    for (int j = i; j < dim(); ++j)
      d = std::max(d, std::abs(ipv(basis.col(i), basis.col(j)) - (i == j ? 1.0 : 0.0)));
  return d;
}

namespace {

const Vec& ip_weights(const discretized_space& sp, ip_kind ip) {
  return ip == ip_kind::ambient ? sp.weight : sp.gweight;
}

}  // namespace

subspace_frame frame_from_columns(const discretized_space& sp, const Mat& cols, ip_kind ip) {
  if (cols.cols() < 1) throw schema_error("frame_from_columns: no columns");
  subspace_frame f;
  f.space = &sp;
  f.ip = ip;
  f.basis.resize(sp.dim(), cols.cols());
  int kept = 0, dropped = 0;
  for (int c = 0; c < cols.cols(); ++c) {
    Vec v = cols.col(c);
    const double n0 = ip == ip_kind::ambient ? sp.norm(v) : sp.norm_graph(v);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < kept; ++j) v -= f.ipv(f.basis.col(j), v) * f.basis.col(j);
    const double n1 = ip == ip_kind::ambient ? sp.norm(v) : sp.norm_graph(v);
    if (n1 <= 1e-12 * std::max(n0, 1e-300)) {
      ++dropped;
      continue;
    }
    f.basis.col(kept++) = v / n1;
  }
  if (kept == 0) throw degeneration_error("frame_from_columns: all columns dependent or zero");
  f.basis.conservativeResize(Eigen::NoChange, kept);
  if (dropped > 0) {
    f.degenerated = true;
    f.note = std::to_string(dropped) + " dependent columns dropped";
  }
  return f;
}

subspace_frame krylov_frame(const discretized_space& sp, const Vec& g, int m, ip_kind ip) {
  if (m < 0) throw schema_error("krylov_frame: negative degree");
  if (m + 1 > sp.dim()) throw schema_error("krylov_frame: degree + 1 exceeds the node count");
  const double g_norm = ip == ip_kind::ambient ? sp.norm(g) : sp.norm_graph(g);
  if (g_norm <= 0.0) throw schema_error("krylov_frame: zero cyclic vector");

  subspace_frame f;
  f.space = &sp;
  f.ip = ip;
  f.basis.resize(sp.dim(), m + 1);
  f.basis.col(0) = g / g_norm;
  f.degree_meta.push_back(0);

  // Multiply the latest basis vector by lambda and reorthogonalize: the span
  // grows one polynomial degree per step without monomial-scale cancellation.
  for (int k = 1; k <= m; ++k) {
    Vec v = sp.lambda.cwiseProduct(f.basis.col(k - 1));
    const double n0 = ip == ip_kind::ambient ? sp.norm(v) : sp.norm_graph(v);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) v -= f.ipv(f.basis.col(j), v) * f.basis.col(j);
    const double n1 = ip == ip_kind::ambient ? sp.norm(v) : sp.norm_graph(v);
    if (n1 <= 1e-13 * std::max(n0, 1e-300)) {
      f.degenerated = true;
      f.note = "Krylov span saturated at dimension " + std::to_string(k);
      f.basis.conservativeResize(Eigen::NoChange, k);
      break;
    }
    f.basis.col(k) = v / n1;
    f.degree_meta.push_back(k);
  }
  return f;
}

subspace_frame complement_frame(const subspace_frame& f) {
  const discretized_space& sp = *f.space;
  const int D = sp.dim(), k = f.dim();
  if (k >= D) {
    subspace_frame empty;
    empty.space = f.space;
    empty.ip = f.ip;
    empty.basis.resize(D, 0);
    empty.note = "full-dimensional frame: empty complement";
    return empty;
  }
  // In coordinates scaled by sqrt(ip weights) the inner product is euclidean;
  // the trailing Householder Q columns of the scaled frame span the complement.
  const Vec s = ip_weights(sp, f.ip).cwiseSqrt();
  Mat B = s.asDiagonal() * f.basis;
  Eigen::HouseholderQR<Mat> qr(B);
  Mat Q = Mat::Identity(D, D);
  Q.applyOnTheLeft(qr.householderQ());
  subspace_frame comp;
  comp.space = f.space;
  comp.ip = f.ip;
  comp.basis = s.cwiseInverse().asDiagonal() * Q.rightCols(D - k);
  return comp;
}

subspace_frame graph_complement_frame(const discretized_space& sp,
                                      const subspace_frame& k_frame) {
  if (k_frame.space != &sp)
    throw schema_error("graph_complement_frame: frame belongs to another space");
  if (k_frame.ip != ip_kind::graph)
    throw schema_error("graph_complement_frame: frame must be graph-orthonormal");
  return complement_frame(k_frame);
}

Vec apply_A(const discretized_space& sp, const Vec& x) {
  return sp.lambda.cwiseProduct(x);
}

Mat apply_A(const discretized_space& sp, const Mat& cols) {
  return sp.lambda.asDiagonal() * cols;
}

solvability_report solve_krylov(const discretized_space& sp, const Vec& g, int m_max,
                                double tol, std::optional<gap_report> gap) {
  for (int i = 0; i < sp.dim(); ++i)
    if (sp.lambda[i] == 0.0 && g[i] != 0.0)
      throw not_in_range_error("solve_krylov: the data has mass on the kernel node lambda = 0");

  solvability_report rep;
  rep.tol = tol;
  if (gap) {
    rep.gap = *gap;
  } else {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sp.dim(); ++i) d = std::min(d, std::abs(sp.lambda[i]));
    rep.gap.gap_lower_bound = d;
    rep.gap.zero_in_resolvent = d > 1e-12;
  }
  if (sp.lambda[0] < 0.0 && sp.lambda[sp.dim() - 1] > 0.0 && !rep.gap.zero_in_resolvent)
    rep.warning = "0 lies inside the spectral hull; solvability depends on the density near 0";

  const subspace_frame K = krylov_frame(sp, g, m_max, ip_kind::ambient);
  const int mdim = K.dim();

  // Weighted QR of the image frame A*K: nested prefixes of Q span the nested
  // image subspaces, so per-degree residuals are nonincreasing by structure.
  const Vec s = sp.weight.cwiseSqrt();
  Mat B = s.asDiagonal() * apply_A(sp, K.basis);
  Eigen::HouseholderQR<Mat> qr(B);
  Mat Q = Mat::Identity(sp.dim(), mdim);
  Q.applyOnTheLeft(qr.householderQ());  // thin Q, D x mdim
  const Mat R = qr.matrixQR().topRows(mdim).triangularView<Eigen::Upper>();

  const Vec gs = s.cwiseProduct(g);
  const Vec gamma = Q.transpose() * gs;

  // Residuals are evaluated directly as ||g - A f_m||_H: the Pythagorean
  // shortcut ||g||^2 - sum gamma^2 floors at sqrt(eps)*||g|| by cancellation.
  Vec prev_f = Vec::Zero(sp.dim());
  for (int m = 0; m < mdim; ++m) {
    const Vec cm = R.topLeftCorner(m + 1, m + 1)
                       .triangularView<Eigen::Upper>()
                       .solve(gamma.head(m + 1));
    const Vec fm = K.basis.leftCols(m + 1) * cm;
    rep.degrees.push_back(m);
    rep.residuals.push_back(sp.norm(g - apply_A(sp, fm)));
    rep.graph_increments.push_back(sp.norm_graph(fm - prev_f));
    prev_f = fm;
    if (m + 1 == mdim) {
      rep.solution = fm;
      rep.solution_coeffs = cm;
    }
  }
  const double gnorm = sp.norm(g);
  rep.converged = !rep.residuals.empty() && rep.residuals.back() <= tol * gnorm;
  return rep;
}

core_gap_report core_condition_gap(const discretized_space& sp, const Vec& g, int m,
                                   const std::vector<Vec>& test_vectors) {
  core_gap_report rep;
  rep.m = m;
  const subspace_frame K = krylov_frame(sp, g, m, ip_kind::graph);
  for (const Vec& h : test_vectors) {
    for (int i = 0; i < sp.dim(); ++i)
      if (!std::isfinite(h[i]))
        throw degeneration_error("core_condition_gap: test vector not finite at lambda = " +
                                 std::to_string(sp.lambda[i]));
    std::vector<double> res;
    Vec proj = Vec::Zero(sp.dim());
    for (int k = 0; k < K.dim(); ++k) {
      proj += sp.ip_graph(K.basis.col(k), h) * K.basis.col(k);
      res.push_back(sp.norm_graph(h - proj));  // direct, no cancellation floor
    }
    rep.h_graph_norms.push_back(sp.norm_graph(h));
    rep.residuals.push_back(std::move(res));
  }
  return rep;
}

Vec truncation_projection(const discretized_space& sp, const Vec& v, double n) {
  Vec out = v;
  for (int i = 0; i < sp.dim(); ++i)
    if (std::abs(sp.lambda[i]) > n) out[i] = 0.0;
  return out;
}

nlohmann::json solvability_report::to_json() const {
  nlohmann::json j;
  j["degrees"] = degrees;
  j["residuals"] = residuals;
  j["graph_increments"] = graph_increments;
  j["solution_coeffs"] = std::vector<double>(solution_coeffs.data(),
                                             solution_coeffs.data() + solution_coeffs.size());
  j["converged"] = converged;
  j["tol"] = tol;
  j["gap"] = {{"gap_lower_bound", gap.gap_lower_bound},
              {"zero_in_resolvent", gap.zero_in_resolvent}};
  if (!warning.empty()) j["warning"] = warning;
  return j;
}

nlohmann::json core_gap_report::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  j["h_graph_norms"] = h_graph_norms;
  j["residuals"] = residuals;
  return j;
}

}  // namespace skl
