#include "skl/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace skl {

recurrence_coefficients stieltjes_recurrence(const discretized_space& sp, int K) {
  if (K < 1) throw schema_error("stieltjes_recurrence: K must be positive");
  if (K > sp.dim())
    throw schema_error("stieltjes_recurrence: K = " + std::to_string(K) +
                       " exceeds the node count " + std::to_string(sp.dim()));

  recurrence_coefficients rc;
  rc.lambda_min = sp.lambda[0];
  rc.lambda_max = sp.lambda[sp.dim() - 1];

  rc.beta0 = csum(sp.weight);
  rc.values.resize(sp.dim(), K);
  rc.values.col(0).setConstant(1.0 / std::sqrt(rc.beta0));
  rc.ortho_loss.push_back(std::abs(sp.ip(rc.values.col(0), rc.values.col(0)) - 1.0));
  rc.K = 1;

  for (int k = 0; k < K; ++k) {
    Vec v = sp.lambda.cwiseProduct(rc.values.col(k));
    // roundoff reference: the weighted norm of the unorthogonalized step, not
    // the support hull (heavy tails put sup lambda far above ||lambda p_k||)
    const double vscale = sp.norm(v);
    rc.alpha.push_back(sp.ip(v, rc.values.col(k)));
    if (k + 1 == K) break;

    // classical three-term step, then two full reorthogonalization sweeps
    v -= rc.alpha[k] * rc.values.col(k);
    if (k > 0) v -= rc.beta[k - 1] * rc.values.col(k - 1);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= k; ++j) v -= sp.ip(rc.values.col(j), v) * rc.values.col(j);

    const double b = sp.norm(v);
    if (b <= 1e-13 * std::max(vscale, 1e-300)) {
      rc.degenerated = true;
      rc.note = "polynomial span saturated at degree " + std::to_string(k) +
                " (beta = " + std::to_string(b) + ")";
      rc.values.conservativeResize(Eigen::NoChange, k + 1);
      break;
    }
    rc.beta.push_back(b);
    rc.values.col(k + 1) = v / b;
    rc.K = k + 2;

    double loss = std::abs(sp.ip(rc.values.col(k + 1), rc.values.col(k + 1)) - 1.0);
    for (int j = 0; j <= k; ++j)
      loss = std::max(loss, std::abs(sp.ip(rc.values.col(j), rc.values.col(k + 1))));
    rc.ortho_loss.push_back(loss);
    if (loss > 1e-6)
      throw degeneration_error(
          "stieltjes_recurrence: orthogonality loss " + std::to_string(loss) +
          " at degree " + std::to_string(k + 1) + "; reduce K or raise the node count");
  }
  return rc;
}

std::complex<double> eval_orthonormal(const recurrence_coefficients& rc, int k,
                                      std::complex<double> z) {
  if (k < 0 || k >= rc.K) throw schema_error("eval_orthonormal: degree out of range");
  std::complex<double> prev = 0.0, cur = 1.0 / std::sqrt(rc.beta0);
  for (int j = 0; j < k; ++j) {
    const std::complex<double> next =
        ((z - rc.alpha[j]) * cur - (j > 0 ? rc.beta[j - 1] : 0.0) * prev) / rc.beta[j];
    prev = cur;
    cur = next;
  }
  return cur;
}

Mat jacobi_matrix(const recurrence_coefficients& rc, int m) {
  if (m < 1 || m > rc.K) throw schema_error("jacobi_matrix: size out of range");
  Mat J = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) J(i, i) = rc.alpha[i];
  for (int i = 0; i + 1 < m; ++i) J(i, i + 1) = J(i + 1, i) = rc.beta[i];

  // Gauss nodes of the node measure live strictly inside the node hull.
  Eigen::SelfAdjointEigenSolver<Mat> es(J, Eigen::EigenvaluesOnly);
  const double pad =
      1e-10 * std::max(1.0, std::max(std::abs(rc.lambda_min), std::abs(rc.lambda_max)));
  if (es.eigenvalues()(0) < rc.lambda_min - pad ||
      es.eigenvalues()(m - 1) > rc.lambda_max + pad)
    throw degeneration_error("jacobi_matrix: spectrum escapes the support hull");
  return J;
}

determinacy_report determinacy_series_test(const recurrence_coefficients& rc,
                                           std::complex<double> z0, int tail_window,
                                           double tail_tol) {
  if (z0.imag() == 0.0)
    throw schema_error("determinacy_series_test: z0 must have nonzero imaginary part");
  if (tail_window < 3) throw schema_error("determinacy_series_test: tail_window too small");

  determinacy_report rep;
  rep.z0 = z0;
  rep.tail_window = tail_window;
  rep.tail_tol = tail_tol;

  neumaier acc;
  for (int k = 0; k < rc.K; ++k) {
    const double t = std::norm(eval_orthonormal(rc, k, z0));
    rep.terms.push_back(t);
    acc.add(t);
    rep.partial_sums.push_back(acc.value());
  }
  if (rc.degenerated) {
    rep.verdict = determinacy_verdict::finite_support;
    return rep;
  }

  const int K = rc.K;
  const int q = std::max(1, (K + 3) / 4);
  rep.growth_factor = rep.partial_sums[K - 1] / rep.partial_sums[q - 1];
  if (K < tail_window + 1) {
    rep.verdict = determinacy_verdict::inconclusive;
    return rep;
  }

  // geometric fit of the last tail_window terms, in log scale
  const int lo = K - tail_window;
  neumaier sx, sy, sxx, sxy;
  for (int k = lo; k < K; ++k) {
    const double y = std::log(std::max(rep.terms[k], 1e-300));
    sx.add(k);
    sy.add(y);
    sxx.add(static_cast<double>(k) * k);
    sxy.add(k * y);
  }
  const double n = tail_window;
  const double det = n * sxx.value() - sx.value() * sx.value();
  const double slope = (n * sxy.value() - sx.value() * sy.value()) / det;
  const double icept = (sy.value() - slope * sx.value()) / n;
  neumaier r2;
  for (int k = lo; k < K; ++k) {
    const double d = std::log(std::max(rep.terms[k], 1e-300)) - (icept + slope * k);
    r2.add(d * d);
  }
  rep.fitted_ratio = std::exp(slope);
  rep.fit_residual = std::sqrt(r2.value() / n);
  const double S = rep.partial_sums.back();
  rep.tail_estimate = rep.fitted_ratio < 1.0
                          ? rep.terms.back() * rep.fitted_ratio / (1.0 - rep.fitted_ratio) / S
                          : std::numeric_limits<double>::infinity();

  if (rep.fitted_ratio < 0.95 && rep.fit_residual < 0.2 && rep.tail_estimate < tail_tol)
    rep.verdict = determinacy_verdict::convergent_tail;
  else if (rep.growth_factor > 10.0 && rep.fitted_ratio >= 0.98)
    rep.verdict = determinacy_verdict::divergent_trend;
  else
    rep.verdict = determinacy_verdict::inconclusive;
  return rep;
}

std::string to_string(determinacy_verdict v) {
  switch (v) {
    case determinacy_verdict::divergent_trend: return "divergent-trend";
    case determinacy_verdict::convergent_tail: return "convergent-tail";
    case determinacy_verdict::inconclusive: return "inconclusive";
    case determinacy_verdict::finite_support: return "finite-support";
  }
  return "?";
}

std::string indication(determinacy_verdict v) {
  switch (v) {
    case determinacy_verdict::divergent_trend: return "determinate-indication";
    case determinacy_verdict::convergent_tail: return "indeterminate-indication";
    case determinacy_verdict::inconclusive: return "inconclusive";
    case determinacy_verdict::finite_support: return "determinate-indication";
  }
  return "?";
}

nlohmann::json recurrence_coefficients::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["beta0"] = beta0;
  j["K"] = K;
  j["ortho_loss"] = ortho_loss;
  j["degenerated"] = degenerated;
  if (!note.empty()) j["note"] = note;
  return j;
}

nlohmann::json determinacy_report::to_json() const {
  nlohmann::json j;
  j["terms"] = terms;
  j["partial_sums"] = partial_sums;
  j["verdict"] = skl::to_string(verdict);
  j["indication"] = skl::indication(verdict);
  j["fitted_ratio"] = fitted_ratio;
  j["fit_residual"] = fit_residual;
  j["tail_estimate"] = tail_estimate;
  j["growth_factor"] = growth_factor;
  j["z0"] = {z0.real(), z0.imag()};
  j["tail_window"] = tail_window;
  j["tail_tol"] = tail_tol;
  return j;
}

}  // namespace skl
