#include "skl/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace skl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Least-squares line y ~ icept + slope*x; rms = root mean square misfit.
void line_fit(const std::vector<double>& x, const std::vector<double>& y,
              double& slope, double& icept, double& rms) {
  const int n = static_cast<int>(x.size());
  neumaier sx, sy, sxx, sxy;
  for (int i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
    sxx.add(x[i] * x[i]);
    sxy.add(x[i] * y[i]);
  }
  const double det = n * sxx.value() - sx.value() * sx.value();
  slope = (n * sxy.value() - sx.value() * sy.value()) / det;
  icept = (sy.value() - slope * sx.value()) / n;
  neumaier r2;
  for (int i = 0; i < n; ++i) {
    const double d = y[i] - (icept + slope * x[i]);
    r2.add(d * d);
  }
  rms = std::sqrt(r2.value() / n);
}

}  // namespace

moment_sequence compute_moments(const discretized_space& sp, int max_order) {
  if (max_order < 0) throw schema_error("compute_moments: order must be nonnegative");
  moment_sequence ms;
  ms.max_order = max_order;
  ms.exactness_warning = sp.declared_exactness < 2 * max_order;
  ms.source = sp.note;
  ms.s.resize(max_order + 1);

  // Running per-node products w_i * lambda_i^n keep every intermediate on the
  // scale of the actual contribution; pow() would overflow long before that.
  Vec p = sp.weight;
  ms.s[0] = csum(p);
  for (int n = 1; n <= max_order; ++n) {
    p.array() *= sp.lambda.array();
    ms.s[n] = csum(p);
    if (!std::isfinite(ms.s[n]))
      throw degeneration_error("compute_moments: moment of order " + std::to_string(n) +
                               " is not representable in double precision");
  }

  if (!(ms.s[0] > 0.0)) throw degeneration_error("compute_moments: zero total mass");
  for (int n = 0; 2 * n <= max_order; ++n)
    if (ms.s[2 * n] < 0.0)
      throw degeneration_error("compute_moments: negative even moment at order " +
                               std::to_string(2 * n));
  // Log-convexity of even moments (Cauchy-Schwarz); checked in log scale so
  // the products cannot overflow where the moments themselves do not.
  for (int n = 1; 2 * n + 2 <= max_order; ++n) {
    const double a = ms.s[2 * n - 2], b = ms.s[2 * n], c = ms.s[2 * n + 2];
    if (b == 0.0) continue;
    if (a == 0.0 || c == 0.0 ||
        2.0 * std::log(b) > std::log(a) + std::log(c) + 1e-10)
      throw degeneration_error("compute_moments: even moments fail log-convexity near order " +
                               std::to_string(2 * n));
  }
  return ms;
}

std::vector<double> log_even_moments(const discretized_space& sp, int horizon) {
  if (horizon < 0) throw schema_error("log_even_moments: horizon must be nonnegative");
  std::vector<double> lw, dl;
  lw.reserve(sp.dim());
  dl.reserve(sp.dim());
  for (int i = 0; i < sp.dim(); ++i) {
    if (sp.lambda[i] == 0.0) continue;  // contributes to s_0 only
    lw.push_back(std::log(sp.weight[i]));
    dl.push_back(2.0 * std::log(std::abs(sp.lambda[i])));
  }
  std::vector<double> out(horizon + 1);
  out[0] = std::log(csum(sp.weight));
  for (int n = 1; n <= horizon; ++n) {
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] += dl[i];
    if (lw.empty()) {
      out[n] = kNegInf;
      continue;
    }
    const double m = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(m)) {
      out[n] = m;  // all mass at |lambda| in {0} or an overflowing product
      continue;
    }
    neumaier acc;
    for (double v : lw) acc.add(std::exp(v - m));
    out[n] = m + std::log(acc.value());
  }
  return out;
}

hankel_report hankel_psd_check(const moment_sequence& ms, double tol) {
  if (ms.max_order < 2) throw schema_error("hankel_psd_check: need moments up to order 2");
  hankel_report rep;
  rep.is_moment_sequence = true;
  const int kmax = ms.max_order / 2 + 1;
  for (int k = 1; k <= kmax; ++k) {
    Mat H(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) H(i, j) = ms.s[i + j];
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(k - 1);
    const double nrm = std::max(std::abs(lo), std::abs(hi));
    rep.min_eigenvalues.push_back(lo);
    rep.norms.push_back(nrm);
    if (lo < -tol * nrm && rep.is_moment_sequence) {
      rep.is_moment_sequence = false;
      rep.first_failure_size = k;
    }
  }
  return rep;
}

carleman_report carleman(const moment_sequence& ms, double tail_tol) {
  carleman_report rep;
  rep.tail_tol = tail_tol;

  // log s_{2n}, n = 1..m; the long-horizon log table wins when present.
  std::vector<double> logs;
  if (!ms.log_even.empty()) {
    logs.assign(ms.log_even.begin() + 1, ms.log_even.end());
  } else {
    for (int n = 1; 2 * n <= ms.max_order; ++n)
      logs.push_back(ms.s[2 * n] > 0.0 ? std::log(ms.s[2 * n]) : kNegInf);
  }
  const int m = static_cast<int>(logs.size());
  if (m < 1) throw schema_error("carleman: no even moments beyond s_0");

  neumaier acc;
  for (int n = 1; n <= m; ++n) {
    if (logs[n - 1] == kNegInf) {
      // s_{2n} = 0: all mass sits at lambda = 0; trivially determinate.
      rep.verdict = carleman_verdict::finite_support_determinate;
      return rep;
    }
    const double t = std::exp(-logs[n - 1] / (2.0 * n));
    rep.terms.push_back(t);
    acc.add(t);
    rep.partial_sums.push_back(acc.value());
  }

  // Trend fits over the last half of the horizon.
  const int lo = m / 2 + 1;
  if (m - lo + 1 < 3) {
    rep.verdict = carleman_verdict::inconclusive;
    return rep;
  }
  std::vector<double> xs, lxs, ys;
  for (int n = lo; n <= m; ++n) {
    xs.push_back(static_cast<double>(n));
    lxs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(rep.terms[n - 1]));
  }
  double slope_geo, icept_geo, rms_geo;
  line_fit(xs, ys, slope_geo, icept_geo, rms_geo);
  double slope_pow, icept_pow, rms_pow;
  line_fit(lxs, ys, slope_pow, icept_pow, rms_pow);

  rep.fitted_ratio = std::exp(slope_geo);
  rep.fit_residual = rms_geo;
  rep.fitted_exponent = slope_pow;
  const double S = rep.partial_sums.back();
  rep.tail_estimate = rep.fitted_ratio < 1.0
                          ? rep.terms.back() * rep.fitted_ratio / (1.0 - rep.fitted_ratio) / S
                          : std::numeric_limits<double>::infinity();

  if (rep.fitted_ratio < 0.95 && rep.fit_residual < 0.2 && rep.tail_estimate < tail_tol)
    rep.verdict = carleman_verdict::convergent_tail;
  else if (rep.fitted_exponent >= -1.0)
    rep.verdict = carleman_verdict::satisfied_at_horizon;
  else
    rep.verdict = carleman_verdict::inconclusive;
  return rep;
}

vector_class_report classify_vector(const moment_sequence& ms, double tail_tol) {
  if (ms.max_order < 6) throw schema_error("classify_vector: need moments up to order 6");
  vector_class_report rep;
  const int m = ms.max_order / 2;
  rep.norms.resize(m + 1);
  for (int n = 0; n <= m; ++n) rep.norms[n] = std::sqrt(ms.s[2 * n]);

  std::vector<double> q(m + 1, 0.0);  // q_n = ||A^n g||^{1/n} = s_{2n}^{1/(2n)}
  for (int n = 1; n <= m; ++n) {
    q[n] = ms.s[2 * n] > 0.0 ? std::exp(std::log(ms.s[2 * n]) / (2.0 * n)) : 0.0;
    rep.bounded_sup = std::max(rep.bounded_sup, q[n]);
    rep.analytic_sup = std::max(rep.analytic_sup, q[n] / n);
  }
  const int h = std::max(1, m / 2);
  rep.bounded_trend = q[h] > 0.0 ? q[m] / q[h] : 0.0;
  rep.analytic_trend = q[h] > 0.0 ? (q[m] / m) / (q[h] / h) : 0.0;

  rep.carleman = carleman(ms, tail_tol);
  rep.qa_partial_sum = rep.carleman.partial_sums.empty() ? 0.0 : rep.carleman.partial_sums.back();
  rep.finite_horizon_caveat = true;

  if (rep.carleman.verdict == carleman_verdict::finite_support_determinate)
    rep.verdict = vector_class::bounded;  // mass at {0}: A g = 0
  else if (rep.bounded_trend <= 1.2)
    rep.verdict = vector_class::bounded;
  else if (rep.carleman.verdict == carleman_verdict::satisfied_at_horizon)
    rep.verdict = vector_class::quasi_analytic;
  else if (rep.carleman.verdict == carleman_verdict::convergent_tail)
    rep.verdict = vector_class::beyond_quasi_analytic;
  else if (rep.analytic_trend <= 1.2)
    rep.verdict = vector_class::analytic;
  else
    rep.verdict = vector_class::inconclusive;
  return rep;
}

std::string to_string(carleman_verdict v) {
  switch (v) {
    case carleman_verdict::satisfied_at_horizon: return "satisfied-at-horizon";
    case carleman_verdict::convergent_tail: return "convergent-tail";
    case carleman_verdict::inconclusive: return "inconclusive";
    case carleman_verdict::finite_support_determinate: return "finite-support-determinate";
  }
  return "?";
}

std::string to_string(vector_class v) {
  switch (v) {
    case vector_class::bounded: return "bounded";
    case vector_class::analytic: return "analytic";
    case vector_class::quasi_analytic: return "quasi-analytic";
    case vector_class::beyond_quasi_analytic: return "beyond-quasi-analytic";
    case vector_class::inconclusive: return "inconclusive";
  }
  return "?";
}

nlohmann::json moment_sequence::to_json() const {
  nlohmann::json j;
  j["max_order"] = max_order;
  j["s"] = s;
  if (!log_even.empty()) j["log_even"] = log_even;
  j["exactness_warning"] = exactness_warning;
  if (!source.empty()) j["source"] = source;
  return j;
}

nlohmann::json hankel_report::to_json() const {
  nlohmann::json j;
  j["min_eigenvalues"] = min_eigenvalues;
  j["norms"] = norms;
  j["is_moment_sequence"] = is_moment_sequence;
  j["first_failure_size"] =
      first_failure_size ? nlohmann::json(*first_failure_size) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json carleman_report::to_json() const {
  nlohmann::json j;
  j["terms"] = terms;
  j["partial_sums"] = partial_sums;
  j["verdict"] = skl::to_string(verdict);
  j["fitted_ratio"] = fitted_ratio;
  j["fit_residual"] = fit_residual;
  j["tail_estimate"] = tail_estimate;
  j["fitted_exponent"] = fitted_exponent;
  j["tail_tol"] = tail_tol;
  return j;
}

nlohmann::json vector_class_report::to_json() const {
  nlohmann::json j;
  j["norms"] = norms;
  j["bounded_sup"] = bounded_sup;
  j["bounded_trend"] = bounded_trend;
  j["analytic_sup"] = analytic_sup;
  j["analytic_trend"] = analytic_trend;
  j["qa_partial_sum"] = qa_partial_sum;
  j["verdict"] = skl::to_string(verdict);
  j["finite_horizon_caveat"] = finite_horizon_caveat;
  j["carleman"] = carleman.to_json();
  return j;
}

}  // namespace skl
