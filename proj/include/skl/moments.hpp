#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skl/space.hpp"

#include <nlohmann/json_fwd.hpp>

namespace skl {

// Power moments s_n = integral of lambda^n against the node measure.
// log_even, when filled, carries log(s_{2n}) for n = 0..horizon and lets the
// Carleman classifier reach horizons where s_{2n} itself overflows a double.
struct moment_sequence {
  std::vector<double> s;         // s[0..max_order]
  std::vector<double> log_even;  // log s_{2n}; empty unless requested
  int max_order = 0;
  bool exactness_warning = false;  // 2*max_order exceeded the declared rule exactness
  std::string source;

  nlohmann::json to_json() const;
};

// s_n via running per-node products w_i * lambda_i^n, compensated sums.
// Throws degeneration_error naming the first order that leaves double range.
moment_sequence compute_moments(const discretized_space& sp, int max_order);

// log s_{2n} for n = 0..horizon by log-sum-exp over running per-node
// log-products; immune to overflow. Nodes at lambda = 0 contribute only to s_0.
std::vector<double> log_even_moments(const discretized_space& sp, int horizon);

struct hankel_report {
  std::vector<double> min_eigenvalues;  // smallest eigenvalue of H_k, k = 1..
  std::vector<double> norms;            // spectral norm of H_k
  bool is_moment_sequence = false;
  std::optional<int> first_failure_size;

  nlohmann::json to_json() const;
};

// Hankel matrices H_k = [s_{i+j}], k = 1..max_order/2+1, tested for positive
// semidefiniteness relative to their spectral norm.
hankel_report hankel_psd_check(const moment_sequence& ms, double tol = 1e-10);

enum class carleman_verdict {
  satisfied_at_horizon,
  convergent_tail,
  inconclusive,
  finite_support_determinate,
};
std::string to_string(carleman_verdict v);

struct carleman_report {
  std::vector<double> terms;         // t_n = s_{2n}^{-1/(2n)}, n = 1..horizon
  std::vector<double> partial_sums;  // running sums of terms
  carleman_verdict verdict = carleman_verdict::inconclusive;
  // Trend diagnostics fitted on the last half of the horizon.
  double fitted_ratio = 0.0;     // geometric ratio of the terms
  double fit_residual = 0.0;     // rms misfit of the geometric model (log scale)
  double tail_estimate = 0.0;    // t_m * r/(1-r), relative to the partial sum
  double fitted_exponent = 0.0;  // slope of log t_n vs log n
  double tail_tol = 0.0;

  nlohmann::json to_json() const;
};

// Divergence trend of sum_{n>=1} s_{2n}^{-1/(2n)}.  convergent-tail demands a
// clean geometric fit with a small certified remainder; satisfied-at-horizon
// demands decay no faster than 1/n; anything in between is inconclusive.
// A vanishing even moment short-circuits: the measure sits at {0}.
carleman_report carleman(const moment_sequence& ms, double tail_tol = 1e-4);

enum class vector_class {
  bounded,
  analytic,
  quasi_analytic,
  beyond_quasi_analytic,
  inconclusive,
};
std::string to_string(vector_class v);

struct vector_class_report {
  std::vector<double> norms;  // ||A^n g|| = sqrt(s_{2n})
  double bounded_sup = 0.0;   // sup_n s_{2n}^{1/(2n)}
  double bounded_trend = 0.0;
  double analytic_sup = 0.0;  // sup_n s_{2n}^{1/(2n)} / n
  double analytic_trend = 0.0;
  double qa_partial_sum = 0.0;
  vector_class verdict = vector_class::inconclusive;
  bool finite_horizon_caveat = true;  // always: trends, not proofs
  carleman_report carleman;

  nlohmann::json to_json() const;
};

// Growth-class verdict for the cyclic vector from its moment trend.
vector_class_report classify_vector(const moment_sequence& ms, double tail_tol = 1e-4);

}  // namespace skl
