#pragma once

#include <complex>
#include <string>
#include <vector>

#include "skl/space.hpp"

#include <nlohmann/json_fwd.hpp>

namespace skl {

// Three-term recurrence of the orthonormal polynomials of the node measure:
//   lambda p_k = beta_{k+1} p_{k+1} + alpha_k p_k + beta_k p_{k-1},
// with p_0 = 1/sqrt(mass). beta0 stores the total mass.
struct recurrence_coefficients {
  std::vector<double> alpha;       // alpha_0 .. alpha_{K-1}
  std::vector<double> beta;        // beta_1 .. beta_{K-1}
  double beta0 = 0.0;              // total mass; p_0 = beta0^{-1/2}
  int K = 0;                       // polynomials actually built
  std::vector<double> ortho_loss;  // max |<p_j,p_k> - delta_jk| per degree k
  bool degenerated = false;        // halted early: span saturated
  std::string note;
  double lambda_min = 0.0, lambda_max = 0.0;  // node hull, for spectrum checks
  Mat values;                      // D x K node values of p_0..p_{K-1}

  nlohmann::json to_json() const;
};

// Stieltjes procedure on the nodes with full reorthogonalization (CGS2).
// Degeneration (beta below 1e-13 * lambda-scale) truncates with a notice;
// orthogonality loss beyond 1e-6 is a hard error.
recurrence_coefficients stieltjes_recurrence(const discretized_space& sp, int K);

// p_k(z) by forward recurrence.
std::complex<double> eval_orthonormal(const recurrence_coefficients& rc, int k,
                                      std::complex<double> z);

// m x m symmetric tridiagonal truncation of the multiplication operator in
// the polynomial basis; eigenvalues checked against the node hull.
Mat jacobi_matrix(const recurrence_coefficients& rc, int m);

enum class determinacy_verdict {
  divergent_trend,
  convergent_tail,
  inconclusive,
  finite_support,
};
std::string to_string(determinacy_verdict v);
std::string indication(determinacy_verdict v);  // determinate / indeterminate reading

struct determinacy_report {
  std::vector<double> terms;         // |p_k(z0)|^2, k = 0..K-1
  std::vector<double> partial_sums;  // running sums
  determinacy_verdict verdict = determinacy_verdict::inconclusive;
  double fitted_ratio = 0.0;   // geometric ratio over the tail window
  double fit_residual = 0.0;   // rms misfit of that fit (log scale)
  double tail_estimate = 0.0;  // certified-remainder estimate relative to the sum
  double growth_factor = 0.0;  // S_K / S_{ceil(K/4)}
  std::complex<double> z0;
  int tail_window = 0;
  double tail_tol = 0.0;

  nlohmann::json to_json() const;
};

// Convergence trend of sum |p_k(z0)|^2 at non-real z0 (default i): a
// convergent tail signals an indeterminate moment problem, unbounded growth
// a determinate one. Finitely supported measures short-circuit.
determinacy_report determinacy_series_test(const recurrence_coefficients& rc,
                                           std::complex<double> z0,
                                           int tail_window = 6,
                                           double tail_tol = 1e-4);

}  // namespace skl
