#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

std::vector<bigfloat> gaussian_moments(int upto) {
  std::vector<bigfloat> s(upto + 1);
  s[0] = bigfloat(1.0);
  // s_n = (n-1) s_{n-2}; odd moments stay zero
  for (int n = 2; n <= upto; n += 2) s[n] = bigfloat(static_cast<double>(n - 1)) * s[n - 2];
  return s;
}

std::vector<bigfloat> lognormal_moments(int upto) {
  std::vector<bigfloat> s(upto + 1);
  for (int n = 0; n <= upto; ++n)
    s[n] = bigfloat::exp(bigfloat(static_cast<double>(n) * n / 2.0));
  return s;
}

void recurrence_from_moments(const std::vector<bigfloat>& s, int K,
                             std::vector<bigfloat>& alpha, std::vector<bigfloat>& beta) {
  if (static_cast<int>(s.size()) < 2 * K + 1)
    throw std::invalid_argument("recurrence_from_moments: need moments up to 2K");
  const int n = K + 1;  // Hankel size; one extra row for alpha_{K-1}
  std::vector<std::vector<bigfloat>> r(n, std::vector<bigfloat>(n));
  // upper-triangular Cholesky of H[i][j] = s_{i+j}
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      bigfloat acc = s[i + j];
      for (int k = 0; k < i; ++k) acc = acc - r[k][i] * r[k][j];
      if (i == j)
        r[i][i] = bigfloat::sqrt(acc);
      else
        r[i][j] = acc / r[i][i];
    }
  alpha.clear();
  beta.clear();
  // Orthonormal p_k has leading coefficient 1/r[k][k]; the classical
  // identities below read the recurrence off the Cholesky factor.
  for (int k = 0; k < K; ++k) {
    bigfloat a = r[k][k + 1] / r[k][k];
    if (k > 0) a = a - r[k - 1][k] / r[k - 1][k - 1];
    alpha.push_back(a);
    if (k > 0) beta.push_back(r[k][k] / r[k - 1][k - 1]);
  }
}

std::vector<double> series_terms_at_i(const std::vector<bigfloat>& s, int K) {
  std::vector<bigfloat> alpha, beta;
  recurrence_from_moments(s, K, alpha, beta);
  // forward recurrence at z0 = i, split into real/imaginary parts:
  // b_k p_{k+1} = (i - a_k) p_k - b_{k-1} p_{k-1}
  const bigfloat zero(0.0);
  bigfloat pre_r = zero, pre_i = zero;                          // p_{-1}
  bigfloat cur_r = bigfloat(1.0) / bigfloat::sqrt(s[0]), cur_i = zero;  // p_0
  std::vector<double> terms;
  terms.push_back((cur_r * cur_r + cur_i * cur_i).to_double());
  for (int k = 0; k + 1 < K; ++k) {
    bigfloat nr = -alpha[k] * cur_r - cur_i;  // Re[(i - a) p]
    bigfloat ni = cur_r - alpha[k] * cur_i;   // Im[(i - a) p]
    if (k > 0) {
      nr = nr - beta[k - 1] * pre_r;
      ni = ni - beta[k - 1] * pre_i;
    }
    nr = nr / beta[k];
    ni = ni / beta[k];
    pre_r = cur_r;
    pre_i = cur_i;
    cur_r = nr;
    cur_i = ni;
    terms.push_back((cur_r * cur_r + cur_i * cur_i).to_double());
  }
  return terms;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  return adaptive(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol, 48);
}

}  // namespace oracle
