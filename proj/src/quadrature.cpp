#include "skl/quadrature.hpp"

#include <cmath>

namespace skl {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw measure_error("gauss_legendre: node count must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  const double pi = 3.14159265358979323846264338327950288;
  for (int i = 0; i < m; ++i) {
    // Tricomi-style initial guess, then Newton on P_n.
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;  // kill the -0.0 from symmetry
}

std::string to_string(map_kind k) {
  switch (k) {
    case map_kind::affine: return "affine";
    case map_kind::logistic: return "logistic";
    case map_kind::exp_halfline: return "exp";
    case map_kind::log_logistic: return "loglogistic";
  }
  return "affine";
}

map_kind map_kind_from_string(const std::string& s) {
  if (s == "affine") return map_kind::affine;
  if (s == "logistic") return map_kind::logistic;
  if (s == "exp") return map_kind::exp_halfline;
  if (s == "loglogistic") return map_kind::log_logistic;
  throw schema_error("unknown quadrature map kind: " + s);
}

void mapped_rule(const quad_map& m, int n, std::vector<double>& lambda,
                 std::vector<double>& w) {
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  lambda.assign(n, 0.0);
  w.assign(n, 0.0);
  if (m.scale <= 0.0) throw measure_error("quadrature map: scale must be positive");
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (gx[i] + 1.0);  // in (0,1), GL nodes are interior
    const double wt = 0.5 * gw[i];
    switch (m.kind) {
      case map_kind::affine:
        lambda[i] = m.center + m.scale * gx[i];
        w[i] = gw[i] * m.scale;
        break;
      case map_kind::logistic:
        lambda[i] = m.center + m.scale * std::log(t / (1.0 - t));
        w[i] = wt * m.scale / (t * (1.0 - t));
        break;
      case map_kind::exp_halfline:
        lambda[i] = m.center - m.sign * m.scale * std::log1p(-t);
        w[i] = wt * m.scale / (1.0 - t);
        break;
      case map_kind::log_logistic: {
        const double u = m.center + m.scale * std::log(t / (1.0 - t));
        lambda[i] = std::exp(u);
        w[i] = wt * m.scale / (t * (1.0 - t)) * lambda[i];
        break;
      }
    }
  }
  if (m.kind == map_kind::exp_halfline && m.sign < 0.0) {
    // mirrored half line comes out decreasing; restore monotonicity
    std::vector<double> l2(lambda.rbegin(), lambda.rend());
    std::vector<double> w2(w.rbegin(), w.rend());
    lambda.swap(l2);
    w.swap(w2);
  }
}

}  // namespace skl
