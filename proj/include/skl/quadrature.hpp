#pragma once

// Base quadrature: Gauss-Legendre on [-1,1] plus the variable transformations
// used for unbounded supports. Node count is the only resolution knob; every
// map is declared explicitly in the rule descriptor so runs are reproducible.

#include <string>
#include <vector>

#include "skl/common.hpp"

namespace skl {

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration, symmetric,
// converged to machine precision. Exact for polynomials up to degree 2n-1.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

enum class map_kind { affine, logistic, exp_halfline, log_logistic };

std::string to_string(map_kind k);
map_kind map_kind_from_string(const std::string& s);

// Transformation from the GL reference variable to the spectral axis.
//   affine      : lambda = center + scale * x            (finite [a,b])
//   logistic    : lambda = center + scale * ln(t/(1-t))  (all of R)
//   exp_halfline: lambda = center + sign * scale * (-ln(1-t))   (half line)
//   log_logistic: lambda = exp(center + scale * ln(t/(1-t)))    ((0,inf))
// with t = (x+1)/2. Weights carry the jacobian.
struct quad_map {
  map_kind kind = map_kind::affine;
  double center = 0.0;
  double scale = 1.0;
  double sign = 1.0;  // exp_halfline only: +1 -> (center, inf), -1 -> (-inf, center)
};

// Mapped rule: nodes on the spectral axis and d(lambda)-weights (density not
// yet applied). Nodes are strictly monotone for every map.
void mapped_rule(const quad_map& m, int n, std::vector<double>& lambda,
                 std::vector<double>& w);

}  // namespace skl
