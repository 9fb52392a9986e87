#pragma once

// Finite model of L^2(R, mu): quadrature nodes with positive weights. Vectors
// are node-value columns; the ambient inner product is the weighted dot, the
// graph inner product adds the (1 + lambda^2) factor, so multiplication by
// lambda plays the operator and the constant vector plays the cyclic vector.

#include <string>
#include <vector>

#include "skl/common.hpp"
#include "skl/measure.hpp"

namespace skl {

struct discretized_space {
  Vec lambda;  // strictly increasing
  Vec weight;  // positive
  Vec gweight; // weight .* (1 + lambda^2), cached
  int declared_exactness = 0;  // min over ac parts of 2*nodes-1; INT_MAX when atoms only
  std::string note;            // e.g. dropped zero-weight nodes

  int dim() const { return static_cast<int>(lambda.size()); }

  double ip(const Vec& f, const Vec& h) const { return cdot3(weight, f, h); }
  double ip_graph(const Vec& f, const Vec& h) const { return cdot3(gweight, f, h); }
  double norm(const Vec& f) const { return std::sqrt(std::max(0.0, ip(f, f))); }
  double norm_graph(const Vec& f) const { return std::sqrt(std::max(0.0, ip_graph(f, f))); }

  Vec ones() const { return Vec::Ones(dim()); }

  // Value vector of a scalar function on the nodes.
  template <typename F>
  Vec eval(F&& f) const {
    Vec v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = f(lambda[i]);
    return v;
  }
};

struct discretize_options {
  double refine = 1.0;              // multiplies every ac part's node count
  std::vector<int> per_part_nodes;  // optional override, one entry per part
};

// Atoms become nodes verbatim; each ac part contributes its mapped rule with
// density folded into the weights. Nodes are merged and sorted; an exact
// collision is a hard failure (change the resolution), zero-weight quadrature
// nodes are dropped with a note.
discretized_space discretize(const spectral_measure& mu,
                             const discretize_options& opt = {});

}  // namespace skl
