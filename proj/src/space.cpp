#include "skl/space.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace skl {

discretized_space discretize(const spectral_measure& mu, const discretize_options& opt) {
  if (!opt.per_part_nodes.empty() && opt.per_part_nodes.size() != mu.parts.size())
    throw measure_error("discretize: per_part_nodes size does not match part count");

  std::vector<std::pair<double, double>> nw;
  for (const auto& a : mu.atoms) nw.emplace_back(a.x, a.w);

  int exactness = mu.parts.empty() ? INT_MAX : INT_MAX;
  int dropped = 0;
  for (std::size_t pi = 0; pi < mu.parts.size(); ++pi) {
    const auto& p = mu.parts[pi];
    int n = opt.per_part_nodes.empty() ? p.nodes : opt.per_part_nodes[pi];
    n = std::max(1, static_cast<int>(std::lround(n * opt.refine)));
    exactness = std::min(exactness, 2 * n - 1);
    std::vector<double> lam, w;
    mapped_rule(*p.map, n, lam, w);
    for (int i = 0; i < n; ++i) {
      const double d = p.density(lam[i]);
      if (d < -1e-12)
        throw measure_error("discretize: density negative at lambda=" + std::to_string(lam[i]));
      const double wi = w[i] * std::max(d, 0.0);
      if (wi > 0.0)
        nw.emplace_back(lam[i], wi);
      else
        ++dropped;
    }
  }
  if (nw.empty()) throw measure_error("discretize: empty node set");

  std::sort(nw.begin(), nw.end());
  for (std::size_t i = 1; i < nw.size(); ++i) {
    if (nw[i].first == nw[i - 1].first)
      throw measure_error("discretize: node collision at lambda=" +
                          std::to_string(nw[i].first) +
                          " (change the resolution; no perturbation is applied)");
  }

  discretized_space sp;
  const int D = static_cast<int>(nw.size());
  sp.lambda.resize(D);
  sp.weight.resize(D);
  sp.gweight.resize(D);
  for (int i = 0; i < D; ++i) {
    sp.lambda[i] = nw[i].first;
    sp.weight[i] = nw[i].second;
    sp.gweight[i] = nw[i].second * (1.0 + nw[i].first * nw[i].first);
  }
  sp.declared_exactness = exactness;
  if (dropped > 0) sp.note = std::to_string(dropped) + " zero-weight nodes dropped";
  return sp;
}

}  // namespace skl
