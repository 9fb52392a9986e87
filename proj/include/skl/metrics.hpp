#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skl/krylov.hpp"
#include "skl/space.hpp"

#include <nlohmann/json_fwd.hpp>

namespace skl {

struct separation_report {
  double sigma_max = 0.0;       // largest principal-angle cosine
  double min_separation = 0.0;  // sqrt(2 (1 - sigma_max))
  std::vector<double> sampled_range;
  bool trivial_intersection_indicated = false;
  double threshold = 0.0;
  int dim_M = 0, dim_N = 0, D = 0;
  bool degenerate = false;
  std::string note;
  std::uint64_t seed = 0;
  int samples = 0;

  nlohmann::json to_json() const;
};

// Principal angles between ambient-orthonormal frames via the SVD of their
// cross-Gram; min_separation = min over unit v in N of the distance from v to
// M's unit sphere. sampled_range holds that distance at the extremal singular
// vector followed by seeded random unit vectors of N.
separation_report separation_range(const subspace_frame& M, const subspace_frame& N,
                                   int samples, std::uint64_t seed);

// Separation between the degree-m Krylov span and A applied to the graph
// complement of the degree-M_big graph Krylov span: a trivial-intersection
// indicator for the pair (A, g). threshold defaults to sqrt(2) - 1e-3.
separation_report kint_indicator(const discretized_space& sp, const Vec& g, int m,
                                 int M_big, double threshold, int samples,
                                 std::uint64_t seed);

// Probe frame for the weak norm: the orthonormal polynomial value-vectors in
// degree order, capped at 64 probes (later weights 2^{-n-1} fall below double
// resolution against the leading terms).
Mat weak_probes(const discretized_space& sp, int count = 64);

// || x ||_w = sum_n 2^{-(n+1)} |<v_n, x>_H|; probes must be ambient-orthonormal.
double weak_norm(const discretized_space& sp, const Mat& probes, const Vec& x);

// The weights 2^{-(n+1)}, n = 0..count-1.
std::vector<double> weak_weights(int count);

// Deterministic candidate stream of unit coefficient vectors: axes, signed
// normalized sums, then seeded random directions. A fixed prefix makes any
// sampled sup over the stream nondecreasing in the sample count.
std::vector<Vec> candidate_directions(int dim, int samples, rng64& rng);

struct weak_gap_estimate {
  double dw_CD = 0.0;  // sup over sampled u in ball(C) of dist_w(u, ball(D))
  double dw_DC = 0.0;
  double dhat = 0.0;   // max of the two directions
  int samples = 0;
  double inner_tol = 0.0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// Sampled estimate of the weak-gap metric between unit balls of two
// ambient-orthonormal frames. The outer sup is sampled (frame axes, signed
// normalized sums, then seeded random directions — a fixed prefix, so the
// estimate is nondecreasing in samples); the inner minimization is exact for
// target dimension <= 2 and projected-subgradient otherwise.
weak_gap_estimate dw_estimate(const subspace_frame& C, const subspace_frame& Dfr,
                              const Mat& probes, int samples, double inner_tol,
                              std::uint64_t seed);

// Inner problem, exposed for oracle tests: min over v in ball(frame) of
// ||u - v||_w.
double dw_point_to_ball(const discretized_space& sp, const Mat& probes,
                        const subspace_frame& frame, const Vec& u, double inner_tol);

}  // namespace skl
