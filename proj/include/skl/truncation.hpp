#pragma once

// Window-truncation study: restrict the cyclic data to g_n = chi_[-n,n](A) g,
// follow the Krylov spans it generates inside one master space, and track how
// the captured mass, the graph defect, the weak gap to the cyclic hull, and
// the projection errors of a test panel behave as the window grows.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skl/krylov.hpp"
#include "skl/measure.hpp"
#include "skl/metrics.hpp"
#include "skl/space.hpp"

namespace skl {

// Full-dimensional orthonormal frame (normalized node indicators): the cyclic
// hull {h(A)g : h square-integrable} realized on the discretization. Under
// the graph inner product the same construction spans the operator domain.
subspace_frame lspace_frame(const discretized_space& sp, ip_kind ip = ip_kind::ambient);

// Orthonormal indicator frame of the nodes with |lambda| <= radius: the
// closure surrogate for every Krylov span generated from data supported in
// the window. Throws degeneration_error when no node lies inside.
subspace_frame window_frame(const discretized_space& sp, double radius,
                            ip_kind ip = ip_kind::ambient);

struct truncation_params {
  std::vector<double> radii;  // strictly increasing, positive
  int degree = 24;            // Krylov degree cap per window
  int samples = 12;           // candidate directions per weak-gap side
  int probes = 64;            // weak-norm probe count
  double inner_tol = 1e-6;    // weak-gap inner-minimization tolerance
  std::uint64_t seed = 1;
};

struct truncation_step {
  double radius = 0.0;
  bool skipped = false;  // no node inside the window
  std::string note;
  int inside_nodes = 0;
  int degree_used = -1;         // min(degree, inside_nodes - 1)
  double mass_captured = 0.0;   // ||g_n||_H^2 (the window mass when g = 1)
  double tail_mass = 0.0;       // ||g - g_n||_H^2
  double graph_norm_gap = 0.0;  // ||g - g_n||_A
  // max column residual of the Krylov frame of g_n against the next window
  // span, and against the full hull
  double nesting_residual = 0.0;
  double nesting_residual_hull = 0.0;
  weak_gap_estimate dhat_to_hull;  // window span vs hull, shared hull candidates
  // sup of ||.||_w over the unit ball of the window complement: sampled value
  // and a certified upper bound (sum over probes of weight * masked row norm)
  double complement_dhat = 0.0;
  double complement_upper = 0.0;
  int complement_dim = 0;
  std::vector<double> panel_errors;  // ||v - chi_[-n,n] v||_H per panel vector

  nlohmann::json to_json() const;
};

struct truncation_study {
  std::vector<truncation_step> steps;
  int dim = 0;              // master discretization size
  double total_mass = 0.0;  // ||g||_H^2
  int degree = 0;
  // verdicts over the non-skipped steps
  bool mass_nondecreasing = false;
  bool gap_nonincreasing = false;
  bool nesting_ok = false;           // residuals <= 1e-8 (next) and 1e-10 (hull)
  bool dhat_nonincreasing = false;   // within inner_tol slack
  bool panel_nonincreasing = false;  // per panel vector
  std::string note;

  nlohmann::json to_json() const;
};

// Splits every ac part at the cut points {-r, r} that fall strictly inside
// its support, so window masks align with quadrature panels and captured
// masses stay quadrature-exact. Pieces inherit the parent node count
// (uniform masses are rescaled to keep the density level); pieces whose
// quadrature mass vanishes are dropped.
spectral_measure split_at_radii(const spectral_measure& mu, const std::vector<double>& radii);

// Runs the window sweep on a master space discretized from split_at_radii.
// g_spec evaluates the cyclic data on the nodes (empty = the constant 1);
// panel holds extra vectors whose truncation errors are tracked per window.
// Throws schema_error on an empty or non-increasing radius grid.
truncation_study run_truncation_study(
    const spectral_measure& mu, const truncation_params& par,
    const std::function<double(double)>& g_spec = {},
    const std::vector<std::function<double(double)>>& panel = {},
    const discretize_options& opt = {});

struct norm_monotonicity {
  std::vector<double> h_norms;      // ||p(A) g_n||_H along the radius grid
  std::vector<double> graph_norms;  // ||p(A) g_n||_A
  double h_full = 0.0, graph_full = 0.0;
  bool nondecreasing = false;    // both columns, 1e-12 relative slack
  bool bounded_by_full = false;  // never exceeds the untruncated value

  nlohmann::json to_json() const;
};

// ||p(A) g_n|| tables versus the window radius, one table per polynomial
// (monomial coefficients, low degree first), checked against the untruncated
// norms in both inner products.
std::vector<norm_monotonicity> monotone_norm_check(const discretized_space& sp, const Vec& g,
                                                   const std::vector<double>& radii,
                                                   const std::vector<std::vector<double>>& polys);

}  // namespace skl
