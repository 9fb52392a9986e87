#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skl/measure.hpp"
#include "skl/space.hpp"

#include <nlohmann/json_fwd.hpp>

namespace skl {

enum class ip_kind { ambient, graph };
std::string to_string(ip_kind ip);

// Orthonormal basis of a subspace of the node space, under the declared
// inner product. Columns are node-value vectors.
struct subspace_frame {
  const discretized_space* space = nullptr;
  Mat basis;  // D x dim
  ip_kind ip = ip_kind::ambient;
  std::vector<int> degree_meta;  // polynomial degrees where meaningful
  bool degenerated = false;      // construction stopped early
  std::string note;

  int dim() const { return static_cast<int>(basis.cols()); }
  double ipv(const Vec& f, const Vec& h) const {
    return ip == ip_kind::ambient ? space->ip(f, h) : space->ip_graph(f, h);
  }
  // Coefficients of the orthogonal projection of x onto the frame.
  Vec project_coeffs(const Vec& x) const;
  // Norm (declared ip) of x minus its projection onto the frame.
  double projection_residual(const Vec& x) const;
  // max |Gram - I|; cheap orthonormality audit.
  double gram_defect() const;
};

// CGS2-orthonormalize the given columns, dropping dependent ones (relative
// threshold 1e-12) with a notice.
subspace_frame frame_from_columns(const discretized_space& sp, const Mat& cols, ip_kind ip);

// Orthonormal basis of span{g, A g, ..., A^m g} built by the stable
// multiply-and-reorthogonalize recurrence; saturating span truncates the
// frame with a degeneration notice.
subspace_frame krylov_frame(const discretized_space& sp, const Vec& g, int m, ip_kind ip);

// Orthonormal complement of the frame within the full node space, same inner
// product, via Householder QR in weighted coordinates.
subspace_frame complement_frame(const subspace_frame& f);

// Graph-inner-product complement of a graph Krylov frame (checked).
subspace_frame graph_complement_frame(const discretized_space& sp, const subspace_frame& k_frame);

// Multiplication by lambda at the nodes.
Vec apply_A(const discretized_space& sp, const Vec& x);
Mat apply_A(const discretized_space& sp, const Mat& cols);

struct solvability_report {
  std::vector<int> degrees;
  std::vector<double> residuals;         // ||A f_m - g||_H
  std::vector<double> graph_increments;  // ||f_m - f_{m-1}||_A
  Vec solution;                          // node values of the final f_m
  Vec solution_coeffs;                   // coefficients in the Krylov frame
  bool converged = false;
  double tol = 0.0;
  gap_report gap;
  std::string warning;  // e.g. 0 inside the node hull without an atom there

  nlohmann::json to_json() const;
};

// Least-squares minimization of ||A f - g||_H over nested Krylov spans of
// increasing degree, by Householder QR of the weighted image frame. Nodes at
// lambda = 0 carrying g-mass make the problem unsolvable (not-in-range).
solvability_report solve_krylov(const discretized_space& sp, const Vec& g, int m_max,
                                double tol, std::optional<gap_report> gap = std::nullopt);

struct core_gap_report {
  // residuals[t][k] = graph-norm distance of test vector t from the degree-k
  // Krylov span, k = 0..m.
  std::vector<std::vector<double>> residuals;
  std::vector<double> h_graph_norms;
  int m = 0;

  nlohmann::json to_json() const;
};

// Best graph-norm polynomial approximation of each test vector; decay (or
// its absence) probes the Krylov core condition.
core_gap_report core_condition_gap(const discretized_space& sp, const Vec& g, int m,
                                   const std::vector<Vec>& test_vectors);

// chi_[-n,n](A): zero the components at nodes with |lambda| > n.
Vec truncation_projection(const discretized_space& sp, const Vec& v, double n);

}  // namespace skl
