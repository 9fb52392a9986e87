#pragma once

// Spectral measures on R in the multiplication-operator model: finitely many
// atoms plus absolutely continuous parts with named densities. Every part
// carries its own node count and (for unbounded supports) an explicit
// variable-transformation descriptor; given the description, all derived
// quantities are deterministic.

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skl/common.hpp"
#include "skl/quadrature.hpp"

namespace skl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct atom {
  double x = 0.0;
  double w = 0.0;  // > 0
};

enum class density_kind { uniform, gaussian, lognormal, custom_poly };

std::string to_string(density_kind k);
density_kind density_kind_from_string(const std::string& s);

struct ac_part {
  density_kind kind = density_kind::uniform;
  double a = 0.0, b = 1.0;  // support endpoints, +-inf allowed where meaningful
  double mean = 0.0;        // gaussian: mean; lognormal: mu of ln lambda
  double sigma = 1.0;       // gaussian / lognormal shape
  double mass = 1.0;        // uniform/gaussian/lognormal total-mass multiplier
  std::vector<double> coeffs;  // custom_poly: density(l) = sum coeffs[k] l^k
  int nodes = 64;
  std::optional<quad_map> map;  // resolved at build time when absent

  double density(double lambda) const;
  bool finite_support() const { return std::isfinite(a) && std::isfinite(b); }
};

struct spectral_measure {
  std::vector<atom> atoms;      // pairwise distinct locations
  std::vector<ac_part> parts;   // nonoverlap not required
  double total_mass = 0.0;      // cached at build

  // Resolves default maps, orders atoms, computes total mass, validates.
  // Throws measure_error on: nonpositive atom weight, duplicate atom,
  // degenerate support, nonfinite support for uniform/custom, zero-mass part,
  // negative density sample, nodes < 1.
  static spectral_measure build(std::vector<atom> atoms, std::vector<ac_part> parts);

  // Recomputes the cached mass; relative deviation beyond 1e-12 throws.
  void validate() const;

  static spectral_measure from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;  // canonical; infinite endpoints as "inf"/"-inf"
};

struct integration_result {
  std::complex<double> value;
  bool divergence_warning = false;
  std::string note;
};

// Quadrature + atom sum of f d(mu). Non-finite f at any node throws
// degeneration_error naming the node. Unbounded parts get a tail-decay
// heuristic: if the outer decile of nodes carries more than 10% of the part's
// contribution, divergence_warning is set.
integration_result integrate(const spectral_measure& mu,
                             const std::function<std::complex<double>(double)>& f);
integration_result integrate(const spectral_measure& mu,
                             const std::function<double(double)>& f);

// Quadrature mass of one ac part under its own rule (a default map is
// resolved when absent).
double part_mass(const ac_part& p);

// Restriction of mu to [-radius, radius]: atoms filtered, supports clipped,
// densities unchanged (no renormalization), mass recomputed.
spectral_measure truncate(const spectral_measure& mu, double radius);

struct gap_report {
  double gap_lower_bound = 0.0;
  bool zero_in_resolvent = false;
};

// Distance from 0 to the support, from the description alone.
gap_report spectral_gap_at_zero(const spectral_measure& mu);

}  // namespace skl
