#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "skl/measure.hpp"
#include "skl/space.hpp"
#include "skl/truncation.hpp"

using namespace skl;
using nlohmann::json;

namespace {

spectral_measure gaussian_mu(int nodes = 200) {
  ac_part p;
  p.kind = density_kind::gaussian;
  p.a = -kInf;
  p.b = kInf;
  p.mean = 0.0;
  p.sigma = 1.0;
  p.mass = 1.0;
  p.nodes = nodes;
  return spectral_measure::build({}, {p});
}

spectral_measure uniform_mu(double a, double b, int nodes = 64) {
  ac_part p;
  p.kind = density_kind::uniform;
  p.a = a;
  p.b = b;
  p.nodes = nodes;
  return spectral_measure::build({}, {p});
}

// pick the real-valued overload without spelling std::function at every call
integration_result integrate_real(const spectral_measure& mu,
                                  const std::function<double(double)>& f) {
  return integrate(mu, f);
}

}  // namespace

TEST_CASE("build: validation failures carry the measure_error class") {
  CHECK_THROWS_AS(spectral_measure::build({{1.0, 0.0}}, {}), measure_error);
  CHECK_THROWS_AS(spectral_measure::build({{1.0, 0.5}, {1.0, 0.5}}, {}), measure_error);

  ac_part degenerate;
  degenerate.a = 2.0;
  degenerate.b = 2.0;
  CHECK_THROWS_AS(spectral_measure::build({}, {degenerate}), measure_error);

  ac_part unbounded_uniform;
  unbounded_uniform.a = 0.0;
  unbounded_uniform.b = kInf;
  CHECK_THROWS_AS(spectral_measure::build({}, {unbounded_uniform}), measure_error);

  ac_part negative;  // density dips below zero on [0,1]
  negative.kind = density_kind::custom_poly;
  negative.a = 0.0;
  negative.b = 1.0;
  negative.coeffs = {0.1, -1.0};
  CHECK_THROWS_AS(spectral_measure::build({}, {negative}), measure_error);

  ac_part no_nodes;
  no_nodes.nodes = 0;
  CHECK_THROWS_AS(spectral_measure::build({}, {no_nodes}), measure_error);
}

TEST_CASE("build: atoms are sorted and total mass cached") {
  auto mu = spectral_measure::build({{2.0, 0.25}, {-1.0, 0.5}}, {});
  CHECK(mu.atoms[0].x == -1.0);
  CHECK(mu.atoms[1].x == 2.0);
  CHECK(mu.total_mass == doctest::Approx(0.75).epsilon(1e-15));
  mu.validate();
}

TEST_CASE("integrate: polynomial against uniform matches the antiderivative") {
  auto mu = uniform_mu(1.0, 2.0);
  auto r = integrate_real(mu, [](double l) { return l * l; });
  CHECK(std::abs(r.value.real() - 7.0 / 3.0) < 1e-13);
  CHECK_FALSE(r.divergence_warning);
}

TEST_CASE("integrate: agrees with adaptive Simpson on a mixed measure") {
  ac_part p;
  p.kind = density_kind::custom_poly;
  p.a = 0.0;
  p.b = 2.0;
  p.coeffs = {0.5, 0.0, 0.75};  // density 1/2 + 3/4 l^2
  auto mu = spectral_measure::build({{-1.0, 0.3}}, {p});

  auto f = [](double l) { return std::cos(l) + l; };
  const double quad = integrate_real(mu, f).value.real();
  const double ac_ref = oracle::adaptive_simpson(
      [&](double l) { return (0.5 + 0.75 * l * l) * (std::cos(l) + l); }, 0.0, 2.0, 1e-13);
  const double ref = ac_ref + 0.3 * (std::cos(-1.0) - 1.0);
  CHECK(std::abs(quad - ref) < 1e-11);
}

TEST_CASE("integrate: divergence heuristic flags a non-integrable tail") {
  auto mu = gaussian_mu(200);
  // e^{lambda^2} d mu has no finite integral; the outer decile dominates
  auto r = integrate_real(mu, [](double l) { return std::exp(l * l * 0.75); });
  CHECK(r.divergence_warning);
}

TEST_CASE("integrate: non-finite integrand names the node") {
  auto mu = uniform_mu(0.5, 2.0);
  CHECK_THROWS_AS(integrate_real(mu, [](double l) { return 1.0 / (l - l); }),
                  degeneration_error);
}

TEST_CASE("part_mass: gaussian piece mass matches the normal CDF") {
  ac_part p;
  p.kind = density_kind::gaussian;
  p.a = -1.0;
  p.b = 1.0;
  p.nodes = 64;
  // Phi(1) - Phi(-1) = erf(1/sqrt 2)
  CHECK(std::abs(part_mass(p) - std::erf(1.0 / kSqrt2)) < 1e-13);
}

TEST_CASE("truncate: uniform density level survives the clip") {
  auto mu = uniform_mu(-2.0, 2.0);  // density 1/4
  auto cut = truncate(mu, 1.0);
  REQUIRE(cut.parts.size() == 1);
  CHECK(cut.parts[0].a == -1.0);
  CHECK(cut.parts[0].b == 1.0);
  // same density level => half the mass on half the length
  CHECK(cut.total_mass == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cut.parts[0].density(0.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("truncate: atoms filtered, gaussian density unchanged") {
  ac_part p;
  p.kind = density_kind::gaussian;
  p.a = -kInf;
  p.b = kInf;
  p.nodes = 128;
  auto mu = spectral_measure::build({{-3.0, 0.2}, {0.5, 0.1}}, {p});
  auto cut = truncate(mu, 1.0);
  REQUIRE(cut.atoms.size() == 1);
  CHECK(cut.atoms[0].x == 0.5);
  // clipped gaussian keeps pointwise density
  CHECK(cut.parts[0].density(0.3) == doctest::Approx(mu.parts[0].density(0.3)));
  // mass = atom + central gaussian window
  const double want = 0.1 + std::erf(1.0 / kSqrt2);
  CHECK(cut.total_mass == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("split_at_radii: masses conserved exactly and pieces aligned") {
  auto mu = gaussian_mu(128);
  auto split = split_at_radii(mu, {1.0, 2.0});
  CHECK(split.parts.size() == 5);  // (-inf,-2],[-2,-1],[-1,1],[1,2],[2,inf)
  CHECK(std::abs(split.total_mass - 1.0) < 1e-12);
  // no piece boundary crosses a cut: masses of |lambda|<=1 region exact
  double inner = 0.0;
  for (const auto& q : split.parts)
    if (q.a >= -1.0 && q.b <= 1.0) inner += part_mass(q);
  CHECK(std::abs(inner - std::erf(1.0 / kSqrt2)) < 1e-12);
}

TEST_CASE("split_at_radii: cuts outside the support leave parts untouched") {
  auto mu = uniform_mu(1.0, 2.0);
  auto split = split_at_radii(mu, {5.0});
  REQUIRE(split.parts.size() == 1);
  CHECK(split.parts[0].a == 1.0);
  CHECK(split.parts[0].b == 2.0);
}

TEST_CASE("spectral_gap_at_zero: reads the description") {
  CHECK(spectral_gap_at_zero(uniform_mu(1.0, 2.0)).gap_lower_bound ==
        doctest::Approx(1.0));
  CHECK(spectral_gap_at_zero(uniform_mu(1.0, 2.0)).zero_in_resolvent);
  CHECK_FALSE(spectral_gap_at_zero(uniform_mu(-1.0, 1.0)).zero_in_resolvent);
  auto atoms_only = spectral_measure::build({{-2.0, 0.5}, {3.0, 0.5}}, {});
  CHECK(spectral_gap_at_zero(atoms_only).gap_lower_bound == doctest::Approx(2.0));
}

TEST_CASE("json: canonical round-trip preserves the description") {
  json doc = {
      {"atoms", {{{"x", -1.0}, {"w", 0.25}}}},
      {"ac",
       {{{"kind", "gaussian"},
         {"support", {"-inf", "inf"}},
         {"params", {{"mean", 0.5}, {"sigma", 2.0}, {"mass", 0.75}}},
         {"nodes", 96}}}}};
  auto mu = spectral_measure::from_json(doc);
  CHECK(mu.atoms.size() == 1);
  CHECK(mu.parts[0].sigma == 2.0);
  auto again = spectral_measure::from_json(mu.to_json());
  CHECK(again.to_json() == mu.to_json());
  CHECK(again.total_mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("json: schema violations throw schema_error") {
  CHECK_THROWS_AS(spectral_measure::from_json(json::array()), schema_error);
  CHECK_THROWS_AS(spectral_measure::from_json(json{{"atoms", 3}}), schema_error);
  CHECK_THROWS_AS(
      spectral_measure::from_json(json{{"ac", {{{"kind", "cauchy"}}}}}),
      schema_error);
  // an empty description fails as a measure, not as a schema
  CHECK_THROWS_AS(spectral_measure::from_json(json::object()), measure_error);
}

TEST_CASE("discretize: weights positive, lambda sorted, gweight identity") {
  ac_part p;
  p.kind = density_kind::gaussian;
  p.a = -kInf;
  p.b = kInf;
  p.nodes = 150;
  auto mu = spectral_measure::build({{0.25, 0.1}}, {p});
  auto sp = discretize(mu);
  REQUIRE(sp.dim() >= 150);
  for (int i = 1; i < sp.dim(); ++i) CHECK(sp.lambda[i] > sp.lambda[i - 1]);
  for (int i = 0; i < sp.dim(); ++i) {
    CHECK(sp.weight[i] > 0.0);
    CHECK(sp.gweight[i] ==
          doctest::Approx(sp.weight[i] * (1.0 + sp.lambda[i] * sp.lambda[i])));
  }
  CHECK(std::abs(csum(sp.weight) - mu.total_mass) < 1e-12);
  CHECK(sp.declared_exactness == 2 * 150 - 1);
}

TEST_CASE("discretize: refine option raises the node count") {
  auto mu = uniform_mu(0.0, 1.0, 32);
  discretize_options opt;
  opt.refine = 2.0;
  CHECK(discretize(mu, opt).dim() == 64);
}
