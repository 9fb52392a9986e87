#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "skl/krylov.hpp"
#include "skl/space.hpp"

using namespace skl;

namespace {

discretized_space uniform12_space(int nodes = 64) {
  ac_part p;
  p.a = 1.0;
  p.b = 2.0;
  p.nodes = nodes;
  return discretize(spectral_measure::build({}, {p}));
}

discretized_space lognormal_space(int nodes = 800) {
  ac_part p;
  p.kind = density_kind::lognormal;
  p.a = 0.0;
  p.b = kInf;
  p.nodes = nodes;
  return discretize(spectral_measure::build({}, {p}));
}

}  // namespace

TEST_CASE("apply_A multiplies by the nodes") {
  auto sp = uniform12_space(16);
  Vec v = sp.eval([](double l) { return std::sin(l); });
  Vec av = apply_A(sp, v);
  for (int i = 0; i < sp.dim(); ++i)
    CHECK(av[i] == doctest::Approx(sp.lambda[i] * v[i]));
}

TEST_CASE("krylov_frame: orthonormal, degree-tagged, saturates gracefully") {
  auto sp = uniform12_space(24);
  auto f = krylov_frame(sp, sp.ones(), 6, ip_kind::ambient);
  CHECK(f.dim() == 7);
  CHECK(f.gram_defect() < 1e-12);
  REQUIRE(f.degree_meta.size() == 7);
  CHECK(f.degree_meta.front() == 0);
  CHECK(f.degree_meta.back() == 6);

  // degree + 1 beyond the node count is a caller error
  CHECK_THROWS_AS(krylov_frame(sp, sp.ones(), 24, ip_kind::ambient), schema_error);
  CHECK_THROWS_AS(krylov_frame(sp, Vec::Zero(sp.dim()), 2, ip_kind::ambient),
                  schema_error);
}

TEST_CASE("krylov_frame: span saturation truncates with a notice") {
  // g lives on two of the three atoms, so the span tops out at dimension 2
  auto sp = discretize(
      spectral_measure::build({{-1.0, 0.4}, {1.0, 0.4}, {2.0, 0.2}}, {}));
  Vec g = sp.eval([](double l) { return l == 2.0 ? 0.0 : 1.0; });
  auto f = krylov_frame(sp, g, 2, ip_kind::ambient);
  CHECK(f.dim() == 2);
  CHECK(f.degenerated);
  CHECK_FALSE(f.note.empty());
}

TEST_CASE("krylov_frame: graph inner product variant is orthonormal too") {
  auto sp = uniform12_space(24);
  auto f = krylov_frame(sp, sp.ones(), 8, ip_kind::graph);
  CHECK(f.ip == ip_kind::graph);
  CHECK(f.gram_defect() < 1e-12);
}

TEST_CASE("frame_from_columns drops dependent directions with a notice") {
  auto sp = uniform12_space(16);
  Mat cols(sp.dim(), 3);
  cols.col(0) = sp.ones();
  cols.col(1) = sp.eval([](double l) { return l; });
  cols.col(2) = 2.0 * cols.col(0) - 3.0 * cols.col(1);  // dependent
  auto f = frame_from_columns(sp, cols, ip_kind::ambient);
  CHECK(f.dim() == 2);
  CHECK_FALSE(f.note.empty());
}

TEST_CASE("projection_residual: member of the span projects to zero") {
  auto sp = uniform12_space(32);
  auto f = krylov_frame(sp, sp.ones(), 5, ip_kind::ambient);
  Vec inside = sp.eval([](double l) { return 1.0 + 2.0 * l - l * l; });
  CHECK(f.projection_residual(inside) < 1e-12);
  Vec outside = sp.eval([](double l) { return std::sin(8.0 * l); });
  CHECK(f.projection_residual(outside) > 1e-3);
}

TEST_CASE("complement_frame: orthogonal, complementary dimension") {
  auto sp = uniform12_space(20);
  auto f = krylov_frame(sp, sp.ones(), 4, ip_kind::ambient);
  auto c = complement_frame(f);
  CHECK(c.dim() == 20 - 5);
  CHECK(c.gram_defect() < 1e-12);
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < c.dim(); ++j)
      CHECK(std::abs(sp.ip(f.basis.col(i), c.basis.col(j))) < 1e-12);
}

TEST_CASE("truncation_projection: idempotent, symmetric, norm-splitting") {
  auto sp = uniform12_space(48);
  rng64 rng(7);
  Vec v = rng.unit_vector(sp.dim()), w = rng.unit_vector(sp.dim());
  Vec pv = truncation_projection(sp, v, 1.5);
  CHECK((truncation_projection(sp, pv, 1.5) - pv).norm() == 0.0);
  // <Pv, w> = <v, Pw> exactly (diagonal masking)
  CHECK(sp.ip(pv, w) == doctest::Approx(sp.ip(v, truncation_projection(sp, w, 1.5)))
                            .epsilon(1e-14));
  // Pythagoras
  const double a = sp.ip(pv, pv), b = sp.ip(v - pv, v - pv);
  CHECK(a + b == doctest::Approx(sp.ip(v, v)).epsilon(1e-12));
}

TEST_CASE("solve_krylov: uniform[1,2] residuals fall geometrically and converge") {
  auto sp = uniform12_space();
  auto rep = solve_krylov(sp, sp.ones(), 20, 1e-10);
  CHECK(rep.converged);
  REQUIRE(rep.residuals.size() == 21);
  // nonincreasing everywhere
  for (std::size_t i = 1; i < rep.residuals.size(); ++i)
    CHECK(rep.residuals[i] <= rep.residuals[i - 1] + 1e-15);
  // <= 1e-10 by degree 15
  CHECK(rep.residuals[15] <= 1e-10);
  // asymptotic per-degree ratio <= 0.2 (Chebyshev ~ 0.172 for kappa = 2)
  for (std::size_t i = 8; i + 1 < rep.residuals.size(); ++i) {
    if (rep.residuals[i] < 1e-14) break;  // at the noise floor
    CHECK(rep.residuals[i + 1] / rep.residuals[i] <= 0.2);
  }
  // solution solves A f = 1 on the nodes
  Vec err = apply_A(sp, rep.solution) - sp.ones();
  CHECK(sp.norm(err) <= 1e-10);
}

TEST_CASE("solve_krylov: graph increments match the solution increments") {
  auto sp = uniform12_space(32);
  auto rep = solve_krylov(sp, sp.ones(), 6, 1e-12);
  REQUIRE(rep.graph_increments.size() == 7);
  CHECK(rep.graph_increments[0] > 0.0);  // ||f_0||_A against f_{-1} = 0
}

TEST_CASE("solve_krylov: mass at lambda = 0 is not in range") {
  auto sp = discretize(spectral_measure::build({{0.0, 0.5}, {1.0, 0.5}}, {}));
  CHECK_THROWS_AS(solve_krylov(sp, sp.ones(), 4, 1e-10), not_in_range_error);
}

TEST_CASE("solve_krylov: zero data is rejected as a caller error") {
  auto sp = uniform12_space(16);
  Vec z = Vec::Zero(sp.dim());
  CHECK_THROWS_AS(solve_krylov(sp, z, 4, 1e-10), schema_error);
}

TEST_CASE("core_condition_gap: polynomial-reachable vector decays, witness stays flat") {
  auto sp = uniform12_space();
  Vec h = sp.eval([](double l) { return std::sin(6.283185307179586 * std::log(l)); });
  auto rep = core_condition_gap(sp, sp.ones(), 16, {h});
  REQUIRE(rep.residuals.size() == 1);
  REQUIRE(rep.residuals[0].size() == 17);
  CHECK(rep.residuals[0].back() < 1e-8 * rep.residuals[0].front());

  auto lsp = lognormal_space();
  Vec hw = lsp.eval([](double l) { return std::sin(6.283185307179586 * std::log(l)); });
  auto repw = core_condition_gap(lsp, lsp.ones(), 12, {hw});
  // indeterminate witness: no decay at all
  CHECK(repw.residuals[0].back() > 0.99 * repw.residuals[0].front());
}

TEST_CASE("solvability report serializes") {
  auto sp = uniform12_space(32);
  auto j = solve_krylov(sp, sp.ones(), 14, 1e-6).to_json();
  CHECK(j["converged"].get<bool>());
  CHECK(j["residuals"].size() == 15);
}
