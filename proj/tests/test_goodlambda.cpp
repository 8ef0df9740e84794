#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vexlab/comparison.hpp"
#include "vexlab/goodlambda.hpp"

using namespace vexlab;

namespace {

struct Fixture {
  MaskPtr mask;
  NonlinearityModel model;
  RadonMeasure mu;
  SolveResult u;
  ExponentField p, q;
  WeightField w;
  MaskPtr regionR, region2R;

  explicit Fixture(double h = 1.0 / 64, double mass = 1.0) {
    mask = make_rect_domain(2, {0, 0, 0}, {1, 1, 0}, h);
    p = ExponentField::constant(mask->grid, 2.0);
    q = ExponentField::constant(mask->grid, 2.0);
    w = WeightField::constant(mask->grid, 1.0);
    model = NonlinearityModel::plaplace(p, 1.0);
    if (mass > 0) mu.atoms.push_back({{0.5, 0.5, 0}, mass});
    u = solve_dirichlet(model, mu, mask);
    regionR = ball_region(mask, {0.5, 0.5, 0}, 0.12);
    region2R = ball_region(mask, {0.5, 0.5, 0}, 0.24);
  }
};

}  // namespace

TEST_CASE("default sigma0 formula") {
  CHECK(default_sigma0(2, 1.8) == doctest::Approx(0.5 * 2 * 0.8 / 1.0));
  CHECK(default_sigma0(2, 5.0) == doctest::Approx(1.0));  // capped by n
  CHECK(default_sigma0(3, 2.0) == doctest::Approx(0.5 * 3.0 / 2.0));
}

TEST_CASE("level sets: inclusion, monotonicity, and the layer cake") {
  Fixture fx;
  REQUIRE(fx.u.converged);
  GoodLambdaConfig cfg;
  auto rep = level_sets(fx.u, fx.mu, fx.q, fx.p, fx.w, cfg, fx.regionR, fx.region2R);
  CHECK(cfg.q_minus == doctest::Approx(2.0));
  CHECK(cfg.q_plus == doctest::Approx(2.0));
  CHECK(cfg.sigma0 > 0);
  CHECK(cfg.lambda0 > 0);
  CHECK(int(rep.lambdas.size()) == cfg.grid_points);
  CHECK(rep.inclusion_ok);
  CHECK(rep.monotone_ok);
  CHECK_FALSE(rep.all_empty);
  CHECK(std::isfinite(rep.B_fit));
  CHECK(rep.B_fit >= 0);
  CHECK(rep.direct > 0);
  CHECK(std::abs(rep.layercake / rep.direct - 1.0) <= 0.05);
  // w(G) is non-increasing along the grid.
  for (std::size_t i = 1; i < rep.wG.size(); ++i) CHECK(rep.wG[i] <= rep.wG[i - 1] + 1e-12);
}

TEST_CASE("level sets validate their inputs") {
  Fixture fx(1.0 / 32);
  GoodLambdaConfig bad;
  bad.A0 = 1.0;
  CHECK_THROWS(level_sets(fx.u, fx.mu, fx.q, fx.p, fx.w, bad, fx.regionR, fx.region2R));
  GoodLambdaConfig cfg;
  // Regions swapped: the outer one no longer contains the inner one.
  CHECK_THROWS(level_sets(fx.u, fx.mu, fx.q, fx.p, fx.w, cfg, fx.region2R, fx.regionR));
}

TEST_CASE("null measure gives a zero direct integral") {
  Fixture fx(1.0 / 32, 0.0);
  REQUIRE(fx.u.converged);
  GoodLambdaConfig cfg;
  auto rep = level_sets(fx.u, fx.mu, fx.q, fx.p, fx.w, cfg, fx.regionR, fx.region2R);
  CHECK(rep.direct == doctest::Approx(0.0));
  CHECK(rep.all_empty);
  CHECK(rep.B_fit == 0.0);
}

TEST_CASE("covering lemma check on simple sets") {
  Fixture fx(1.0 / 64);
  std::vector<std::size_t> G, E;
  for (std::size_t id = 0; id < fx.mask->grid.cell_count(); ++id)
    if (fx.regionR->is_inside(id)) G.push_back(id);
  // E: a few cells near the center, well under the epsilon0 budget.
  const Grid& g = fx.mask->grid;
  for (std::size_t id : G)
    if (norm(g.cell_center(id) - Vec{0.5, 0.5, 0}) < 1.5 * g.h) E.push_back(id);
  auto chk = covering_lemma_check(E, G, fx.w, fx.regionR, 0.12, 0.05);
  CHECK(chk.applicable);
  CHECK(std::isfinite(chk.c_fit));

  auto empty = covering_lemma_check({}, G, fx.w, fx.regionR, 0.12, 0.05);
  CHECK(empty.applicable);
  CHECK(empty.pass);

  std::size_t outsider = 0;
  while (fx.regionR->is_inside(outsider)) ++outsider;
  CHECK_THROWS(covering_lemma_check({outsider}, G, fx.w, fx.regionR, 0.12, 0.05));
}

TEST_CASE("main estimate: null measure means zero over the domain volume term") {
  Fixture fx(1.0 / 32, 0.0);
  GoodLambdaConfig cfg;
  auto rep = assemble_main_estimate(fx.u, fx.mu, fx.q, fx.p, fx.w, cfg, fx.mask);
  CHECK(rep.lhs == doctest::Approx(0.0));
  // Unit square: constant term (0 + |Omega|)^{n+1} = 1.
  CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.ratio == doctest::Approx(0.0));
}

TEST_CASE("main and dual estimates are finite for a point charge") {
  Fixture fx;
  GoodLambdaConfig cfg;
  auto main = assemble_main_estimate(fx.u, fx.mu, fx.q, fx.p, fx.w, cfg, fx.mask);
  auto dual = assemble_dual_estimate(fx.u, fx.mu, fx.q, fx.p, fx.w, cfg, fx.mask);
  for (const auto& r : {main, dual}) {
    CHECK_FALSE(r.skipped);
    CHECK(r.lhs > 0);
    CHECK(r.rhs > 0);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0);
  }
}

TEST_CASE("corollary skip logic for a constant exponent q = 2 in 2-d") {
  Fixture fx;
  GoodLambdaConfig cfg;
  auto reps = assemble_corollaries(fx.u, fx.mu, fx.q, fx.p, fx.w, cfg, fx.mask);
  REQUIRE(reps.size() == 4);
  // Sobolev-exponent form needs q_plus < n and a density-type measure.
  CHECK(reps[0].name == "sobolev-modular");
  CHECK(reps[0].skipped);
  CHECK(reps[1].name == "lqw");
  CHECK_FALSE(reps[1].skipped);
  CHECK(std::isfinite(reps[1].ratio));
  // r = nq/(n+q) = 1 fails the r > 1 requirement.
  CHECK(reps[2].name == "dual-weight");
  CHECK(reps[2].skipped);
  CHECK(reps[3].name == "morrey");
  CHECK_FALSE(reps[3].skipped);
  CHECK(std::isfinite(reps[3].ratio));
}

TEST_CASE("corollary skip logic flips for a subcritical q with a density") {
  auto mask = make_rect_domain(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 32);
  auto p = ExponentField::constant(mask->grid, 2.0);
  auto q = ExponentField::constant(mask->grid, 1.5);
  auto w = WeightField::constant(mask->grid, 1.0);
  auto model = NonlinearityModel::plaplace(p, 1.0);
  RadonMeasure mu;
  mu.density = GridFunction(mask, 1.0);
  auto u = solve_dirichlet(model, mu, mask);
  REQUIRE(u.converged);
  GoodLambdaConfig cfg;
  auto reps = assemble_corollaries(u, mu, q, p, w, cfg, mask);
  REQUIRE(reps.size() == 4);
  CHECK_FALSE(reps[0].skipped);  // 1 < 1.5 < 2 with a pure density
  CHECK(std::isfinite(reps[0].ratio));
  // r = 2*1.5/3.5 = 6/7 < 1: dual-weight still out.
  CHECK(reps[2].skipped);
}

TEST_CASE("variable q disables the constant-exponent corollaries") {
  auto mask = make_rect_domain(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 32);
  auto p = ExponentField::constant(mask->grid, 2.0);
  auto q = ExponentField::from(
      mask->grid, [](const Vec& x) { return 1.3 + 0.2 * x[0]; }, 1.3, 1.5,
      log_modulus_table(2.0, 1e-3, 2.0));
  auto w = WeightField::constant(mask->grid, 1.0);
  auto model = NonlinearityModel::plaplace(p, 1.0);
  RadonMeasure mu;
  mu.density = GridFunction(mask, 1.0);
  auto u = solve_dirichlet(model, mu, mask);
  GoodLambdaConfig cfg;
  auto reps = assemble_corollaries(u, mu, q, p, w, cfg, mask);
  CHECK_FALSE(reps[0].skipped);  // modular form allows variable q
  CHECK(reps[1].skipped);
  CHECK(reps[2].skipped);
  CHECK(reps[3].skipped);
}

TEST_CASE("dual-weight corollary engages when r exceeds 1") {
  auto mask = make_rect_domain(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 32);
  auto p = ExponentField::constant(mask->grid, 2.2);
  auto q = ExponentField::constant(mask->grid, 3.0);  // r = 6/5 > 1
  auto w = WeightField::constant(mask->grid, 1.0);
  auto model = NonlinearityModel::plaplace(p, 1.0);
  RadonMeasure mu;
  mu.density = GridFunction(mask, 0.5);
  auto u = solve_dirichlet(model, mu, mask);
  REQUIRE(u.converged);
  GoodLambdaConfig cfg;
  auto reps = assemble_corollaries(u, mu, q, p, w, cfg, mask);
  CHECK(reps[2].name == "dual-weight");
  CHECK_FALSE(reps[2].skipped);
  CHECK(std::isfinite(reps[2].ratio));
  CHECK(reps[2].ratio > 0);
}
