#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vexlab/measure.hpp"

using namespace vexlab;

namespace {
MaskPtr unit_square(double h = 1.0 / 64) {
  return make_rect_domain(2, {0, 0, 0}, {1, 1, 0}, h);
}
}  // namespace

TEST_CASE("dyadic radii span the diameter") {
  auto r = dyadic_radii(1.0 / 64, 1.4);
  CHECK(r.front() == doctest::Approx(1.0 / 64));
  CHECK(r.back() >= 1.4);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(2 * r[i - 1]));
}

TEST_CASE("maximal function of a constant") {
  auto m = unit_square();
  GridFunction f(m, 3.0);
  auto radii = dyadic_radii(m->grid.h, m->diameter);
  auto Mf = hl_maximal(f, radii);
  for (std::size_t id = 0; id < Mf.v.size(); ++id) {
    // Zero-extension outside the grid can only lower averages.
    CHECK(Mf.v[id] <= 3.0 + 1e-12);
    CHECK(Mf.v[id] >= 3.0 - 1e-12);  // the single-cell ball at r = h attains it
  }
}

TEST_CASE("maximal function rejects negative input and dominates f") {
  auto m = unit_square(1.0 / 32);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 2.0);
  GridFunction f(m);
  for (auto& v : f.v) v = uni(rng);
  auto radii = dyadic_radii(m->grid.h, m->diameter);
  auto Mf = hl_maximal(f, radii);
  for (std::size_t id = 0; id < f.v.size(); ++id) CHECK(Mf.v[id] >= f.v[id] - 1e-12);
  f.v[7] = -1.0;
  CHECK_THROWS(hl_maximal(f, radii));
}

TEST_CASE("maximal of an indicator decays like the area ratio") {
  auto m = unit_square();
  const Grid& g = m->grid;
  GridFunction f(m);
  Vec c{0.5, 0.5, 0};
  double rho = 0.1;
  for (std::size_t id = 0; id < f.v.size(); ++id)
    if (norm(g.cell_center(id) - c) < rho) f.v[id] = 1.0;
  auto Mf = hl_maximal(f, dyadic_radii(g.h, m->diameter));
  // At distance d from the spot, the best ball has radius about d + rho.
  std::size_t far = g.index(3, 32);
  double d = norm(g.cell_center(far) - c);
  double expected = rho * rho / ((d + rho) * (d + rho));
  CHECK(Mf.v[far] == doctest::Approx(expected).epsilon(0.35));
}

TEST_CASE("fractional maximal matches the direct ball-mass oracle") {
  auto m = unit_square(1.0 / 32);
  RadonMeasure mu;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.1, 0.9);
  for (int a = 0; a < 3; ++a) mu.atoms.push_back({{uni(rng), uni(rng), 0}, uni(rng)});
  GridFunction dens(m);
  for (std::size_t id = 0; id < dens.v.size(); ++id) dens.v[id] = uni(rng);
  mu.density = dens;

  auto radii = dyadic_radii(m->grid.h, m->diameter);
  auto M1 = frac_maximal_1(mu, m, radii);
  const Grid& g = m->grid;
  for (std::size_t id = 0; id < M1.v.size(); id += 37) {
    Vec x = g.cell_center(id);
    double oracle = 0;
    for (double r : radii)
      oracle = std::max(oracle, ball_mass(mu, x, r) / std::pow(r, g.n - 1));
    CHECK(M1.v[id] == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("riesz potential of a single atom") {
  auto m = unit_square(1.0 / 32);
  RadonMeasure mu;
  mu.atoms.push_back({{0.5, 0.5, 0}, 2.0});
  auto I1 = riesz_potential_1(mu, m);
  const Grid& g = m->grid;
  for (std::size_t id = 0; id < I1.v.size(); id += 11) {
    double d = std::max(norm(g.cell_center(id) - Vec{0.5, 0.5, 0}), g.h / 2);
    CHECK(I1.v[id] == doctest::Approx(2.0 / d));
  }
}

TEST_CASE("fractional maximal is dominated by the riesz potential") {
  auto m = unit_square(1.0 / 64);
  RadonMeasure mu;
  mu.atoms.push_back({{0.3, 0.4, 0}, 1.0});
  mu.atoms.push_back({{0.7, 0.6, 0}, 0.5});
  auto radii = dyadic_radii(m->grid.h, m->diameter);
  auto M1 = frac_maximal_1(mu, m, radii);
  auto I1 = riesz_potential_1(mu, m);
  const Grid& g = m->grid;
  for (std::size_t id = 0; id < M1.v.size(); ++id) {
    bool atom_cell = false;
    for (const auto& a : mu.atoms)
      if (norm(g.cell_center(id) - a.point) < 2 * g.h) atom_cell = true;
    if (atom_cell) continue;
    CHECK(M1.v[id] <= 2.5 * I1.v[id] + 1e-12);
  }
}

TEST_CASE("measure bookkeeping: total mass and scaling") {
  auto m = unit_square(1.0 / 32);
  RadonMeasure mu;
  mu.atoms.push_back({{0.2, 0.2, 0}, 1.5});
  GridFunction dens(m, 2.0);
  mu.density = dens;
  CHECK(mu.total_mass() == doctest::Approx(1.5 + 2.0));
  auto nu = mu.scaled(2.0);
  CHECK(nu.total_mass() == doctest::Approx(7.0));
  CHECK_FALSE(mu.empty());
  CHECK(RadonMeasure{}.empty());
  CHECK_THROWS(ball_mass(mu, {0.5, 0.5, 0}, 0.0));
}
