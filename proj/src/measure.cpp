#include "vexlab/measure.hpp"

#include <algorithm>

namespace vexlab {

double RadonMeasure::total_mass() const {
  double s = 0;
  for (const auto& a : atoms) s += a.mass;
  if (density) {
    double hv = density->mask->grid.cell_volume();
    for (std::size_t id = 0; id < density->v.size(); ++id)
      if (density->mask->is_inside(id)) s += density->v[id] * hv;
  }
  return s;
}

RadonMeasure RadonMeasure::scaled(double t) const {
  RadonMeasure out = *this;
  for (auto& a : out.atoms) a.mass *= t;
  if (out.density)
    for (auto& x : out.density->v) x *= t;
  return out;
}

double ball_mass(const RadonMeasure& mu, const Vec& x, double r) {
  if (!(r > 0)) throw std::invalid_argument("ball_mass: radius must be positive");
  double s = 0;
  for (const auto& a : mu.atoms)
    if (norm(a.point - x) < r) s += a.mass;
  if (mu.density) {
    const GridFunction& d = *mu.density;
    const Grid& g = d.mask->grid;
    double hv = g.cell_volume();
    int rad = int(std::ceil(r / g.h)) + 1;
    int ci = int(std::floor((x[0] - g.lo[0]) / g.h));
    int cj = int(std::floor((x[1] - g.lo[1]) / g.h));
    int ck = g.n == 3 ? int(std::floor((x[2] - g.lo[2]) / g.h)) : 0;
    int klo = g.n == 3 ? std::max(0, ck - rad) : 0;
    int khi = g.n == 3 ? std::min(g.dims[2] - 1, ck + rad) : 0;
    for (int k = klo; k <= khi; ++k)
      for (int j = std::max(0, cj - rad); j <= std::min(g.dims[1] - 1, cj + rad); ++j)
        for (int i = std::max(0, ci - rad); i <= std::min(g.dims[0] - 1, ci + rad); ++i) {
          std::size_t id = g.index(i, j, k);
          if (d.mask->is_inside(id) && norm(g.cell_center(id) - x) < r) s += d.v[id] * hv;
        }
  }
  return s;
}

std::vector<double> dyadic_radii(double h, double diam) {
  std::vector<double> radii;
  for (double r = h; r < 2 * diam; r *= 2) radii.push_back(r);
  return radii;
}

}  // namespace vexlab
