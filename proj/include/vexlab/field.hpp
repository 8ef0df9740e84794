#pragma once

#include <functional>

#include "vexlab/grid.hpp"

namespace vexlab {

/// Scalar field on the cells of a mask; zero on the complement.
struct GridFunction {
  MaskPtr mask;
  std::vector<double> v;  // full-grid storage, row-major

  GridFunction() = default;
  explicit GridFunction(MaskPtr m, double fill = 0.0)
      : mask(std::move(m)), v(mask->grid.cell_count(), 0.0) {
    if (fill != 0.0)
      for (std::size_t id = 0; id < v.size(); ++id)
        if (mask->is_inside(id)) v[id] = fill;
  }
  static GridFunction from(MaskPtr m, const std::function<double(const Vec&)>& f) {
    GridFunction g(std::move(m));
    for (std::size_t id = 0; id < g.v.size(); ++id)
      if (g.mask->is_inside(id)) g.v[id] = f(g.mask->grid.cell_center(id));
    return g;
  }
  double max_abs() const {
    double m = 0;
    for (std::size_t id = 0; id < v.size(); ++id)
      if (mask->is_inside(id)) m = std::max(m, std::abs(v[id]));
    return m;
  }
};

enum class GradScheme { Central, Forward };

/// Component fields of a discrete gradient; zero-extended outside the mask.
struct GradientField {
  MaskPtr mask;
  std::array<std::vector<double>, 3> comp;
  GradScheme scheme = GradScheme::Central;

  double magnitude(std::size_t id) const {
    double s = 0;
    for (int d = 0; d < mask->grid.n; ++d) s += comp[d][id] * comp[d][id];
    return std::sqrt(s);
  }
  GridFunction magnitude_field() const {
    GridFunction g(mask);
    for (std::size_t id = 0; id < g.v.size(); ++id)
      if (mask->is_inside(id)) g.v[id] = magnitude(id);
    return g;
  }
};

/// Finite differences: central where both neighbors are inside, one-sided at
/// the mask boundary, zero where no inside neighbor exists along the axis.
GradientField gradient(const GridFunction& u);

/// Same stencils, but missing neighbors take values from `outside` (a
/// full-grid lookup) instead of truncating to one-sided; used when u carries
/// Dirichlet data on a ring outside its region.
GradientField gradient_with_data(const GridFunction& u,
                                 const std::function<double(std::size_t)>& outside);

}  // namespace vexlab
