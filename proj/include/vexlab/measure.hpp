#pragma once

#include <optional>

#include "vexlab/field.hpp"

namespace vexlab {

struct Atom {
  Vec point;
  double mass = 0;  // >= 0, total-variation input
};

/// Finite measure |μ|: atoms plus an absolutely continuous density part.
struct RadonMeasure {
  std::vector<Atom> atoms;
  std::optional<GridFunction> density;  // >= 0 on its mask

  double total_mass() const;
  bool empty() const { return atoms.empty() && !density; }
  RadonMeasure scaled(double t) const;
};

/// |μ|(B_r(x)): atom masses within distance r plus the density cell sum.
double ball_mass(const RadonMeasure& mu, const Vec& x, double r);

/// Dyadic radii {h 2^k} spanning [h, diam].
std::vector<double> dyadic_radii(double h, double diam);

/// Centered first order fractional maximal function: per cell, max over the
/// sampled radii of |μ|(B_r(x)) / r^{n-1}.
GridFunction frac_maximal_1(const RadonMeasure& mu, const MaskPtr& mask,
                            const std::vector<double>& radii);

/// Centered Hardy-Littlewood maximal function of f >= 0 (zero-extended
/// averages over ball ∩ grid).
GridFunction hl_maximal(const GridFunction& f, const std::vector<double>& radii);

/// I_1(μ)(x) = Σ m_i / max(|x-p_i|, h/2)^{n-1} + cell sum over the density.
GridFunction riesz_potential_1(const RadonMeasure& mu, const MaskPtr& mask);

}  // namespace vexlab
