#pragma once

#include <optional>
#include <utility>

#include "vexlab/field.hpp"

namespace vexlab {

/// Variable exponent p(·) (or q(·)) on a grid, with bounds and a tabulated
/// non-decreasing modulus of continuity.
struct ExponentField {
  Grid grid;
  std::vector<double> v;       // full-grid values
  double gamma_lo = 2, gamma_hi = 2;
  std::vector<std::pair<double, double>> modulus;  // (r, omega(r)), r increasing

  static ExponentField constant(const Grid& g, double p0);
  static ExponentField from(const Grid& g, const std::function<double(const Vec&)>& f,
                            double lo, double hi,
                            std::vector<std::pair<double, double>> mod = {});

  double at(std::size_t id) const { return v[id]; }
  double omega(double r) const;  // piecewise-linear read of the table
  double min_over(const std::vector<std::size_t>& cells) const;
  double max_over(const std::vector<std::size_t>& cells) const;
  /// Requires 2 - 1/n < gamma_lo (p-exponent contract); throws on violation.
  void require_p_bounds(int n) const;
};

/// Canonical log-Hölder modulus omega(r) = c / log(e + 1/r) tabulated down
/// to r_min.
std::vector<std::pair<double, double>> log_modulus_table(double c, double r_min,
                                                         double r_max, int points = 64);

struct LogHolderReport {
  double bound = 0;      // sup_{r<1} omega(r) log(1/r)
  double R_omega = 0;    // largest R with omega(r)log(1/r) <= 1/2 for r < R
  bool dominated = true; // measured oscillations below the table
  double worst_excess = 0;
};

/// Verifies the tabulated modulus against measured oscillations on sampled
/// cell pairs and computes R_omega per the 1/2 threshold.
LogHolderReport check_log_holder(const ExponentField& p, double diameter_cap,
                                 int pair_samples = 4096, unsigned seed = 1);

/// Cell-sum modular ∫ |f|^{p(x)} dx.
double modular(const GridFunction& f, const ExponentField& p);

/// ∫ |f|^{q(x)} w dx; throws if w is not positive on the mask.
double weighted_modular(const GridFunction& f, const ExponentField& q,
                        const GridFunction& w);
double weighted_modular(const GridFunction& f, const ExponentField& q,
                        const std::vector<double>& w_full);

/// Luxemburg norm by bisection on the scaling parameter.
double luxemburg_norm(const GridFunction& f, const ExponentField& p, double tol = 1e-8);

/// (norm <= 1, modular <= 1).
std::pair<bool, bool> check_unit_ball_equiv(const GridFunction& f, const ExponentField& p,
                                            double tol = 1e-8);

/// Morrey norm: max over sampled centers/radii of r^{-lambda/q} ||f||_{L^q(B_r ∩ Ω)}.
double morrey_norm(const GridFunction& f, double q, double lambda,
                   const std::vector<Vec>& centers, const std::vector<double>& radii);

/// Morrey norm with a default center/radius sample (boundary-strided centers,
/// dyadic radii up to diam).
double morrey_norm(const GridFunction& f, double q, double lambda, int max_centers = 48);

}  // namespace vexlab
