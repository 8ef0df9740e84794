#pragma once

#include "vexlab/field.hpp"

namespace vexlab {

/// Positive weight on the whole grid (defined outside the mask as well, so
/// ball averages never truncate).
struct WeightField {
  Grid grid;
  std::vector<double> v;
  std::string family = "custom";

  static WeightField constant(const Grid& g, double c);
  double at(std::size_t id) const { return v[id]; }
  double mass(const DomainMask& mask) const;  // ∫_Ω w
};

/// w(x) = max(|x - center|, h/2)^alpha. Requires alpha > -n.
WeightField power_weight(double alpha, const Vec& center, const Grid& grid);

struct BallSample {
  Vec center;
  double radius;
};

/// Default ball family: random centers in the box, dyadic radii.
std::vector<BallSample> default_ball_sample(const Grid& grid, int n_centers, unsigned seed,
                                            double r_min_cells = 3.0);

/// Max over the sampled balls of the A_p product (p > 1) or the A_1 quotient.
double ap_constant(const WeightField& w, double p, const std::vector<BallSample>& balls);

struct AInftyConstants {
  double kappa_w = 0;
  double c_w = 1;
  int sample_count = 0;
  double max_residual = 0;  // max over samples of w(E)/w(B) - c (|E|/|B|)^kappa, fit slack
  bool ok = true;
};

/// Fits (kappa_w, c_w) with w(E) <= c_w (|E|/|B|)^{kappa_w} w(B) over random
/// (ball, subset) pairs; E mixes sub-rectangles and superlevel sets of w.
/// Deterministic given the seed.
AInftyConstants fit_ainfty_constants(const WeightField& w, int samples, unsigned seed);

/// Fraction of fresh samples on which the pair satisfies the inequality with
/// the given slack factor.
double validate_ainfty(const WeightField& w, const AInftyConstants& fit, int samples,
                       unsigned seed, double slack = 1.1);

}  // namespace vexlab
