#pragma once

#include "vexlab/grid.hpp"

namespace vexlab {

struct ReifenbergSample {
  Vec point;       // boundary cell center
  double radius;
  Vec normal;      // best hyperplane normal (points into the domain)
  double deviation;  // minimal sandwich violation, in units of r
};

/// (delta, R0) flatness certificate measured on a finite sample.
struct ReifenbergCertificate {
  double delta = 0;
  double R0 = 0;
  std::vector<ReifenbergSample> samples;
};

/// Scans hyperplanes through sampled boundary points: for each point x and
/// radius r <= R0 the reported deviation is the smallest delta for which the
/// two-sided sandwich
///   B_r ∩ {y·n > delta r} ⊂ Ω  and  Ω ∩ B_r ⊂ {y·n > -delta r}
/// holds on cell centers. Directions are a uniform angular scan in 2-D and a
/// Fibonacci-sphere scan in 3-D. Radii are geometric over [max(4h, ...), R0];
/// n_radii = 1 tests R0 only.
ReifenbergCertificate certify_reifenberg(const DomainMask& mask, double R0, int n_dirs,
                                         int n_radii, int max_boundary_samples = 64);

}  // namespace vexlab
