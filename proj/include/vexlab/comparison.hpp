#pragma once

#include "vexlab/pde.hpp"

namespace vexlab {

/// Working ball (or boundary region) for the comparison cascade.
struct ComparisonConfig {
  Vec center{0, 0, 0};
  double R = 0;
  // Thresholds; the effective admissible radius is min of these over 10.
  double R0 = 1e300;
  double R_omega = 1e300;
  double R_a = 1e300;
  double K0_inv = 1e300;
  double delta = 0.1;  // flatness used by the boundary sandwich check
  double p1 = 0, p2 = 0;  // filled from the model over the working region

  double effective_radius() const {
    return std::min(std::min(R0, R_omega), std::min(R_a, K0_inv)) / 10.0;
  }
  void validate() const {
    if (!(R > 0)) throw std::invalid_argument("ComparisonConfig: R must be positive");
    if (R > effective_radius())
      throw std::invalid_argument("ComparisonConfig: R exceeds threshold/10");
  }
};

struct CascadeResult {
  SolveResult w, h, v;
  double F_value = 0;
  double p1 = 0, p2 = 0;
  double du_mean = 0;            // ⨍ (|Du|) over the outer region
  double ratio_du_w = 0;         // ⨍|D(u-w)| / F
  double ratio_hw = 0;           // (⨍|D(h-w)|^{p2})^{1/p2} / (F + ⨍|Du|)
  double ratio_linf = 0;         // sup|Dv| over the core / (F + ⨍|Du|)
  double ratio_vh = 0;           // (⨍|D(v-h)|^{p2})^{1/p2} / (F + ⨍|Du|)
  bool sandwich_ok = true;       // boundary case only
  bool complete = false;         // all three solves converged
};

/// Inside-mask cells with |x - center| < r, as a finalized mask on the grid.
MaskPtr ball_region(const MaskPtr& mask, const Vec& center, double r);

/// F(μ,u,Ω_r) = [|μ|(Ω_r)/r^{n-1}]^{1/(p⁺-1)}
///            + [|μ|(Ω_r)/r^{n-1}] (⨍_{Ω_r}(|Du|+1))^{2-p⁺} χ{p⁺ ≤ 2} + 1
/// with p⁺ the exponent supremum over the region.
double F_functional(const NonlinearityModel& m, const RadonMeasure& mu,
                    const SolveResult& u, const MaskPtr& region, double r);

/// b(ξ,x) = (s²+|ξ|²)^{(p₂-p(x))/2} a(ξ,x): exponent frozen at p₂ = sup p over
/// the region, coefficient inherited. Requires ω(4R) ≤ Λ₂/(2Λ₁) and checks the
/// inherited structure constants (growth within 3Λ₁, ellipticity above Λ₂/2,
/// both relative to the unfrozen model's fitted constants).
NonlinearityModel freeze_exponent(const NonlinearityModel& m, const MaskPtr& region,
                                  double R);

/// x-independent model with the ball-averaged coefficient and the same frozen
/// exponent.
NonlinearityModel average_nonlinearity(const NonlinearityModel& b, const MaskPtr& ball);

/// Homogeneous solve w on B_2R with data u, frozen solve h on B_R with data w,
/// averaged solve v inside B_R with data h; measured left/right ratios of the
/// four comparison inequalities. Requires B_2R inside the domain.
CascadeResult run_interior_cascade(const NonlinearityModel& m, const RadonMeasure& mu,
                                   const SolveResult& u, const ComparisonConfig& cfg,
                                   const SolveOptions& opts = {});

/// Same cascade on Ω_2R, Ω_R around a boundary point, with v solved on the
/// discrete half-ball B_{R/2} ∩ {(x-x₀)·normal > 0} with zero data below the
/// plane and zero-extended h elsewhere. `normal` points into the domain.
CascadeResult run_boundary_cascade(const NonlinearityModel& m, const RadonMeasure& mu,
                                   const SolveResult& u, const ComparisonConfig& cfg,
                                   const Vec& boundary_center, const Vec& normal,
                                   const SolveOptions& opts = {});

/// (⨍_{B_R}|Dw|^{p(x)(1+σ)})^{1+σ} against (⨍_{B_2R}|Dw|^{q p(x)})^{1/q} + 1,
/// both by cell sums; returns left/right.
double higher_integrability_probe(const NonlinearityModel& m, const SolveResult& w,
                                  const ComparisonConfig& cfg, double sigma, double q);

}  // namespace vexlab
