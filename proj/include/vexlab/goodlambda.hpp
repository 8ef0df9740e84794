#pragma once

#include "vexlab/pde.hpp"

#include <string>

namespace vexlab {

/// Constants of the level-set argument. Zero-valued fields are filled with
/// defaults by level_sets.
struct GoodLambdaConfig {
  double A0 = 2;             // level multiplier, > 1
  double epsilon = 0.05;     // ε of the target bound B ε w(G)
  double epsilon0 = 0.05;    // covering-lemma threshold
  double a0 = 1;
  double kappa_w = 0.5;
  double c_w = 1;
  double sigma0 = 0;         // 0 = default 0.5 min{n(γ₁-1)/(n-1), n}
  double q_minus = 0, q_plus = 0;
  int grid_points = 64;
  double lambda0 = 0;
  std::vector<double> lambda_grid;  // increasing; generated when empty
};

double default_sigma0(int n, double gamma1);

struct LevelSetReport {
  std::vector<double> lambdas;
  std::vector<double> wE, wG;    // w-measures of the two level sets per λ
  double B_fit = 0;
  bool inclusion_ok = true;      // E_λ ⊂ G_λ cell by cell
  bool monotone_ok = true;       // w(G_λ) non-increasing
  bool all_empty = false;        // every G_λ empty (grid too high)
  double direct = 0;             // ∫_{Ω_R} M(...)^{q_-} w dx by cell sum
  double layercake = 0;          // reconstruction from the λ grid
};

/// Level sets of Mf = M(|Du|^{q(·)/q_-} χ_{Ω_2R}) against the barrier
/// Nf = M₁(μ)^{q(·)/((p(·)-1) q_-)} + 1 on Ω_R:
///   E_λ = {Mf > A₀λ, Nf ≤ λ},  G_λ = {Mf > λ}.
/// Fills the config defaults (q bounds, σ₀, λ₀, λ grid) in place.
LevelSetReport level_sets(const SolveResult& u, const RadonMeasure& mu,
                          const ExponentField& q, const ExponentField& p,
                          const WeightField& w, GoodLambdaConfig& cfg,
                          const MaskPtr& regionR, const MaskPtr& region2R);

struct CoveringCheck {
  bool applicable = true;    // hypothesis (a): w(E) < ε₀ w(Ω_R)
  bool hypothesis_b = true;  // ball hypothesis on all samples
  bool pass = false;
  double c_fit = 0;          // w(E) / (ε₀ w(G)) when defined
};

/// Empirical check of the weighted covering lemma on cell sets E ⊂ G ⊂ Ω_R.
CoveringCheck covering_lemma_check(const std::vector<std::size_t>& E_cells,
                                   const std::vector<std::size_t>& G_cells,
                                   const WeightField& w, const MaskPtr& mask, double R,
                                   double epsilon0);

struct EstimateReport {
  std::string name;
  double lhs = 0, rhs = 0, ratio = 0;
  bool skipped = false;
  std::string reason;
};

/// ∫_Ω |Du|^{q(x)} w dx against
/// (|μ|(Ω)^{σ₀/(γ₁-1)} + |Ω|)^{n+1} + ∫_Ω M₁(μ)^{q(x)/(p(x)-1)} w dx.
EstimateReport assemble_main_estimate(const SolveResult& u, const RadonMeasure& mu,
                                      const ExponentField& q, const ExponentField& p,
                                      const WeightField& w, const GoodLambdaConfig& cfg,
                                      const MaskPtr& mask);

/// Dual form: ∫ |Du|^{(p(x)-1)q(x)} w against the same constant term plus
/// ∫ M₁(μ)^{q(x)} w.
EstimateReport assemble_dual_estimate(const SolveResult& u, const RadonMeasure& mu,
                                      const ExponentField& q, const ExponentField& p,
                                      const WeightField& w, const GoodLambdaConfig& cfg,
                                      const MaskPtr& mask);

/// Corollary forms: Sobolev-exponent modular (variable q, unit weight),
/// constant-q L^q_w norm, the dual-weight form under 1/r - 1/q = 1/n with
/// w^q in A_{1+q/r'}, and the Morrey form. Inapplicable forms are returned
/// skipped with a reason.
std::vector<EstimateReport> assemble_corollaries(const SolveResult& u,
                                                 const RadonMeasure& mu,
                                                 const ExponentField& q,
                                                 const ExponentField& p,
                                                 const WeightField& w,
                                                 const GoodLambdaConfig& cfg,
                                                 const MaskPtr& mask,
                                                 double lambda_morrey = 1.0);

}  // namespace vexlab
