#pragma once

#include "vexlab/funcspace.hpp"
#include "vexlab/measure.hpp"
#include "vexlab/weights.hpp"

namespace vexlab {

/// Nonlinearity a(ξ,x) = c(x) (s² + |ξ|²)^{(p(x)-2)/2} ξ.
struct NonlinearityModel {
  double s = 0;            // degeneracy regularizer, in [0,1]
  double Lambda1 = 1;      // growth constant
  double Lambda2 = 1;      // ellipticity constant
  ExponentField p;
  std::vector<double> coeff;  // c(x) on the full grid; empty means c ≡ 1

  double c_at(std::size_t id) const { return coeff.empty() ? 1.0 : coeff[id]; }
  double p_at(std::size_t id) const { return p.v[id]; }

  static NonlinearityModel plaplace(const ExponentField& p, double s = 0);
};

/// a(ξ,x) at a cell.
Vec eval_a(const NonlinearityModel& m, const Vec& xi, std::size_t cell);

struct StructureReport {
  double Lambda1_fit = 0;   // smallest admissible growth constant
  double Lambda2_fit = 0;   // largest admissible ellipticity constant
  double Lambda1_sum = 0;   // fit of the summed-form growth bound
  bool monotone = true;
  Vec witness_xi{0, 0, 0}, witness_eta{0, 0, 0};
};

/// Scans log-spaced |ξ|, |η| in [0, 10³] over sampled cells and fits the
/// structure constants; checks monotonicity of ξ ↦ a(ξ,x).
StructureReport verify_structure(const NonlinearityModel& m,
                                 const std::vector<std::size_t>& cells,
                                 int n_mags = 12, int n_angles = 8);

struct BmoReport {
  double beta = 2;
  double R0 = 0;
  double value = 0;
};

/// [a]_{β,R0}: sup over centers and radii <= R0 of the ball average of
/// Θ(a, B_r(y))^β, with the ξ-sup taken over xi_sample.
BmoReport bmo_seminorm(const NonlinearityModel& m, const DomainMask& mask, double beta,
                       double R0, const std::vector<Vec>& centers,
                       const std::vector<double>& radii, const std::vector<Vec>& xi_sample);

/// μ ⋆ (normalized hat kernel of width k), mass preserving on the mask cells.
GridFunction mollify_measure(const RadonMeasure& mu, const MaskPtr& mask, double k);

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 80;
  double damping = 0;      // 0 = auto (1 for p <= 2, 0.5 otherwise)
  double lin_tol = 1e-11;
  int lin_max_iter = 20000;
};

struct SolveResult {
  GridFunction u;
  GradientField Du;
  int iterations = 0;
  double residual = 0;
  std::vector<double> energy_trace;
  bool converged = false;
  bool sigma_floored = false;
};

/// Discrete region solve of the weak problem ∫ a(Du,x)·Dφ = ∫ f φ. Unknowns
/// live on the region cells; faces to cells of `physical` outside the region
/// take Dirichlet values from the lookup at full cell distance (data
/// transfer), faces leaving `physical` take zero data at half-cell distance
/// (the wall). physical = nullptr means physical == region.
SolveResult solve_region(const NonlinearityModel& m, const GridFunction& f,
                         const MaskPtr& region_mask, const MaskPtr& physical,
                         const std::function<double(std::size_t)>& dirichlet,
                         const SolveOptions& opts = {});

/// div a(Du,x) = μ (weak form) with zero boundary data on the mask. Atoms are
/// mollified at scale max(2h, k).
SolveResult solve_dirichlet(const NonlinearityModel& m, const RadonMeasure& mu,
                            const MaskPtr& mask, const SolveOptions& opts = {},
                            double mollify_scale = 0);

struct SolaStep {
  double scale;
  SolveResult result;
};

struct SolaSequence {
  std::vector<SolaStep> steps;
  std::vector<double> grad_l1_diffs;  // ||D(u_i - u_{i+1})||_{L1}
};

/// Solves at decreasing mollification scales and tabulates L¹ gradient
/// Cauchy differences.
SolaSequence sola_sequence(const NonlinearityModel& m, const RadonMeasure& mu,
                           const MaskPtr& mask, const std::vector<double>& scales,
                           const SolveOptions& opts = {});

/// Variational energy ∫ (1/p(x)) c (s²+|Du|²)^{p/2} - ∫ f u over the region.
double model_energy(const NonlinearityModel& m, const GridFunction& u,
                    const GradientField& Du, const GridFunction& f);

/// Max weak-form defect against cell indicators, scaled by ||f||_{L1} (or the
/// boundary-data scale for homogeneous solves).
double weak_form_defect(const NonlinearityModel& m, const SolveResult& r,
                        const GridFunction& f,
                        const std::function<double(std::size_t)>& dirichlet);

}  // namespace vexlab
