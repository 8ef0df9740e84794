#pragma once

#include <random>

#include "vexlab/io.hpp"

namespace vexlab {

/// Portable deterministic RNG: identical draws on every platform for a given
/// seed (distribution classes are implementation-defined, so draws are built
/// from raw 64-bit output directly).
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uni() { return double(eng() >> 11) * 0x1p-53; }
  double uni(double a, double b) { return a + (b - a) * uni(); }
  int uni_int(int a, int b) { return a + int(eng() % std::uint64_t(b - a + 1)); }
};

/// Self-contained description of one experiment.
struct CaseSpec {
  std::string id;
  std::string profile;
  unsigned seed = 1;
  double h = 1.0 / 64;

  std::string domain = "rect";  // rect | sawtooth
  double saw_amplitude = 0, saw_period = 0;

  double p_lo = 2, p_hi = 2;    // log-Hölder exponent band
  double q_lo = 2, q_hi = 2;
  double s = 1;                 // nonlinearity regularizer

  double alpha = 0;             // power-weight exponent; 0 = unit weight

  std::vector<Atom> atoms;
  bool has_density = false;
  double density_amp = 0;

  bool do_cascade = false;
  bool boundary = false;
  double cascade_R = 0;
};

json case_to_json(const CaseSpec& c);
CaseSpec case_from_json(const json& j);

/// Validated, solver-ready realization of a CaseSpec.
struct CaseSetup {
  MaskPtr mask;
  ExponentField p, q;
  WeightField w;
  RadonMeasure mu;
  NonlinearityModel model;
  LogHolderReport log_holder;
  ReifenbergCertificate certificate;
  StructureReport structure;
};

/// Builds all fields and runs the validators (log-Hölder, Reifenberg,
/// structure); throws on any validation failure.
CaseSetup build_case(const CaseSpec& spec);

struct CaseRow {
  std::string id;
  std::string profile;
  double h = 0;
  unsigned seed = 0;
  bool ok = false;
  std::string error;
  json detail;  // solve metadata, level sets, estimates, cascade
  // Flat columns for the CSV.
  bool converged = false;
  double residual = 0;
  double B_fit = 0;
  double layercake_err = 0;
  double ratio_main = 0, ratio_dual = 0;
  double ratio_lqw = 0, ratio_morrey = 0, ratio_sobolev = 0, ratio_dualw = 0;
  double cascade_du_w = 0, cascade_hw = 0, cascade_linf = 0, cascade_vh = 0;
  double F_value = 0;
};

struct SuiteResult {
  std::vector<CaseRow> rows;
  json metadata;  // seeds, worker count, aggregates
};

/// Named presets: smoke, interior, boundary, corollaries. Deterministic for a
/// given (profile, count, seed); serializing twice is byte-identical.
std::vector<CaseSpec> generate_suite(const std::string& profile, int count,
                                     unsigned seed);

/// Full pipeline per case: validate, solve, maximal fields, good-λ, estimates,
/// cascade where the case demands. Failures become rows, not aborts. Worker
/// count from VEXLAB_WORKERS (default 1), recorded in metadata.
SuiteResult run_suite(const std::vector<CaseSpec>& cases);

/// Runs one case and returns its row.
CaseRow run_case(const CaseSpec& spec);

std::string suite_csv(const SuiteResult& suite);

struct RefinementRow {
  double h = 0;
  CaseRow row;
};

/// Reruns the case across the given decreasing h values (at least 3) and
/// reports per-h rows plus the max relative drift of the fitted quantities.
struct RefinementStudy {
  std::vector<RefinementRow> rows;
  double max_drift = 0;  // max over tracked columns of |x_{i+1}/x_i - 1|
};
RefinementStudy refinement_study(const CaseSpec& base, const std::vector<double>& h_list);

/// Minimal SVG line chart of one or more series over a shared x-axis.
std::string svg_line_chart(const std::vector<double>& x,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series,
                           const std::string& x_label, const std::string& y_label);

}  // namespace vexlab
