#pragma once

#include <string>

#include "vexlab/comparison.hpp"
#include "vexlab/goodlambda.hpp"
#include "vexlab/reifenberg.hpp"

#include "json.hpp"

namespace vexlab {

using json = nlohmann::json;

json grid_to_json(const Grid& g);
Grid grid_from_json(const json& j);

/// Mask file: one-line JSON header, then a packed row-major bitmask blob.
void save_mask(const std::string& path, const DomainMask& mask);
MaskPtr load_mask(const std::string& path);

/// Field file: one-line JSON header, then cell_count little-endian doubles.
void save_field(const std::string& path, const Grid& g, const std::vector<double>& v);
std::pair<Grid, std::vector<double>> load_field(const std::string& path);

void save_grid_function(const std::string& path, const GridFunction& f);
GridFunction load_grid_function(const std::string& path, const MaskPtr& mask);

/// Measure file: pure JSON; the density part references a field file path.
void save_measure(const std::string& path, const RadonMeasure& mu,
                  const std::string& density_path = "");
RadonMeasure load_measure(const std::string& path, const MaskPtr& density_mask = nullptr);

void save_exponent(const std::string& path, const ExponentField& p);
ExponentField load_exponent(const std::string& path);

void save_weight(const std::string& path, const WeightField& w);
WeightField load_weight(const std::string& path);

json to_json(const ReifenbergCertificate& c);
json to_json(const LogHolderReport& r);
json to_json(const StructureReport& r);
json to_json(const AInftyConstants& c);
json to_json(const CascadeResult& r);
json to_json(const LevelSetReport& r);
json to_json(const EstimateReport& r);
json to_json(const SolveResult& r);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace vexlab
