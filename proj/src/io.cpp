#include "vexlab/io.hpp"

#include <fstream>

namespace vexlab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

json read_header(std::ifstream& f, const std::string& path) {
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("missing header: " + path);
  return json::parse(line);
}

}  // namespace

json grid_to_json(const Grid& g) {
  return json{{"n", g.n},
              {"lo", {g.lo[0], g.lo[1], g.lo[2]}},
              {"hi", {g.hi[0], g.hi[1], g.hi[2]}},
              {"h", g.h},
              {"dims", {g.dims[0], g.dims[1], g.dims[2]}}};
}

Grid grid_from_json(const json& j) {
  Vec lo{j["lo"][0], j["lo"][1], j["lo"][2]};
  Vec hi{j["hi"][0], j["hi"][1], j["hi"][2]};
  Grid g(j["n"].get<int>(), lo, hi, j["h"].get<double>());
  json dims = j["dims"];
  for (int d = 0; d < 3; ++d)
    if (g.dims[d] != dims[d].get<int>())
      throw std::runtime_error("grid dims mismatch in header");
  return g;
}

void save_mask(const std::string& path, const DomainMask& mask) {
  auto f = open_out(path);
  json h = grid_to_json(mask.grid);
  h["kind"] = "mask";
  f << h.dump() << "\n";
  std::size_t nc = mask.grid.cell_count();
  std::vector<std::uint8_t> packed((nc + 7) / 8, 0);
  for (std::size_t id = 0; id < nc; ++id)
    if (mask.inside[id]) packed[id / 8] |= std::uint8_t(1u << (id % 8));
  f.write(reinterpret_cast<const char*>(packed.data()), std::streamsize(packed.size()));
}

MaskPtr load_mask(const std::string& path) {
  auto f = open_in(path);
  json h = read_header(f, path);
  if (h.value("kind", "") != "mask") throw std::runtime_error("not a mask file: " + path);
  auto m = std::make_shared<DomainMask>();
  m->grid = grid_from_json(h);
  std::size_t nc = m->grid.cell_count();
  std::vector<std::uint8_t> packed((nc + 7) / 8, 0);
  f.read(reinterpret_cast<char*>(packed.data()), std::streamsize(packed.size()));
  if (std::size_t(f.gcount()) != packed.size())
    throw std::runtime_error("truncated mask blob: " + path);
  m->inside.assign(nc, 0);
  for (std::size_t id = 0; id < nc; ++id)
    m->inside[id] = (packed[id / 8] >> (id % 8)) & 1u;
  m->finalize();
  return m;
}

void save_field(const std::string& path, const Grid& g, const std::vector<double>& v) {
  if (v.size() != g.cell_count())
    throw std::invalid_argument("save_field: value size does not match the grid");
  auto f = open_out(path);
  json h = grid_to_json(g);
  h["kind"] = "field";
  f << h.dump() << "\n";
  f.write(reinterpret_cast<const char*>(v.data()),
          std::streamsize(v.size() * sizeof(double)));
}

std::pair<Grid, std::vector<double>> load_field(const std::string& path) {
  auto f = open_in(path);
  json h = read_header(f, path);
  if (h.value("kind", "") != "field")
    throw std::runtime_error("not a field file: " + path);
  Grid g = grid_from_json(h);
  std::vector<double> v(g.cell_count());
  f.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
  if (std::size_t(f.gcount()) != v.size() * sizeof(double))
    throw std::runtime_error("truncated field blob: " + path);
  return {g, std::move(v)};
}

void save_grid_function(const std::string& path, const GridFunction& f) {
  save_field(path, f.mask->grid, f.v);
}

GridFunction load_grid_function(const std::string& path, const MaskPtr& mask) {
  auto [g, v] = load_field(path);
  if (g.cell_count() != mask->grid.cell_count())
    throw std::runtime_error("field/mask grid mismatch: " + path);
  GridFunction out(mask);
  out.v = std::move(v);
  return out;
}

void save_measure(const std::string& path, const RadonMeasure& mu,
                  const std::string& density_path) {
  json j;
  j["atoms"] = json::array();
  for (const auto& a : mu.atoms)
    j["atoms"].push_back({a.point[0], a.point[1], a.point[2], a.mass});
  if (mu.density) {
    if (density_path.empty())
      throw std::invalid_argument("save_measure: density present but no density path");
    save_grid_function(density_path, *mu.density);
    j["density"] = density_path;
  }
  write_text(path, j.dump(2) + "\n");
}

RadonMeasure load_measure(const std::string& path, const MaskPtr& density_mask) {
  json j = json::parse(read_text(path));
  RadonMeasure mu;
  for (const auto& a : j["atoms"])
    mu.atoms.push_back({{a[0], a[1], a[2]}, a[3]});
  if (j.contains("density")) {
    if (!density_mask)
      throw std::invalid_argument("load_measure: density requires a mask");
    mu.density = load_grid_function(j["density"].get<std::string>(), density_mask);
  }
  return mu;
}

void save_exponent(const std::string& path, const ExponentField& p) {
  auto f = open_out(path);
  json h = grid_to_json(p.grid);
  h["kind"] = "field";
  h["family"] = "exponent";
  h["gamma_lo"] = p.gamma_lo;
  h["gamma_hi"] = p.gamma_hi;
  h["modulus"] = json::array();
  for (const auto& [r, w] : p.modulus) h["modulus"].push_back({r, w});
  f << h.dump() << "\n";
  f.write(reinterpret_cast<const char*>(p.v.data()),
          std::streamsize(p.v.size() * sizeof(double)));
}

ExponentField load_exponent(const std::string& path) {
  auto f = open_in(path);
  json h = read_header(f, path);
  Grid g = grid_from_json(h);
  std::vector<double> v(g.cell_count());
  f.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
  if (std::size_t(f.gcount()) != v.size() * sizeof(double))
    throw std::runtime_error("truncated exponent blob: " + path);
  std::vector<std::pair<double, double>> mod;
  for (const auto& e : h.value("modulus", json::array())) mod.push_back({e[0], e[1]});
  return ExponentField::from(
      g, [&g, &v](const Vec& x) { return v[std::size_t(g.locate(x))]; },
      h.value("gamma_lo", 1.0), h.value("gamma_hi", 100.0), mod);
}

void save_weight(const std::string& path, const WeightField& w) {
  auto f = open_out(path);
  json h = grid_to_json(w.grid);
  h["kind"] = "field";
  h["family"] = w.family;
  f << h.dump() << "\n";
  f.write(reinterpret_cast<const char*>(w.v.data()),
          std::streamsize(w.v.size() * sizeof(double)));
}

WeightField load_weight(const std::string& path) {
  auto f = open_in(path);
  json h = read_header(f, path);
  WeightField w;
  w.grid = grid_from_json(h);
  w.family = h.value("family", "custom");
  w.v.resize(w.grid.cell_count());
  f.read(reinterpret_cast<char*>(w.v.data()),
         std::streamsize(w.v.size() * sizeof(double)));
  if (std::size_t(f.gcount()) != w.v.size() * sizeof(double))
    throw std::runtime_error("truncated weight blob: " + path);
  return w;
}

json to_json(const ReifenbergCertificate& c) {
  json samples = json::array();
  for (const auto& s : c.samples)
    samples.push_back({{"point", {s.point[0], s.point[1], s.point[2]}},
                       {"radius", s.radius},
                       {"normal", {s.normal[0], s.normal[1], s.normal[2]}},
                       {"deviation", s.deviation}});
  return json{{"delta", c.delta}, {"R0", c.R0}, {"samples", samples}};
}

json to_json(const LogHolderReport& r) {
  return json{{"bound", r.bound},
              {"R_omega", r.R_omega},
              {"dominated", r.dominated},
              {"worst_excess", r.worst_excess}};
}

json to_json(const StructureReport& r) {
  return json{{"Lambda1_fit", r.Lambda1_fit},
              {"Lambda2_fit", r.Lambda2_fit},
              {"Lambda1_sum", r.Lambda1_sum},
              {"monotone", r.monotone}};
}

json to_json(const AInftyConstants& c) {
  return json{{"kappa_w", c.kappa_w},
              {"c_w", c.c_w},
              {"sample_count", c.sample_count},
              {"max_residual", c.max_residual},
              {"ok", c.ok}};
}

json to_json(const SolveResult& r) {
  return json{{"iterations", r.iterations},
              {"residual", r.residual},
              {"converged", r.converged},
              {"sigma_floored", r.sigma_floored},
              {"energy_trace", r.energy_trace}};
}

json to_json(const CascadeResult& r) {
  return json{{"F_value", r.F_value},
              {"p1", r.p1},
              {"p2", r.p2},
              {"du_mean", r.du_mean},
              {"ratio_du_w", r.ratio_du_w},
              {"ratio_hw", r.ratio_hw},
              {"ratio_linf", r.ratio_linf},
              {"ratio_vh", r.ratio_vh},
              {"sandwich_ok", r.sandwich_ok},
              {"complete", r.complete},
              {"w", to_json(r.w)},
              {"h", to_json(r.h)},
              {"v", to_json(r.v)}};
}

json to_json(const LevelSetReport& r) {
  return json{{"lambdas", r.lambdas},
              {"wE", r.wE},
              {"wG", r.wG},
              {"B_fit", r.B_fit},
              {"inclusion_ok", r.inclusion_ok},
              {"monotone_ok", r.monotone_ok},
              {"all_empty", r.all_empty},
              {"direct", r.direct},
              {"layercake", r.layercake}};
}

json to_json(const EstimateReport& r) {
  return json{{"name", r.name}, {"lhs", r.lhs},         {"rhs", r.rhs},
              {"ratio", r.ratio}, {"skipped", r.skipped}, {"reason", r.reason}};
}

void write_text(const std::string& path, const std::string& content) {
  auto f = open_out(path);
  f << content;
}

std::string read_text(const std::string& path) {
  auto f = open_in(path);
  std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return s;
}

}  // namespace vexlab
