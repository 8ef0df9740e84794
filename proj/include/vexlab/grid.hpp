#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace vexlab {

using Vec = std::array<double, 3>;

inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator*(double t, const Vec& a) { return {t * a[0], t * a[1], t * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Uniform Cartesian grid over a bounding box. For n = 2 the third axis
/// collapses to a single cell.
struct Grid {
  int n = 2;
  Vec lo{0, 0, 0};
  Vec hi{1, 1, 1};
  double h = 1.0 / 64;
  std::array<int, 3> dims{0, 0, 1};

  Grid() = default;
  Grid(int n_, const Vec& lo_, const Vec& hi_, double h_);

  std::size_t cell_count() const {
    return std::size_t(dims[0]) * std::size_t(dims[1]) * std::size_t(dims[2]);
  }
  double cell_volume() const { return std::pow(h, n); }

  std::size_t index(int i, int j, int k = 0) const {
    return (std::size_t(k) * dims[1] + j) * dims[0] + i;
  }
  std::array<int, 3> decode(std::size_t id) const {
    int i = int(id % dims[0]);
    int j = int((id / dims[0]) % dims[1]);
    int k = int(id / (std::size_t(dims[0]) * dims[1]));
    return {i, j, k};
  }
  Vec cell_center(std::size_t id) const {
    auto c = decode(id);
    Vec x{lo[0] + (c[0] + 0.5) * h, lo[1] + (c[1] + 0.5) * h, 0.0};
    if (n == 3) x[2] = lo[2] + (c[2] + 0.5) * h;
    return x;
  }
  bool in_bounds(int i, int j, int k = 0) const {
    return i >= 0 && i < dims[0] && j >= 0 && j < dims[1] && k >= 0 && k < dims[2];
  }
  /// Cell containing x, or -1 if outside the box.
  long long locate(const Vec& x) const;
};

/// Discretized bounded open set: boolean inside field plus boundary metadata.
struct DomainMask {
  Grid grid;
  std::vector<std::uint8_t> inside;         // one byte per cell
  std::vector<std::size_t> boundary_cells;  // inside cells with an outside face-neighbor
  double diameter = 0;

  bool is_inside(std::size_t id) const { return inside[id] != 0; }
  bool is_inside(int i, int j, int k = 0) const {
    return grid.in_bounds(i, j, k) && inside[grid.index(i, j, k)] != 0;
  }
  std::size_t inside_count() const;
  double volume() const { return double(inside_count()) * grid.cell_volume(); }

  /// Recomputes boundary_cells and diameter from the inside field.
  void finalize();
};

using MaskPtr = std::shared_ptr<const DomainMask>;

/// All-cells rectangle mask over the given box.
MaskPtr make_rect_domain(int n, const Vec& lo, const Vec& hi, double h);

/// Rectangle whose lower (y = lo[1]) boundary is replaced by a triangle-wave
/// profile of peak height amplitude*period. amplitude = 0 reproduces the
/// rectangle exactly. 2-D only.
MaskPtr make_sawtooth_domain(const Vec& lo, const Vec& hi, double h, double amplitude,
                             double period);

/// Cells whose centers lie in the disk/ball |x - center| < radius.
MaskPtr make_disk_domain(int n, const Vec& center, double radius, double h, double pad = 0.0);

/// |B_r(x)| / |B_r(x) ∩ Ω| by cell counting. Throws if the intersection is
/// empty on the grid.
double density_ratio(const DomainMask& mask, const Vec& x, double r);

}  // namespace vexlab
