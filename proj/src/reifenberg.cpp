#include "vexlab/reifenberg.hpp"

#include <algorithm>
#include <cmath>

namespace vexlab {

namespace {

std::vector<Vec> direction_set(int n, int n_dirs) {
  std::vector<Vec> dirs;
  dirs.reserve(n_dirs);
  if (n == 2) {
    for (int i = 0; i < n_dirs; ++i) {
      double a = 2.0 * M_PI * i / n_dirs;
      dirs.push_back({std::cos(a), std::sin(a), 0.0});
    }
  } else {
    // Fibonacci sphere
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_dirs; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / n_dirs;
      double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      double a = ga * i;
      dirs.push_back({rad * std::cos(a), rad * std::sin(a), z});
    }
  }
  return dirs;
}

}  // namespace

ReifenbergCertificate certify_reifenberg(const DomainMask& mask, double R0, int n_dirs,
                                         int n_radii, int max_boundary_samples) {
  const Grid& g = mask.grid;
  if (mask.boundary_cells.empty()) throw std::invalid_argument("certify_reifenberg: no boundary cells");
  if (R0 > mask.diameter) throw std::invalid_argument("certify_reifenberg: R0 exceeds diameter");
  if (R0 < 4 * g.h) throw std::invalid_argument("certify_reifenberg: R0 < 4h, resolution insufficient");
  if (g.n == 2 && n_dirs < 16) throw std::invalid_argument("certify_reifenberg: need n_dirs >= 16");
  if (n_radii < 1) throw std::invalid_argument("certify_reifenberg: need n_radii >= 1");

  const auto dirs = direction_set(g.n, n_dirs);

  // Geometric radii with both endpoints [4h, R0] included.
  std::vector<double> radii;
  double rmin = std::min(4 * g.h, R0);
  if (n_radii == 1 || rmin >= R0) {
    radii.push_back(R0);
  } else {
    for (int i = 0; i < n_radii; ++i)
      radii.push_back(R0 * std::pow(rmin / R0, double(i) / (n_radii - 1)));
  }

  // Evenly strided sample of the observable boundary: cells with an in-grid
  // complement neighbor. Cells touching only the grid edge have no recorded
  // complement to measure flatness against and are skipped (a domain filling
  // its bounding box is certified flat there).
  std::vector<std::size_t> observable;
  for (std::size_t id : mask.boundary_cells) {
    auto c = g.decode(id);
    bool seen = false;
    for (int d = 0; d < g.n && !seen; ++d)
      for (int s = -1; s <= 1 && !seen; s += 2) {
        int i = c[0] + (d == 0 ? s : 0), j = c[1] + (d == 1 ? s : 0),
            k = c[2] + (d == 2 ? s : 0);
        if (g.in_bounds(i, j, k) && !mask.is_inside(i, j, k)) seen = true;
      }
    if (seen) observable.push_back(id);
  }
  std::vector<std::size_t> pts;
  std::size_t nb = observable.size();
  std::size_t stride = std::max<std::size_t>(1, nb / std::size_t(max_boundary_samples));
  for (std::size_t i = 0; i < nb; i += stride) pts.push_back(observable[i]);

  ReifenbergCertificate cert;
  cert.R0 = R0;
  for (std::size_t pid : pts) {
    Vec x = g.cell_center(pid);
    for (double r : radii) {
      // Collect signed cell centers in B_r(x). Cells beyond the grid are
      // unobserved, not complement: the certificate measures flatness against
      // the recorded mask only, so a domain that fills its bounding box shows
      // no artificial corner at the box edge.
      std::vector<Vec> rel_in, rel_out;
      int rad = int(std::ceil(r / g.h)) + 1;
      auto c0 = g.decode(pid);
      int klo = g.n == 3 ? c0[2] - rad : 0, khi = g.n == 3 ? c0[2] + rad : 0;
      for (int k = klo; k <= khi; ++k)
        for (int j = c0[1] - rad; j <= c0[1] + rad; ++j)
          for (int i = c0[0] - rad; i <= c0[0] + rad; ++i) {
            if (i < 0 || i >= g.dims[0] || j < 0 || j >= g.dims[1]) continue;
            if (g.n == 3 && (k < 0 || k >= g.dims[2])) continue;
            Vec y{g.lo[0] + (i + 0.5) * g.h, g.lo[1] + (j + 0.5) * g.h,
                  g.n == 3 ? g.lo[2] + (k + 0.5) * g.h : 0.0};
            Vec rel = y - x;
            if (norm(rel) >= r) continue;
            if (mask.is_inside(i, j, k))
              rel_in.push_back(rel);
            else
              rel_out.push_back(rel);
          }
      double best = 1e300;
      Vec best_dir{0, 1, 0};
      for (const Vec& d : dirs) {
        double dev = 0;
        // inside cells must satisfy y·d > -delta r
        for (const Vec& y : rel_in) dev = std::max(dev, -dot(y, d));
        // cells of the complement must satisfy y·d <= delta r
        for (const Vec& y : rel_out) dev = std::max(dev, dot(y, d));
        dev /= r;
        if (dev < best) {
          best = dev;
          best_dir = d;
        }
      }
      cert.samples.push_back({x, r, best_dir, best});
      cert.delta = std::max(cert.delta, best);
    }
  }
  return cert;
}

}  // namespace vexlab
