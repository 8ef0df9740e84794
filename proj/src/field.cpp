#include "vexlab/field.hpp"

namespace vexlab {

namespace {

GradientField gradient_impl(const GridFunction& u,
                            const std::function<double(std::size_t)>* outside) {
  const DomainMask& m = *u.mask;
  const Grid& g = m.grid;
  GradientField out;
  out.mask = u.mask;
  for (int d = 0; d < g.n; ++d) out.comp[d].assign(g.cell_count(), 0.0);
  if (g.n == 2) out.comp[2].assign(g.cell_count(), 0.0);

  auto value = [&](int i, int j, int k, bool& ok) -> double {
    if (m.is_inside(i, j, k)) {
      ok = true;
      return u.v[g.index(i, j, k)];
    }
    if (outside && g.in_bounds(i, j, k)) {
      ok = true;
      return (*outside)(g.index(i, j, k));
    }
    ok = false;
    return 0.0;
  };

  for (std::size_t id = 0; id < g.cell_count(); ++id) {
    if (!m.is_inside(id)) continue;
    auto c = g.decode(id);
    for (int d = 0; d < g.n; ++d) {
      int ip[3] = {c[0], c[1], c[2]}, im[3] = {c[0], c[1], c[2]};
      ip[d] += 1;
      im[d] -= 1;
      bool okp = false, okm = false;
      double vp = value(ip[0], ip[1], ip[2], okp);
      double vm = value(im[0], im[1], im[2], okm);
      double vc = u.v[id];
      double der = 0;
      if (okp && okm)
        der = (vp - vm) / (2 * g.h);
      else if (okp)
        der = (vp - vc) / g.h;
      else if (okm)
        der = (vc - vm) / g.h;
      out.comp[d][id] = der;
    }
  }
  return out;
}

}  // namespace

GradientField gradient(const GridFunction& u) { return gradient_impl(u, nullptr); }

GradientField gradient_with_data(const GridFunction& u,
                                 const std::function<double(std::size_t)>& outside) {
  return gradient_impl(u, &outside);
}

}  // namespace vexlab
