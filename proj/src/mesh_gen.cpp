#include <algorithm>
#include <cmath>

#include "pff/error.hpp"
#include "pff/mesh_io.hpp"

namespace pff {

std::vector<double> graded_axis(const std::vector<double>& breakpoints, double fine_a, double fine_b, double h,
                                double h_coarse, double growth) {
  if (breakpoints.size() < 2) throw InvalidArgument("graded axis needs at least two breakpoints");
  // Cell size as a function of the distance d from the fine interval; the
  // linear law is the continuous form of a geometric progression.
  auto size_at = [&](double x) {
    const double d = x < fine_a ? fine_a - x : x > fine_b ? x - fine_b : 0.0;
    return std::min(h_coarse, h + (growth - 1.0) * d);
  };
  std::vector<double> axis{breakpoints.front()};
  for (std::size_t s = 1; s < breakpoints.size(); ++s) {
    const double a = breakpoints[s - 1], b = breakpoints[s];
    if (!(b > a)) throw InvalidArgument("graded axis breakpoints must be strictly increasing");
    std::vector<double> sizes;
    double x = a;
    while (x < b - 1e-12 * (b - a)) {
      double c = size_at(x);
      c = size_at(x + 0.5 * c);
      c = size_at(x + 0.5 * c);
      sizes.push_back(c);
      x += c;
    }
    // Drop a last sliver shorter than half a cell, then stretch to fit.
    if (sizes.size() > 1 && x - b > 0.5 * sizes.back()) {
      x -= sizes.back();
      sizes.pop_back();
    }
    const double scale = (b - a) / (x - a);
    double pos = a;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      pos += sizes[i] * scale;
      axis.push_back(pos);
    }
    axis.push_back(b);
  }
  return axis;
}

namespace {

void add_boundary_sets(Mesh& mesh) {
  double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
  for (const auto& x : mesh.nodes)
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], x[d]);
      hi[d] = std::max(hi[d], x[d]);
    }
  const char* names2[2][2] = {{"left", "right"}, {"bottom", "top"}};
  const char* names3[3][2] = {{"xmin", "xmax"}, {"ymin", "ymax"}, {"zmin", "zmax"}};
  for (int d = 0; d < mesh.dimension; ++d) {
    const double tol = 1e-9 * std::max(1.0, hi[d] - lo[d]);
    for (int side = 0; side < 2; ++side) {
      const double v = side ? hi[d] : lo[d];
      const char* name = mesh.dimension == 2 ? names2[d][side] : names3[d][side];
      mesh.node_sets[name] = nodes_where(mesh, [&](const auto& x) { return std::abs(x[d] - v) <= tol; });
    }
  }
  IndexSet all(mesh.num_nodes());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  mesh.node_sets["all"] = all;
  IndexSet elems(mesh.num_elements());
  for (std::size_t i = 0; i < elems.size(); ++i) elems[i] = i;
  mesh.element_sets["all"] = elems;
}

std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = i == n ? b : a + (b - a) * i / n;
  return v;
}

Mesh tensor_quads(const std::vector<double>& xs, const std::vector<double>& ys) {
  Mesh mesh;
  mesh.dimension = 2;
  const std::size_t nx = xs.size(), ny = ys.size();
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) mesh.nodes.push_back({xs[i], ys[j], 0.0});
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      Element el;
      el.kind = ElementKind::Quad4PlaneStrain;
      el.nodes = {j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i};
      mesh.elements.push_back(el);
    }
  return mesh;
}

}  // namespace

Mesh generate_rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) throw InvalidArgument("invalid rectangle parameters");
  Mesh mesh = tensor_quads(uniform(x0, x1, nx), uniform(y0, y1, ny));
  add_boundary_sets(mesh);
  return mesh;
}

Mesh generate_box(double lx, double ly, double lz, int nx, int ny, int nz) {
  if (nx < 1 || ny < 1 || nz < 1 || !(lx > 0) || !(ly > 0) || !(lz > 0)) throw InvalidArgument("invalid box parameters");
  Mesh mesh;
  mesh.dimension = 3;
  const auto xs = uniform(0, lx, nx), ys = uniform(0, ly, ny), zs = uniform(0, lz, nz);
  const std::size_t px = nx + 1, py = ny + 1;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) mesh.nodes.push_back({xs[i], ys[j], zs[k]});
  auto id = [&](std::size_t i, std::size_t j, std::size_t k) { return (k * py + j) * px + i; };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        Element el;
        el.kind = ElementKind::Hex8;
        el.nodes = {id(i, j, k),         id(i + 1, j, k),         id(i + 1, j + 1, k),     id(i, j + 1, k),
                    id(i, j, k + 1),     id(i + 1, j, k + 1),     id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)};
        mesh.elements.push_back(el);
      }
  add_boundary_sets(mesh);
  return mesh;
}

Mesh generate_notched_plate(const NotchedPlateParams& p, std::vector<std::string>* warnings) {
  std::vector<std::string> problems;
  if (!(p.h_fine > 0)) problems.push_back("h_fine must be positive");
  if (!(p.h_coarse >= p.h_fine)) problems.push_back("h_coarse must be at least h_fine");
  if (!(p.growth > 1.0)) problems.push_back("growth must exceed 1");
  if (!(p.fine_x0 >= 0 && p.fine_x0 < p.fine_x1 && p.fine_x1 <= 1))
    problems.push_back("fine_x0 < fine_x1 must lie in [0, 1]");
  if (!(p.fine_y0 >= 0 && p.fine_y0 < p.fine_y1 && p.fine_y1 <= 1))
    problems.push_back("fine_y0 < fine_y1 must lie in [0, 1]");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  if (warnings && p.ell > 0 && p.h_fine > p.max_h_over_ell * p.ell * (1 + 1e-9))
    warnings->push_back("refined element size " + std::to_string(p.h_fine) + " exceeds " +
                        std::to_string(p.max_h_over_ell) + " * ell = " + std::to_string(p.max_h_over_ell * p.ell));
  if (warnings && p.ell > 0 && p.h_coarse > std::sqrt(3.0) * p.ell)
    warnings->push_back("coarse element size " + std::to_string(p.h_coarse) + " exceeds sqrt(3) * ell = " +
                        std::to_string(std::sqrt(3.0) * p.ell) + "; the phase field may lose monotonicity far from the crack");

  const auto xs = graded_axis({0.0, 0.5, 1.0}, p.fine_x0, p.fine_x1, p.h_fine, p.h_coarse, p.growth);
  const auto ys = graded_axis({0.0, 0.5, 1.0}, p.fine_y0, p.fine_y1, p.h_fine, p.h_coarse, p.growth);
  const std::size_t ic = static_cast<std::size_t>(std::find(xs.begin(), xs.end(), 0.5) - xs.begin());
  const std::size_t jc = static_cast<std::size_t>(std::find(ys.begin(), ys.end(), 0.5) - ys.begin());
  Mesh mesh = tensor_quads(xs, ys);
  const std::size_t nx = xs.size();

  // Seam: nodes on y = 0.5 left of the tip get a twin used by the elements above.
  IndexSet lower, upper;
  std::vector<std::size_t> twin(nx, 0);
  for (std::size_t i = 0; i < ic; ++i) {
    const std::size_t n = jc * nx + i;
    twin[i] = mesh.nodes.size();
    mesh.nodes.push_back(mesh.nodes[n]);
    lower.push_back(n);
    upper.push_back(twin[i]);
  }
  for (std::size_t i = 0; i < ic; ++i) {
    Element& el = mesh.elements[jc * (nx - 1) + i];
    el.nodes[0] = twin[i];
    if (i + 1 < ic) el.nodes[1] = twin[i + 1];
  }
  add_boundary_sets(mesh);
  mesh.node_sets["crack_lower"] = lower;
  mesh.node_sets["crack_upper"] = upper;
  return mesh;
}

}  // namespace pff
