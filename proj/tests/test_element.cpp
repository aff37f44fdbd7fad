#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "pff/element.hpp"
#include "pff/error.hpp"

using namespace pff;

namespace {

NodeCoords reference_coords(ElementKind kind, double scale, oracle::Gen* jitter = nullptr) {
  const int n = nodes_per_element(kind), dim = dimension_of(kind);
  NodeCoords c(n, dim);
  for (int a = 0; a < n; ++a) {
    const auto xi = node_natural_coords(kind, a);
    for (int d = 0; d < dim; ++d) c(a, d) = scale * (0.5 * (xi[d] + 1.0)) + (jitter ? jitter->uniform(-0.1, 0.1) * scale : 0.0);
  }
  return c;
}

MaterialModel steel() { return MaterialModel{ElasticProps(210000.0, 0.3), FractureProps(2.7, 0.024)}; }

}  // namespace

TEST_CASE("shape functions form a partition of unity and interpolate nodes") {
  oracle::Gen gen(11);
  for (auto kind : {ElementKind::Quad4PlaneStrain, ElementKind::Hex8}) {
    const int n = nodes_per_element(kind), dim = dimension_of(kind);
    for (int i = 0; i < 20; ++i) {
      double xi[3] = {gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
      const ShapeValues s = shape_functions(kind, std::span<const double>(xi, dim));
      CHECK(s.N.sum() == doctest::Approx(1.0).epsilon(1e-14));
      for (int d = 0; d < dim; ++d) CHECK(std::abs(s.dN_dxi.col(d).sum()) < 1e-14);
    }
    for (int a = 0; a < n; ++a) {
      const auto xi = node_natural_coords(kind, a);
      const ShapeValues s = shape_functions(kind, std::span<const double>(xi.data(), dim));
      for (int b = 0; b < n; ++b) CHECK(s.N(b) == doctest::Approx(a == b ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("quadrature integrates the element volume") {
  oracle::Gen gen(12);
  // Parallelogram: area is |det| of the edge vectors regardless of the rule.
  NodeCoords q(4, 2);
  q << 0, 0, 2, 0.5, 2.7, 1.5, 0.7, 1.0;
  const ElementGeometry g = element_geometry(ElementKind::Quad4PlaneStrain, q);
  double area = 0;
  for (const auto& p : g.points) area += p.dV;
  CHECK(area == doctest::Approx(2.0 * 1.0 - 0.5 * 0.7));
  const ElementGeometry h = element_geometry(ElementKind::Hex8, reference_coords(ElementKind::Hex8, 0.3));
  double vol = 0;
  for (const auto& p : h.points) vol += p.dV;
  CHECK(vol == doctest::Approx(0.027));
  CHECK(gauss_rule(ElementKind::Quad4PlaneStrain).size() == 4);
  CHECK(gauss_rule(ElementKind::Hex8).size() == 8);
}

TEST_CASE("inverted elements are reported") {
  NodeCoords q(4, 2);
  q << 0, 0, 0, 1, 1, 1, 1, 0;  // clockwise
  CHECK_THROWS_AS(element_geometry(ElementKind::Quad4PlaneStrain, q, 7), InvertedElementError);
  try {
    element_geometry(ElementKind::Quad4PlaneStrain, q, 7);
  } catch (const InvertedElementError& e) {
    CHECK(e.element() == 7);
  }
}

TEST_CASE("linear displacement fields give their exact constant strain") {
  oracle::Gen gen(13);
  for (auto kind : {ElementKind::Quad4PlaneStrain, ElementKind::Hex8}) {
    const int n = nodes_per_element(kind), dim = dimension_of(kind);
    for (int trial = 0; trial < 10; ++trial) {
      const NodeCoords c = reference_coords(kind, 1.0, &gen);
      Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) grad(i, j) = gen.uniform(-1e-3, 1e-3);
      std::vector<double> u(n * dim);
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < dim; ++i) {
          u[a * dim + i] = 0.1;
          for (int j = 0; j < dim; ++j) u[a * dim + i] += grad(i, j) * c(a, j);
        }
      const Eigen::Matrix3d eps = 0.5 * (grad + grad.transpose());
      const ElementGeometry g = element_geometry(kind, c);
      for (const auto& p : g.points) {
        const StrainTensor e = point_strain(g, p, u);
        CHECK((e.matrix() - eps).norm() < 1e-13);
      }
    }
  }
}

TEST_CASE("element stiffness is symmetric with rigid body null space") {
  oracle::Gen gen(14);
  for (auto kind : {ElementKind::Quad4PlaneStrain, ElementKind::Hex8}) {
    const int n = nodes_per_element(kind), dim = dimension_of(kind);
    const ElementGeometry g = element_geometry(kind, reference_coords(kind, 0.5, &gen));
    std::vector<double> u(n * dim, 0.0), phi(n, 0.0);
    DisplacementSystem s;
    element_displacement_system(g, u, phi, steel(), true, s);
    CHECK((s.K - s.K.transpose()).norm() < 1e-12 * s.K.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(s.K));
    const int rigid = dim == 2 ? 3 : 6;
    for (int k = 0; k < rigid; ++k) CHECK(std::abs(es.eigenvalues()(k)) < 1e-9 * es.eigenvalues().maxCoeff());
    CHECK(es.eigenvalues()(rigid) > 1e-6 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("phase element with uniform phi and zero history") {
  const ElementGeometry g = element_geometry(ElementKind::Quad4PlaneStrain, reference_coords(ElementKind::Quad4PlaneStrain, 0.2));
  const FractureProps f(2.7, 0.024);
  std::vector<double> phi(4, 0.3), H(4, 0.0);
  PhaseSystem s;
  element_phase_system(g, phi, H, f, s);
  // Gradient term vanishes; the reaction term integrates N to area / 4.
  for (int a = 0; a < 4; ++a) CHECK(s.R(a) == doctest::Approx(2.7 / 0.024 * 0.3 * 0.01));
  CHECK(s.fracture_energy == doctest::Approx(2.7 * 0.09 / 0.048 * 0.04));
  CHECK((s.K - s.K.transpose()).norm() < 1e-12 * s.K.norm());
}
