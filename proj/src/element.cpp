#include "pff/element.hpp"

#include <cmath>

#include "pff/error.hpp"

namespace pff {

namespace {

constexpr int kQuadNodes[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
constexpr int kHexNodes[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                 {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

// Voigt rows kept by plane strain: xx, yy, xy.
constexpr int kPlaneRows[3] = {0, 1, 3};

QuadratureRule make_rule(ElementKind kind) {
  const double p = 1.0 / std::sqrt(3.0);
  QuadratureRule rule;
  if (kind == ElementKind::Quad4PlaneStrain) {
    for (const auto& n : kQuadNodes) rule.push_back({{n[0] * p, n[1] * p, 0.0}, 1.0});
  } else {
    for (const auto& n : kHexNodes) rule.push_back({{n[0] * p, n[1] * p, n[2] * p}, 1.0});
  }
  return rule;
}

using BMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, kMaxDofs>;

BMatrix strain_displacement(ElementKind kind, const ShapeGradient& dN) {
  const int nn = nodes_per_element(kind);
  const int dim = dimension_of(kind);
  BMatrix B = BMatrix::Zero(strain_components(kind), nn * dim);
  for (int a = 0; a < nn; ++a) {
    if (dim == 2) {
      const double dx = dN(a, 0), dy = dN(a, 1);
      B(0, 2 * a) = dx;
      B(1, 2 * a + 1) = dy;
      B(2, 2 * a) = dy;
      B(2, 2 * a + 1) = dx;
    } else {
      const double dx = dN(a, 0), dy = dN(a, 1), dz = dN(a, 2);
      const int c = 3 * a;
      B(0, c) = dx;
      B(1, c + 1) = dy;
      B(2, c + 2) = dz;
      B(3, c) = dy;
      B(3, c + 1) = dx;
      B(4, c) = dz;
      B(4, c + 2) = dx;
      B(5, c + 1) = dz;
      B(5, c + 2) = dy;
    }
  }
  return B;
}

}  // namespace

std::string_view to_string(ElementKind k) {
  return k == ElementKind::Quad4PlaneStrain ? "quad4" : "hex8";
}

const QuadratureRule& gauss_rule(ElementKind kind) {
  static const QuadratureRule quad = make_rule(ElementKind::Quad4PlaneStrain);
  static const QuadratureRule hex = make_rule(ElementKind::Hex8);
  return kind == ElementKind::Quad4PlaneStrain ? quad : hex;
}

std::array<double, 3> node_natural_coords(ElementKind kind, int node) {
  if (kind == ElementKind::Quad4PlaneStrain)
    return {double(kQuadNodes[node][0]), double(kQuadNodes[node][1]), 0.0};
  return {double(kHexNodes[node][0]), double(kHexNodes[node][1]), double(kHexNodes[node][2])};
}

ShapeValues shape_functions(ElementKind kind, std::span<const double> xi) {
  ShapeValues s;
  const int nn = nodes_per_element(kind);
  const int dim = dimension_of(kind);
  s.N.resize(nn);
  s.dN_dxi.resize(nn, dim);
  if (kind == ElementKind::Quad4PlaneStrain) {
    for (int a = 0; a < 4; ++a) {
      const double xa = kQuadNodes[a][0], ya = kQuadNodes[a][1];
      s.N(a) = 0.25 * (1 + xa * xi[0]) * (1 + ya * xi[1]);
      s.dN_dxi(a, 0) = 0.25 * xa * (1 + ya * xi[1]);
      s.dN_dxi(a, 1) = 0.25 * ya * (1 + xa * xi[0]);
    }
  } else {
    for (int a = 0; a < 8; ++a) {
      const double xa = kHexNodes[a][0], ya = kHexNodes[a][1], za = kHexNodes[a][2];
      const double fx = 1 + xa * xi[0], fy = 1 + ya * xi[1], fz = 1 + za * xi[2];
      s.N(a) = 0.125 * fx * fy * fz;
      s.dN_dxi(a, 0) = 0.125 * xa * fy * fz;
      s.dN_dxi(a, 1) = 0.125 * ya * fx * fz;
      s.dN_dxi(a, 2) = 0.125 * za * fx * fy;
    }
  }
  return s;
}

ElementGeometry element_geometry(ElementKind kind, const NodeCoords& coords, std::size_t element_id) {
  const int dim = dimension_of(kind);
  ElementGeometry geo{kind, {}};
  for (const auto& qp : gauss_rule(kind)) {
    const ShapeValues s = shape_functions(kind, qp.xi);
    // J(i, j) = d x_j / d xi_i
    const Eigen::MatrixXd J = s.dN_dxi.transpose() * coords.leftCols(dim);
    const double det = J.determinant();
    if (!(det > 0.0)) throw InvertedElementError(element_id, det);
    PointGeometry pt;
    pt.N = s.N;
    pt.dN_dx = (J.inverse() * s.dN_dxi.transpose()).transpose();
    pt.dV = det * qp.weight;
    geo.points.push_back(std::move(pt));
  }
  return geo;
}

StrainTensor point_strain(const ElementGeometry& geo, const PointGeometry& pt,
                          std::span<const double> u_e) {
  const BMatrix B = strain_displacement(geo.kind, pt.dN_dx);
  const Eigen::Map<const Eigen::VectorXd> u(u_e.data(), static_cast<Eigen::Index>(u_e.size()));
  const Eigen::VectorXd e = B * u;
  if (geo.kind == ElementKind::Quad4PlaneStrain) return StrainTensor::plane(e(0), e(1), e(2));
  Voigt6 v;
  v << e(0), e(1), e(2), e(3), e(4), e(5);
  return StrainTensor::from_voigt(v);
}

void element_displacement_system(const ElementGeometry& geo, std::span<const double> u_e,
                                 std::span<const double> phi_e, const MaterialModel& model,
                                 bool with_tangent, DisplacementSystem& out) {
  const ElementKind kind = geo.kind;
  const int nn = nodes_per_element(kind);
  const int ndof = nn * dimension_of(kind);
  const int nc = strain_components(kind);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDofs, 1>> u(
      u_e.data(), ndof);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxNodes, 1>> phi(
      phi_e.data(), nn);

  out.R.setZero(ndof);
  if (with_tangent) out.K.setZero(ndof, ndof);
  out.elastic_energy = 0.0;

  for (std::size_t q = 0; q < geo.points.size(); ++q) {
    const PointGeometry& pt = geo.points[q];
    const BMatrix B = strain_displacement(kind, pt.dN_dx);
    const Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1> e = B * u;
    StrainTensor eps;
    if (nc == 3) {
      eps = StrainTensor::plane(e(0), e(1), e(2));
    } else {
      Voigt6 v;
      v << e(0), e(1), e(2), e(3), e(4), e(5);
      eps = StrainTensor::from_voigt(v);
    }
    const double phi_q = pt.N.dot(phi);
    const PointConstitutiveOutput c = stress_and_tangent(eps, phi_q, model);

    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1> sigma(nc);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6> D(nc, nc);
    if (nc == 3) {
      for (int i = 0; i < 3; ++i) {
        sigma(i) = c.stress(kPlaneRows[i]);
        for (int j = 0; j < 3; ++j) D(i, j) = c.tangent(kPlaneRows[i], kPlaneRows[j]);
      }
    } else {
      sigma = c.stress;
      D = c.tangent;
    }
    out.R.noalias() += pt.dV * (B.transpose() * sigma);
    if (with_tangent) out.K.noalias() += pt.dV * (B.transpose() * D * B);
    out.psi_plus[q] = c.psi_plus;
    out.psi_minus[q] = c.psi_minus;
    out.elastic_energy += pt.dV * c.energy;
  }
}

void element_phase_system(const ElementGeometry& geo, std::span<const double> phi_e,
                          std::span<const double> history, const FractureProps& frac,
                          PhaseSystem& out) {
  const int nn = nodes_per_element(geo.kind);
  const double Gc = frac.Gc(), ell = frac.ell();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxNodes, 1>> phi(
      phi_e.data(), nn);

  out.K.setZero(nn, nn);
  out.R.setZero(nn);
  out.scale.setZero(nn);
  out.fracture_energy = 0.0;

  for (std::size_t q = 0; q < geo.points.size(); ++q) {
    const PointGeometry& pt = geo.points[q];
    const double H = history[q];
    const double phi_q = pt.N.dot(phi);
    const Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, 3> grad = phi.transpose() * pt.dN_dx;
    const double reaction = Gc / ell + 2.0 * H;

    out.K.noalias() += pt.dV * (Gc * ell * pt.dN_dx * pt.dN_dx.transpose() + reaction * pt.N * pt.N.transpose());
    out.R.noalias() += pt.dV * (Gc * ell * pt.dN_dx * grad.transpose() + (reaction * phi_q - 2.0 * H) * pt.N);
    out.scale.noalias() += pt.dV * reaction * pt.N;

    const std::span<const double> g(grad.data(), static_cast<std::size_t>(grad.size()));
    out.fracture_energy += pt.dV * Gc * crack_density(phi_q, g, ell);
  }
}

}  // namespace pff
