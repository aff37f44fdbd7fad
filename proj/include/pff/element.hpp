#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "pff/constitutive.hpp"

namespace pff {

/// Bilinear plane-strain quadrilateral or trilinear hexahedron, both fully
/// integrated (2x2 and 2x2x2 Gauss points).
enum class ElementKind { Quad4PlaneStrain, Hex8 };

constexpr int nodes_per_element(ElementKind k) { return k == ElementKind::Quad4PlaneStrain ? 4 : 8; }
constexpr int dimension_of(ElementKind k) { return k == ElementKind::Quad4PlaneStrain ? 2 : 3; }
constexpr int points_per_element(ElementKind k) { return k == ElementKind::Quad4PlaneStrain ? 4 : 8; }
/// Rows of the Voigt vector that an element kind carries in its B matrix.
constexpr int strain_components(ElementKind k) { return k == ElementKind::Quad4PlaneStrain ? 3 : 6; }

std::string_view to_string(ElementKind k);

inline constexpr int kMaxNodes = 8;
inline constexpr int kMaxDofs = 24;

// Small fixed-capacity Eigen types keep the element kernels heap free.
using NodeVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxNodes, 1>;
using ShapeGradient = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxNodes, 3>;
using ElementVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDofs, 1>;
using ElementMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDofs, kMaxDofs>;
using NodeCoords = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxNodes, 3>;

struct QuadraturePoint {
  std::array<double, 3> xi;
  double weight;
};

using QuadratureRule = std::vector<QuadraturePoint>;

const QuadratureRule& gauss_rule(ElementKind kind);

struct ShapeValues {
  NodeVector N;
  ShapeGradient dN_dxi;  // nodes x dimension
};

ShapeValues shape_functions(ElementKind kind, std::span<const double> xi);

/// Natural coordinates of the element's nodes.
std::array<double, 3> node_natural_coords(ElementKind kind, int node);

/// Cached kinematics of one quadrature point in physical coordinates.
struct PointGeometry {
  NodeVector N;
  ShapeGradient dN_dx;
  double dV;
};

struct ElementGeometry {
  ElementKind kind;
  std::vector<PointGeometry> points;
};

/// Throws InvertedElementError (naming `element_id`) when det J <= 0 at any
/// quadrature point.
ElementGeometry element_geometry(ElementKind kind, const NodeCoords& coords, std::size_t element_id = 0);

/// Engineering strain at a point from the element displacement vector
/// (node-major, `dimension_of(kind)` components per node).
StrainTensor point_strain(const ElementGeometry& geo, const PointGeometry& pt,
                          std::span<const double> u_e);

struct DisplacementSystem {
  ElementMatrix K;
  ElementVector R;
  std::array<double, kMaxNodes> psi_plus{};
  std::array<double, kMaxNodes> psi_minus{};
  double elastic_energy = 0.0;
};

/// R = int B^T sigma dV and K = int B^T C B dV with phi interpolated at the
/// quadrature points. The per-point psi+ values are the history candidates.
void element_displacement_system(const ElementGeometry& geo, std::span<const double> u_e,
                                 std::span<const double> phi_e, const MaterialModel& model,
                                 bool with_tangent, DisplacementSystem& out);

struct PhaseSystem {
  ElementMatrix K;
  ElementVector R;
  double fracture_energy = 0.0;
  ElementVector scale;  // int (Gc/l + 2 H) N dV, magnitude of the reaction term
};

/// R_i = int [Gc ell grad N_i . grad phi + (Gc/ell + 2H) N_i phi - 2H N_i] dV,
/// K   = int [Gc ell grad N^T grad N + (Gc/ell + 2H) N^T N] dV.
void element_phase_system(const ElementGeometry& geo, std::span<const double> phi_e,
                          std::span<const double> history, const FractureProps& frac,
                          PhaseSystem& out);

}  // namespace pff
