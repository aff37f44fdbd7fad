#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pff/element.hpp"

namespace pff {

struct Element {
  ElementKind kind = ElementKind::Quad4PlaneStrain;
  std::array<std::size_t, kMaxNodes> nodes{};

  std::span<const std::size_t> connectivity() const {
    return {nodes.data(), static_cast<std::size_t>(nodes_per_element(kind))};
  }
  bool operator==(const Element&) const = default;
};

using IndexSet = std::vector<std::size_t>;

/// Discretized domain in mm. Coordinates are stored as 3-vectors; 2D meshes
/// keep z = 0. Sets are keyed by name, which makes names unique.
struct Mesh {
  int dimension = 2;
  std::vector<std::array<double, 3>> nodes;
  std::vector<Element> elements;
  std::map<std::string, IndexSet> node_sets;
  std::map<std::string, IndexSet> element_sets;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_elements() const { return elements.size(); }
  ElementKind element_kind() const;

  /// Coordinates of an element's nodes, one row per node.
  NodeCoords element_coords(std::size_t e) const;

  const IndexSet& node_set(const std::string& name) const;

  /// Collects every problem (index range, mixed kinds, dimension mismatch,
  /// inverted elements) and throws a single ValidationError.
  void validate() const;

  /// Sum of element volumes (areas in 2D) by quadrature.
  double volume() const;

  bool operator==(const Mesh&) const = default;
};

}  // namespace pff
