#include "pff/mesh.hpp"

#include <algorithm>

#include "pff/error.hpp"

namespace pff {

ElementKind Mesh::element_kind() const {
  if (elements.empty()) return dimension == 3 ? ElementKind::Hex8 : ElementKind::Quad4PlaneStrain;
  return elements.front().kind;
}

NodeCoords Mesh::element_coords(std::size_t e) const {
  const Element& el = elements[e];
  const int nn = nodes_per_element(el.kind);
  NodeCoords X(nn, 3);
  for (int a = 0; a < nn; ++a)
    for (int d = 0; d < 3; ++d) X(a, d) = nodes[el.nodes[a]][d];
  return X;
}

const IndexSet& Mesh::node_set(const std::string& name) const {
  const auto it = node_sets.find(name);
  if (it == node_sets.end()) throw InvalidArgument("unknown node set '" + name + "'");
  return it->second;
}

void Mesh::validate() const {
  std::vector<std::string> problems;
  if (dimension != 2 && dimension != 3) problems.push_back("dimension must be 2 or 3");
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const Element& el = elements[e];
    if (dimension_of(el.kind) != dimension)
      problems.push_back("element " + std::to_string(e) + " is " + std::string(to_string(el.kind)) +
                         " in a " + std::to_string(dimension) + "D mesh");
    if (el.kind != elements.front().kind)
      problems.push_back("element " + std::to_string(e) + " mixes element kinds");
    bool in_range = true;
    for (std::size_t n : el.connectivity()) {
      if (n >= nodes.size()) {
        problems.push_back("element " + std::to_string(e) + " references node " + std::to_string(n) +
                           " but the mesh has " + std::to_string(nodes.size()) + " nodes");
        in_range = false;
      }
    }
    if (in_range && dimension_of(el.kind) == dimension) {
      try {
        element_geometry(el.kind, element_coords(e), e);
      } catch (const InvertedElementError& err) {
        problems.push_back(err.what());
      }
    }
  }
  for (const auto& [name, set] : node_sets) {
    for (std::size_t n : set)
      if (n >= nodes.size())
        problems.push_back("node set '" + name + "' references node " + std::to_string(n) +
                           " but the mesh has " + std::to_string(nodes.size()) + " nodes");
  }
  for (const auto& [name, set] : element_sets) {
    for (std::size_t e : set)
      if (e >= elements.size())
        problems.push_back("element set '" + name + "' references element " + std::to_string(e) +
                           " but the mesh has " + std::to_string(elements.size()) + " elements");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

double Mesh::volume() const {
  double v = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const ElementGeometry geo = element_geometry(elements[e].kind, element_coords(e), e);
    for (const auto& pt : geo.points) v += pt.dV;
  }
  return v;
}

}  // namespace pff
