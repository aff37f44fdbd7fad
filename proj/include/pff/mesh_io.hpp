#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pff/mesh.hpp"
#include "pff/solver.hpp"

namespace pff {

// Native mesh format, line oriented, 0-based indices, '#' starts a comment:
//
//   PFFMESH 1
//   DIMENSION <2|3>
//   NODES <count>
//   <x> <y> [<z>]                      one line per node
//   ELEMENTS <quad4|hex8> <count>
//   <n0> <n1> ...                      one line per element
//   NSET <name> <count>
//   <i> <i> ...                        any number of indices per line
//   ESET <name> <count>
//   <i> <i> ...
//
// NSET and ESET may repeat; names must be unique within their kind.

/// Parses a native mesh. Syntax errors throw ParseError with line and column;
/// semantic problems (index range, duplicate names, inverted elements) are
/// collected and thrown together as a ValidationError.
Mesh parse_native_mesh(std::string_view text, const std::string& source = "<input>");
std::string format_native_mesh(const Mesh& mesh);
Mesh read_native_mesh(const std::string& path);
void write_native_mesh(const Mesh& mesh, const std::string& path);

struct InpDeck {
  Mesh mesh;
  std::vector<DirichletBC> bcs;
  std::vector<std::string> warnings;
};

/// Reads the *NODE, *ELEMENT (TYPE=CPE4T or C3D8T), *NSET, *ELSET and
/// *BOUNDARY keywords of an input deck. Node and element labels are renumbered
/// densely in order of appearance. Boundary dofs 1-3 map to x, y, z and dof 11
/// (temperature) to phi. Other keywords are skipped with a warning.
InpDeck parse_inp_subset(std::string_view text, const std::string& source = "<input>");
InpDeck read_inp_subset(const std::string& path);

/// Structured mesh of the unit square with an edge crack from the left edge
/// to the center at mid-height, modelled as a seam of duplicated nodes.
/// Refinement is uniform at size `h_fine` over the box
/// [fine_x0, fine_x1] x [fine_y0, fine_y1] and grows geometrically to
/// `h_coarse` outside it.
struct NotchedPlateParams {
  double h_fine = 0.0048;
  double h_coarse = 0.05;
  double growth = 1.3;
  double fine_x0 = 0.48, fine_x1 = 1.0;
  double fine_y0 = 0.44, fine_y1 = 0.56;
  /// Length scale used only for the element size warnings; 0 disables them.
  double ell = 0.0;
  double max_h_over_ell = 0.2;
};

/// Node sets: left, right, bottom, top, crack_lower, crack_upper, all.
/// Element set: all.
Mesh generate_notched_plate(const NotchedPlateParams& params, std::vector<std::string>* warnings = nullptr);

/// Quad4 rectangle [x0, x1] x [y0, y1] with nx by ny elements.
/// Node sets: left, right, bottom, top, all.
Mesh generate_rectangle(double x0, double x1, double y0, double y1, int nx, int ny);

/// Hex8 box [0, lx] x [0, ly] x [0, lz].
/// Node sets: xmin, xmax, ymin, ymax, zmin, zmax, all.
Mesh generate_box(double lx, double ly, double lz, int nx, int ny, int nz);

/// 1D grid through the sorted `breakpoints`. The target cell size is h inside
/// [fine_a, fine_b] and grows geometrically (ratio `growth` per cell) up to
/// h_coarse outside. Each segment between breakpoints is split into a whole
/// number of cells and rescaled to fit exactly.
std::vector<double> graded_axis(const std::vector<double>& breakpoints, double fine_a, double fine_b, double h,
                                double h_coarse, double growth);

IndexSet nodes_where(const Mesh& mesh, const std::function<bool(const std::array<double, 3>&)>& pred);

/// Legacy ASCII VTK 3.0 unstructured grid with point data u and phi and cell
/// data H (average over the element's quadrature points).
std::string format_vtk(const Mesh& mesh, const FieldState& state, const std::string& title = "pff");
void write_vtk(const Mesh& mesh, const FieldState& state, const std::string& path);

/// CSV with header increment,displacement,force,iterations,elastic_energy,fracture_energy.
std::string format_csv_history(const std::vector<IncrementRecord>& records);
void write_csv_history(const std::vector<IncrementRecord>& records, const std::string& path);

/// Writes `content` to `path`, throwing IoError on failure.
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace pff
