#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pff/mesh_io.hpp"
#include "pff/solver.hpp"

namespace pff {

/// Geometric predicate selecting nodes. A box is [lo, hi]; a segment selects
/// nodes within `half_width` of the segment lo-hi.
struct Region {
  enum class Kind { Box, Segment };
  Kind kind = Kind::Box;
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{0, 0, 0};
  double half_width = 0.0;

  bool contains(const std::array<double, 3>& x) const;
  bool operator==(const Region&) const = default;
};

struct MeshSpec {
  enum class Generator { NotchedPlate, Rectangle, Box, NativeFile, InpFile };
  Generator generator = Generator::Rectangle;
  std::string path;
  NotchedPlateParams plate;
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{1, 1, 1};
  std::array<int, 3> divisions{1, 1, 1};
};

struct MaterialSpec {
  double E = 210000.0;
  double nu = 0.3;
  double Gc = 2.7;
  double ell = 0.024;
  SplitScheme split = SplitScheme::NoSplit;
  Formulation formulation = Formulation::Hybrid;
  SpectralTrace trace = SpectralTrace::Macaulay;

  MaterialModel model() const;
};

struct OutputSpec {
  bool vtk = true;
  /// A VTK file is written when max phi moved by more than this since the
  /// last one, and always for the final increment. 0 writes every increment.
  double vtk_phi_step = 0.01;
};

/// Self-contained description of one boundary value problem.
struct CaseDefinition {
  std::string name;
  MeshSpec mesh;
  MaterialSpec material;
  std::map<std::string, Region> node_sets;  // added to the mesh by predicate
  std::vector<DirichletBC> bcs;
  std::vector<Region> initial_cracks;       // phi = 1 on enclosed nodes
  std::string reaction_set;
  Dof reaction_dof = Dof::Y;
  LoadPath amplitude;
  SolveConfig solve;
  OutputSpec output;
};

/// Mesh and load case ready for the solver.
struct BuiltCase {
  Mesh mesh;
  MaterialModel model{ElasticProps(210000.0, 0.3), FractureProps(2.7, 0.024)};
  LoadCase load;
  SolveConfig solve;
  std::vector<std::string> warnings;
};

/// Builds the mesh, adds region node sets and resolves BCs. Throws
/// ValidationError listing every unresolved reference.
BuiltCase build_case(const CaseDefinition& def);

// Case files are line oriented: "[section]" headers followed by "key = value"
// lines; '#' starts a comment. Repeated keys (bc, crack, set, point) append.
//
//   [case]      name
//   [mesh]      generator = notched_plate|rectangle|box|file|inp, path,
//               h_fine, h_coarse, growth, fine_x0, fine_x1, fine_y0, fine_y1,
//               max_h_over_ell, x0 y0 z0 x1 y1 z1, nx ny nz
//   [material]  E, nu, Gc, ell, split, formulation, trace
//   [sets]      set = <name> box <x0> <y0> <z0> <x1> <y1> <z1>
//               set = <name> segment <x0> <y0> <z0> <x1> <y1> <z1> <half_width>
//   [bcs]       bc = <set> <x|y|z|phi> <value>
//   [cracks]    crack = box ... | segment ...   (same syntax as sets)
//   [load]      reaction_set, reaction_dof, point = <t> <amplitude>
//   [solver]    scheme, increments, max_iterations, tol_relative, tol_absolute,
//               extrapolate, stagger_tol, max_stagger_passes, on_failure, workers
//   [output]    vtk, vtk_phi_step

/// Parsed configuration document, kept as ordered key/value entries.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigDocument {
  std::string source = "<input>";
  std::vector<ConfigEntry> entries;

  /// Replaces every entry for section.key (or appends one). A bare key is
  /// resolved to the unique section that accepts it.
  void set(const std::string& key, const std::string& value);
};

ConfigDocument parse_config(std::string_view text, const std::string& source = "<input>");
CaseDefinition case_from_config(const ConfigDocument& doc);
std::string format_case(const CaseDefinition& def);
CaseDefinition parse_case(std::string_view text, const std::string& source = "<input>");

// Benchmark catalog.
CaseDefinition case_bar_1d_profile(double ell = 0.024, double h_over_ell = 0.1);
CaseDefinition case_bar_1d_strength(double ell = 0.024);
CaseDefinition case_plate_tension();
CaseDefinition case_plate_shear(Scheme scheme = Scheme::Monolithic, int increments = 0);
CaseDefinition case_cube3d_smoke(double ell = 0.1, bool compression = false);

std::vector<std::string> catalog_names();
/// Looks a catalog case up by name; throws InvalidArgument listing the names.
CaseDefinition catalog_case(std::string_view name);

}  // namespace pff
