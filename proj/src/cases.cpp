#include <algorithm>
#include <cmath>

#include "pff/cases.hpp"
#include "pff/error.hpp"

namespace pff {

bool Region::contains(const std::array<double, 3>& x) const {
  constexpr double tol = 1e-9;
  if (kind == Kind::Box) {
    for (int d = 0; d < 3; ++d)
      if (x[d] < lo[d] - tol || x[d] > hi[d] + tol) return false;
    return true;
  }
  double t = 0.0, len2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    t += (x[d] - lo[d]) * (hi[d] - lo[d]);
    len2 += (hi[d] - lo[d]) * (hi[d] - lo[d]);
  }
  t = len2 > 0 ? std::clamp(t / len2, 0.0, 1.0) : 0.0;
  double dist2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double p = lo[d] + t * (hi[d] - lo[d]);
    dist2 += (x[d] - p) * (x[d] - p);
  }
  return std::sqrt(dist2) <= half_width + tol;
}

MaterialModel MaterialSpec::model() const {
  return MaterialModel{ElasticProps(E, nu), FractureProps(Gc, ell), split, formulation, trace};
}

BuiltCase build_case(const CaseDefinition& def) {
  BuiltCase b;
  b.model = def.material.model();
  b.solve = def.solve;
  b.solve.validate();
  std::vector<DirichletBC> deck_bcs;
  const MeshSpec& m = def.mesh;
  switch (m.generator) {
    case MeshSpec::Generator::NotchedPlate: {
      NotchedPlateParams p = m.plate;
      p.ell = def.material.ell;
      b.mesh = generate_notched_plate(p, &b.warnings);
      break;
    }
    case MeshSpec::Generator::Rectangle:
      b.mesh = generate_rectangle(m.lo[0], m.hi[0], m.lo[1], m.hi[1], m.divisions[0], m.divisions[1]);
      break;
    case MeshSpec::Generator::Box:
      b.mesh = generate_box(m.hi[0] - m.lo[0], m.hi[1] - m.lo[1], m.hi[2] - m.lo[2], m.divisions[0], m.divisions[1],
                            m.divisions[2]);
      for (auto& x : b.mesh.nodes)
        for (int d = 0; d < 3; ++d) x[d] += m.lo[d];
      break;
    case MeshSpec::Generator::NativeFile:
      b.mesh = read_native_mesh(m.path);
      break;
    case MeshSpec::Generator::InpFile: {
      InpDeck deck = read_inp_subset(m.path);
      b.mesh = std::move(deck.mesh);
      deck_bcs = std::move(deck.bcs);
      for (auto& w : deck.warnings) b.warnings.push_back(std::move(w));
      break;
    }
  }

  std::vector<std::string> problems;
  for (const auto& [name, region] : def.node_sets) {
    if (b.mesh.node_sets.count(name)) {
      problems.push_back("set '" + name + "' already exists in the mesh");
      continue;
    }
    IndexSet set = nodes_where(b.mesh, [&](const auto& x) { return region.contains(x); });
    if (set.empty()) problems.push_back("set '" + name + "' selects no nodes");
    b.mesh.node_sets[name] = std::move(set);
  }
  b.load.bcs = deck_bcs;
  for (const auto& bc : def.bcs) b.load.bcs.push_back(bc);
  for (const auto& bc : b.load.bcs) {
    if (!b.mesh.node_sets.count(bc.node_set)) problems.push_back("bc references unknown set '" + bc.node_set + "'");
    if (bc.dof == Dof::Z && b.mesh.dimension == 2) problems.push_back("bc on z in a 2D mesh");
  }
  for (const auto& r : def.initial_cracks) {
    const IndexSet nodes = nodes_where(b.mesh, [&](const auto& x) { return r.contains(x); });
    if (nodes.empty()) problems.push_back("an initial crack region selects no nodes");
    b.load.initial_crack.insert(b.load.initial_crack.end(), nodes.begin(), nodes.end());
  }
  std::sort(b.load.initial_crack.begin(), b.load.initial_crack.end());
  b.load.initial_crack.erase(std::unique(b.load.initial_crack.begin(), b.load.initial_crack.end()),
                             b.load.initial_crack.end());
  if (!def.reaction_set.empty() && !b.mesh.node_sets.count(def.reaction_set))
    problems.push_back("reaction set '" + def.reaction_set + "' does not exist");
  if (def.reaction_dof == Dof::Phi) problems.push_back("reaction dof must be x, y or z");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  b.load.reaction_set = def.reaction_set;
  b.load.reaction_dof = def.reaction_dof;
  b.load.amplitude = def.amplitude;
  b.mesh.validate();
  return b;
}

namespace {

MaterialSpec paper_material() {
  MaterialSpec m;
  m.E = 210000.0;
  m.nu = 0.3;
  m.Gc = 2.7;
  m.ell = 0.024;
  return m;
}

Region box(double x0, double y0, double z0, double x1, double y1, double z1) {
  Region r;
  r.lo = {x0, y0, z0};
  r.hi = {x1, y1, z1};
  return r;
}

}  // namespace

CaseDefinition case_bar_1d_profile(double ell, double h_over_ell) {
  CaseDefinition c;
  c.name = "bar_1d_profile";
  c.material = paper_material();
  c.material.ell = ell;
  const double half = 10.0 * ell;
  const double h = h_over_ell * ell;
  c.mesh.generator = MeshSpec::Generator::Rectangle;
  c.mesh.lo = {-half, 0.0, 0.0};
  c.mesh.hi = {half, h, 0.0};
  c.mesh.divisions = {static_cast<int>(std::lround(2.0 * half / h)), 1, 1};
  c.node_sets["center"] = box(-1e-3 * h, -1.0, -1.0, 1e-3 * h, 1.0, 1.0);
  c.bcs = {{"all", Dof::X, 0.0}, {"all", Dof::Y, 0.0}, {"center", Dof::Phi, 1.0}};
  c.solve.n_increments = 1;
  c.output.vtk = false;
  return c;
}

CaseDefinition case_bar_1d_strength(double ell) {
  CaseDefinition c;
  c.name = "bar_1d_strength";
  c.material = paper_material();
  c.material.ell = ell;
  c.material.nu = 0.0;  // uniaxial stress and strain coincide
  c.mesh.generator = MeshSpec::Generator::Rectangle;
  c.mesh.lo = {0.0, 0.0, 0.0};
  c.mesh.hi = {1.0, 0.1, 0.0};
  c.mesh.divisions = {10, 1, 1};
  c.node_sets["pin"] = box(-1e-6, -1e-6, -1.0, 1e-6, 1e-6, 1.0);
  // The homogeneous branch peaks at the critical strain and snaps back beyond
  // it, so the ramp stops there.
  const double eps_c = std::sqrt(c.material.Gc / (3.0 * ell * c.material.E));
  c.bcs = {{"left", Dof::X, 0.0}, {"pin", Dof::Y, 0.0}, {"right", Dof::X, eps_c * 1.0}};
  c.reaction_set = "right";
  c.reaction_dof = Dof::X;
  c.solve.n_increments = 50;
  c.output.vtk = false;
  return c;
}

CaseDefinition case_plate_tension() {
  CaseDefinition c;
  c.name = "plate_tension";
  c.material = paper_material();
  c.mesh.generator = MeshSpec::Generator::NotchedPlate;
  NotchedPlateParams& p = c.mesh.plate;
  p.h_fine = c.material.ell / 5.0;
  // Above sqrt(3)*ell the reaction term dominates the phase stencil, far-field
  // phi oscillates in sign and can drop while the crack grows.
  p.h_coarse = 1.6 * c.material.ell;
  p.growth = 1.4;
  p.fine_x0 = 0.48;
  p.fine_x1 = 1.0;
  p.fine_y0 = 0.5 - 1.5 * c.material.ell;
  p.fine_y1 = 0.5 + 1.5 * c.material.ell;
  p.max_h_over_ell = 0.2;
  c.bcs = {{"bottom", Dof::X, 0.0}, {"bottom", Dof::Y, 0.0}, {"top", Dof::X, 0.0}, {"top", Dof::Y, 0.007}};
  c.reaction_set = "top";
  c.reaction_dof = Dof::Y;
  c.solve.scheme = Scheme::Monolithic;
  c.solve.n_increments = 100;
  c.solve.max_iterations = 2000;
  return c;
}

CaseDefinition case_plate_shear(Scheme scheme, int increments) {
  CaseDefinition c;
  c.name = "plate_shear";
  c.material = paper_material();
  c.material.split = SplitScheme::VolDev;
  c.material.formulation = Formulation::Hybrid;
  c.mesh.generator = MeshSpec::Generator::NotchedPlate;
  NotchedPlateParams& p = c.mesh.plate;
  p.h_fine = c.material.ell / 2.5;
  p.h_coarse = 1.6 * c.material.ell;
  p.growth = 1.4;
  p.fine_x0 = 0.45;
  p.fine_x1 = 1.0;
  p.fine_y0 = 0.0;
  p.fine_y1 = 0.55;
  p.max_h_over_ell = 0.1;
  c.bcs = {{"bottom", Dof::X, 0.0}, {"bottom", Dof::Y, 0.0}, {"top", Dof::Y, 0.0}, {"top", Dof::X, 0.02}};
  c.reaction_set = "top";
  c.reaction_dof = Dof::X;
  c.solve.scheme = scheme;
  c.solve.n_increments = increments > 0 ? increments : scheme == Scheme::Monolithic ? 100 : 10000;
  c.solve.max_iterations = 2000;
  if (scheme != Scheme::Monolithic) c.output.vtk_phi_step = 0.05;
  return c;
}

CaseDefinition case_cube3d_smoke(double ell, bool compression) {
  CaseDefinition c;
  c.name = compression ? "cube3d_compression" : "cube3d_smoke";
  c.material = paper_material();
  c.material.ell = ell;
  c.material.split = SplitScheme::Spectral;
  c.material.formulation = Formulation::Anisotropic;
  c.mesh.generator = MeshSpec::Generator::Box;
  c.mesh.lo = {0.0, 0.0, 0.0};
  c.mesh.hi = {1.0, 1.0, 1.0};
  c.mesh.divisions = {10, 10, 10};
  c.initial_cracks.push_back(box(-1.0, 0.5, -1.0, 0.5, 0.5, 2.0));
  c.reaction_set = "ymax";
  c.reaction_dof = Dof::Y;
  if (compression) {
    // Laterally confined so every principal strain is compressive.
    c.bcs = {{"ymin", Dof::Y, 0.0}, {"xmin", Dof::X, 0.0}, {"xmax", Dof::X, 0.0},
             {"zmin", Dof::Z, 0.0}, {"zmax", Dof::Z, 0.0}, {"ymax", Dof::Y, -0.01}};
  } else {
    c.bcs = {{"ymin", Dof::X, 0.0}, {"ymin", Dof::Y, 0.0}, {"ymin", Dof::Z, 0.0},
             {"ymax", Dof::X, 0.0}, {"ymax", Dof::Z, 0.0}, {"ymax", Dof::Y, 0.006}};
  }
  c.solve.n_increments = 10;
  return c;
}

std::vector<std::string> catalog_names() {
  return {"bar_1d_profile",        "bar_1d_strength",         "plate_tension",     "plate_shear",
          "plate_shear_staggered", "plate_shear_staggered_1e3", "cube3d_smoke", "cube3d_compression"};
}

CaseDefinition catalog_case(std::string_view name) {
  if (name == "bar_1d_profile") return case_bar_1d_profile();
  if (name == "bar_1d_strength") return case_bar_1d_strength();
  if (name == "plate_tension") return case_plate_tension();
  if (name == "plate_shear") return case_plate_shear();
  if (name == "plate_shear_staggered") {
    CaseDefinition c = case_plate_shear(Scheme::StaggeredSinglePass, 10000);
    c.name = std::string(name);
    return c;
  }
  if (name == "plate_shear_staggered_1e3") {
    CaseDefinition c = case_plate_shear(Scheme::StaggeredSinglePass, 1000);
    c.name = std::string(name);
    return c;
  }
  if (name == "cube3d_smoke") return case_cube3d_smoke();
  if (name == "cube3d_compression") return case_cube3d_smoke(0.1, true);
  std::string list;
  for (const auto& n : catalog_names()) list += (list.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown case '" + std::string(name) + "' (available: " + list + ")");
}

}  // namespace pff
