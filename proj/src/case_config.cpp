#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "pff/cases.hpp"
#include "pff/error.hpp"

namespace pff {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"case", {"name"}},
      {"mesh",
       {"generator", "path", "h_fine", "h_coarse", "growth", "fine_x0", "fine_x1", "fine_y0", "fine_y1",
        "max_h_over_ell", "x0", "y0", "z0", "x1", "y1", "z1", "nx", "ny", "nz"}},
      {"material", {"E", "nu", "Gc", "ell", "split", "formulation", "trace"}},
      {"sets", {"set"}},
      {"bcs", {"bc"}},
      {"cracks", {"crack"}},
      {"load", {"reaction_set", "reaction_dof", "point"}},
      {"solver",
       {"scheme", "increments", "max_iterations", "tol_relative", "tol_absolute", "extrapolate", "stagger_tol",
        "max_stagger_passes", "on_failure", "workers"}},
      {"output", {"vtk", "vtk_phi_step"}},
  };
  return keys;
}

const std::set<std::string> kRepeatable = {"set", "bc", "crack", "point"};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string region_text(const Region& r) {
  std::string s = r.kind == Region::Kind::Box ? "box" : "segment";
  for (double v : r.lo) s += " " + num(v);
  for (double v : r.hi) s += " " + num(v);
  if (r.kind == Region::Kind::Segment) s += " " + num(r.half_width);
  return s;
}

const char* generator_name(MeshSpec::Generator g) {
  switch (g) {
    case MeshSpec::Generator::NotchedPlate: return "notched_plate";
    case MeshSpec::Generator::Rectangle: return "rectangle";
    case MeshSpec::Generator::Box: return "box";
    case MeshSpec::Generator::NativeFile: return "file";
    case MeshSpec::Generator::InpFile: return "inp";
  }
  return "?";
}

// Converts entries into a CaseDefinition, collecting every problem.
class CaseReader {
 public:
  explicit CaseReader(const ConfigDocument& doc) : doc_(doc) {}

  CaseDefinition read() {
    CaseDefinition c;
    bool reset_points = true;
    for (const ConfigEntry& e : doc_.entries) {
      entry_ = &e;
      try {
        apply(c, e, reset_points);
      } catch (const Error& err) {
        problem(err.what());
      }
    }
    if (c.amplitude.points.empty()) c.amplitude = LoadPath{};
    try {
      c.material.model();
    } catch (const Error& err) {
      problems_.push_back(doc_.source + ": material: " + err.what());
    }
    const MeshSpec& m = c.mesh;
    const int dims = m.generator == MeshSpec::Generator::Box ? 3 : m.generator == MeshSpec::Generator::Rectangle ? 2 : 0;
    for (int d = 0; d < dims; ++d)
      if (m.divisions[d] < 1) problems_.push_back(doc_.source + ": mesh: n" + std::string(1, char('x' + d)) + " must be at least 1");
    try {
      c.solve.validate();
    } catch (const ValidationError& err) {
      for (const auto& p : err.problems()) problems_.push_back(doc_.source + ": " + p);
    }
    try {
      c.amplitude.validate();
    } catch (const ValidationError& err) {
      for (const auto& p : err.problems()) problems_.push_back(doc_.source + ": " + p);
    }
    if (!problems_.empty()) throw ValidationError(problems_);
    return c;
  }

 private:
  void problem(const std::string& what) {
    problems_.push_back(doc_.source + ":" + std::to_string(entry_->line) + ": " + entry_->section + "." +
                        entry_->key + ": " + what);
  }

  double real(const std::string& v) const {
    double out;
    const char* b = v.data();
    const char* e = v.data() + v.size();
    const auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e || v.empty()) throw InvalidArgument("expected a number, got '" + v + "'");
    return out;
  }

  int integer(const std::string& v) const {
    int out;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty())
      throw InvalidArgument("expected an integer, got '" + v + "'");
    return out;
  }

  bool boolean(const std::string& v) const {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw InvalidArgument("expected true or false, got '" + v + "'");
  }

  Region region(const std::vector<std::string>& w, std::size_t first) const {
    if (w.size() <= first) throw InvalidArgument("missing region kind (box or segment)");
    Region r;
    const std::string& kind = w[first];
    std::size_t expected;
    if (kind == "box") {
      r.kind = Region::Kind::Box;
      expected = 6;
    } else if (kind == "segment") {
      r.kind = Region::Kind::Segment;
      expected = 7;
    } else {
      throw InvalidArgument("unknown region kind '" + kind + "' (expected box or segment)");
    }
    if (w.size() != first + 1 + expected)
      throw InvalidArgument(kind + " needs " + std::to_string(expected) + " numbers");
    for (int d = 0; d < 3; ++d) r.lo[d] = real(w[first + 1 + d]);
    for (int d = 0; d < 3; ++d) r.hi[d] = real(w[first + 4 + d]);
    if (r.kind == Region::Kind::Segment) {
      r.half_width = real(w[first + 7]);
      if (r.half_width < 0) throw InvalidArgument("segment half width must be non-negative");
    }
    return r;
  }

  void apply(CaseDefinition& c, const ConfigEntry& e, bool& reset_points) {
    const auto& keys = known_keys();
    const auto sec = keys.find(e.section);
    if (sec == keys.end()) throw InvalidArgument("unknown section [" + e.section + "]");
    if (!sec->second.count(e.key)) throw InvalidArgument("unknown key");
    const std::string& v = e.value;
    const std::string& k = e.key;
    if (e.section == "case") {
      c.name = v;
    } else if (e.section == "mesh") {
      MeshSpec& m = c.mesh;
      if (k == "generator") {
        if (v == "notched_plate") m.generator = MeshSpec::Generator::NotchedPlate;
        else if (v == "rectangle") m.generator = MeshSpec::Generator::Rectangle;
        else if (v == "box") m.generator = MeshSpec::Generator::Box;
        else if (v == "file") m.generator = MeshSpec::Generator::NativeFile;
        else if (v == "inp") m.generator = MeshSpec::Generator::InpFile;
        else throw InvalidArgument("unknown generator '" + v + "' (expected notched_plate, rectangle, box, file or inp)");
      } else if (k == "path") m.path = v;
      else if (k == "h_fine") m.plate.h_fine = real(v);
      else if (k == "h_coarse") m.plate.h_coarse = real(v);
      else if (k == "growth") m.plate.growth = real(v);
      else if (k == "fine_x0") m.plate.fine_x0 = real(v);
      else if (k == "fine_x1") m.plate.fine_x1 = real(v);
      else if (k == "fine_y0") m.plate.fine_y0 = real(v);
      else if (k == "fine_y1") m.plate.fine_y1 = real(v);
      else if (k == "max_h_over_ell") m.plate.max_h_over_ell = real(v);
      else if (k[0] == 'n') m.divisions[k[1] - 'x'] = integer(v);
      else (k[1] == '0' ? m.lo : m.hi)[k[0] - 'x'] = real(v);
    } else if (e.section == "material") {
      MaterialSpec& m = c.material;
      if (k == "E") m.E = real(v);
      else if (k == "nu") m.nu = real(v);
      else if (k == "Gc") m.Gc = real(v);
      else if (k == "ell") m.ell = real(v);
      else if (k == "split") m.split = parse_split(v);
      else if (k == "formulation") m.formulation = parse_formulation(v);
      else m.trace = parse_trace(v);
    } else if (e.section == "sets") {
      const auto w = words(v);
      if (w.empty()) throw InvalidArgument("missing set name");
      if (c.node_sets.count(w[0])) throw InvalidArgument("duplicate set '" + w[0] + "'");
      c.node_sets[w[0]] = region(w, 1);
    } else if (e.section == "bcs") {
      const auto w = words(v);
      if (w.size() != 3) throw InvalidArgument("expected '<set> <dof> <value>'");
      c.bcs.push_back({w[0], parse_dof(w[1]), real(w[2])});
    } else if (e.section == "cracks") {
      c.initial_cracks.push_back(region(words(v), 0));
    } else if (e.section == "load") {
      if (k == "reaction_set") c.reaction_set = v;
      else if (k == "reaction_dof") c.reaction_dof = parse_dof(v);
      else {
        const auto w = words(v);
        if (w.size() != 2) throw InvalidArgument("expected '<t> <amplitude>'");
        if (reset_points) {
          c.amplitude.points.clear();
          reset_points = false;
        }
        c.amplitude.points.emplace_back(real(w[0]), real(w[1]));
      }
    } else if (e.section == "solver") {
      SolveConfig& s = c.solve;
      if (k == "scheme") s.scheme = parse_scheme(v);
      else if (k == "increments") s.n_increments = integer(v);
      else if (k == "max_iterations") s.max_iterations = integer(v);
      else if (k == "tol_relative") s.tol_relative = real(v);
      else if (k == "tol_absolute") s.tol_absolute = real(v);
      else if (k == "extrapolate") s.extrapolate = boolean(v);
      else if (k == "stagger_tol") s.stagger_tol = real(v);
      else if (k == "max_stagger_passes") s.max_stagger_passes = integer(v);
      else if (k == "workers") s.workers = integer(v);
      else if (v == "abort") s.on_failure = OnFailure::Abort;
      else if (v == "continue") s.on_failure = OnFailure::Continue;
      else throw InvalidArgument("expected abort or continue, got '" + v + "'");
    } else if (e.section == "output") {
      if (k == "vtk") c.output.vtk = boolean(v);
      else c.output.vtk_phi_step = real(v);
    }
  }

  const ConfigDocument& doc_;
  const ConfigEntry* entry_ = nullptr;
  std::vector<std::string> problems_;
};

}  // namespace

ConfigDocument parse_config(std::string_view text, const std::string& source) {
  ConfigDocument doc;
  doc.source = source;
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
    if (!line.empty()) {
      const int column = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(source, line_no, column, "unterminated section header");
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        if (section.empty()) throw ParseError(source, line_no, column + 1, "empty section name");
      } else {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source, line_no, column, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) throw ParseError(source, line_no, column, "missing key before '='");
        if (section.empty()) throw ParseError(source, line_no, column, "key outside of a [section]");
        doc.entries.push_back({section, key, trim(std::string_view(line).substr(eq + 1)), line_no});
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return doc;
}

void ConfigDocument::set(const std::string& key, const std::string& value) {
  std::string section, name;
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    section = key.substr(0, dot);
    name = key.substr(dot + 1);
  } else {
    name = key;
    // Short aliases for the common overrides.
    if (name == "extrapolation") name = "extrapolate";
    if (name == "mesh_size") name = "h_fine";
    std::vector<std::string> owners;
    for (const auto& [s, keys] : known_keys())
      if (keys.count(name)) owners.push_back(s);
    if (owners.size() != 1)
      throw InvalidArgument(owners.empty() ? "unknown setting '" + key + "'"
                                           : "ambiguous setting '" + key + "', qualify it as section.key");
    section = owners.front();
  }
  const auto sec = known_keys().find(section);
  if (sec == known_keys().end() || !sec->second.count(name)) throw InvalidArgument("unknown setting '" + key + "'");
  if (kRepeatable.count(name)) {
    entries.push_back({section, name, value, 0});
    return;
  }
  entries.erase(std::remove_if(entries.begin(), entries.end(),
                               [&](const ConfigEntry& e) { return e.section == section && e.key == name; }),
                entries.end());
  entries.push_back({section, name, value, 0});
}

CaseDefinition case_from_config(const ConfigDocument& doc) { return CaseReader(doc).read(); }

CaseDefinition parse_case(std::string_view text, const std::string& source) {
  return case_from_config(parse_config(text, source));
}

std::string format_case(const CaseDefinition& c) {
  std::ostringstream os;
  os << "[case]\nname = " << c.name << "\n\n[mesh]\ngenerator = " << generator_name(c.mesh.generator) << "\n";
  const MeshSpec& m = c.mesh;
  switch (m.generator) {
    case MeshSpec::Generator::NotchedPlate:
      os << "h_fine = " << num(m.plate.h_fine) << "\nh_coarse = " << num(m.plate.h_coarse)
         << "\ngrowth = " << num(m.plate.growth) << "\nfine_x0 = " << num(m.plate.fine_x0)
         << "\nfine_x1 = " << num(m.plate.fine_x1) << "\nfine_y0 = " << num(m.plate.fine_y0)
         << "\nfine_y1 = " << num(m.plate.fine_y1) << "\nmax_h_over_ell = " << num(m.plate.max_h_over_ell) << "\n";
      break;
    case MeshSpec::Generator::Rectangle:
    case MeshSpec::Generator::Box:
      for (int d = 0; d < 3; ++d) os << char('x' + d) << "0 = " << num(m.lo[d]) << "\n";
      for (int d = 0; d < 3; ++d) os << char('x' + d) << "1 = " << num(m.hi[d]) << "\n";
      for (int d = 0; d < 3; ++d) os << "n" << char('x' + d) << " = " << m.divisions[d] << "\n";
      break;
    case MeshSpec::Generator::NativeFile:
    case MeshSpec::Generator::InpFile:
      os << "path = " << m.path << "\n";
      break;
  }
  const MaterialSpec& mat = c.material;
  os << "\n[material]\nE = " << num(mat.E) << "\nnu = " << num(mat.nu) << "\nGc = " << num(mat.Gc)
     << "\nell = " << num(mat.ell) << "\nsplit = " << to_string(mat.split)
     << "\nformulation = " << to_string(mat.formulation) << "\ntrace = " << to_string(mat.trace) << "\n";
  if (!c.node_sets.empty()) {
    os << "\n[sets]\n";
    for (const auto& [name, r] : c.node_sets) os << "set = " << name << " " << region_text(r) << "\n";
  }
  os << "\n[bcs]\n";
  for (const auto& bc : c.bcs) os << "bc = " << bc.node_set << " " << to_string(bc.dof) << " " << num(bc.value) << "\n";
  if (!c.initial_cracks.empty()) {
    os << "\n[cracks]\n";
    for (const auto& r : c.initial_cracks) os << "crack = " << region_text(r) << "\n";
  }
  os << "\n[load]\n";
  if (!c.reaction_set.empty()) os << "reaction_set = " << c.reaction_set << "\n";
  os << "reaction_dof = " << to_string(c.reaction_dof) << "\n";
  for (const auto& [t, a] : c.amplitude.points) os << "point = " << num(t) << " " << num(a) << "\n";
  const SolveConfig& s = c.solve;
  os << "\n[solver]\nscheme = " << to_string(s.scheme) << "\nincrements = " << s.n_increments
     << "\nmax_iterations = " << s.max_iterations << "\ntol_relative = " << num(s.tol_relative)
     << "\ntol_absolute = " << num(s.tol_absolute) << "\nextrapolate = " << (s.extrapolate ? "true" : "false")
     << "\nstagger_tol = " << num(s.stagger_tol) << "\nmax_stagger_passes = " << s.max_stagger_passes
     << "\non_failure = " << (s.on_failure == OnFailure::Abort ? "abort" : "continue") << "\nworkers = " << s.workers
     << "\n";
  os << "\n[output]\nvtk = " << (c.output.vtk ? "true" : "false") << "\nvtk_phi_step = " << num(c.output.vtk_phi_step)
     << "\n";
  return os.str();
}

}  // namespace pff
