#include "pff/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pff/error.hpp"

namespace pff {

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

// Splits a line on whitespace (and commas when `commas` is set), dropping
// everything after the comment marker.
std::vector<Token> tokenize(std::string_view line, bool commas, std::string_view comment) {
  if (!comment.empty()) {
    const auto c = line.find(comment);
    if (c != std::string_view::npos) line = line.substr(0, c);
  }
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_sep = [&](char ch) { return std::isspace(static_cast<unsigned char>(ch)) || (commas && ch == ','); };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(start, end - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

class NativeParser {
 public:
  NativeParser(std::string_view text, std::string source) : lines_(split_lines(text)), source_(std::move(source)) {}

  Mesh parse() {
    next_significant();
    if (at_end()) fail(1, "empty document, expected 'PFFMESH 1'");
    expect_header();
    Mesh mesh;
    bool have_dimension = false, have_nodes = false;
    while (next_significant(), !at_end()) {
      const Token kw = tokens_[0];
      if (kw.text == "DIMENSION") {
        mesh.dimension = static_cast<int>(integer(1, "dimension"));
        if (mesh.dimension != 2 && mesh.dimension != 3) fail(tokens_[1].column, "dimension must be 2 or 3");
        arity(2);
        have_dimension = true;
      } else if (kw.text == "NODES") {
        if (!have_dimension) fail(kw.column, "NODES before DIMENSION");
        if (have_nodes) fail(kw.column, "duplicate NODES section");
        have_nodes = true;
        const std::size_t n = count(1);
        arity(2);
        read_nodes(mesh, n);
      } else if (kw.text == "ELEMENTS") {
        if (!have_nodes) fail(kw.column, "ELEMENTS before NODES");
        if (tokens_.size() < 2) fail(kw.column, "ELEMENTS needs a kind and a count");
        const Token kind_tok = tokens_[1];
        ElementKind kind;
        if (kind_tok.text == "quad4") kind = ElementKind::Quad4PlaneStrain;
        else if (kind_tok.text == "hex8") kind = ElementKind::Hex8;
        else fail(kind_tok.column, "unknown element kind '" + std::string(kind_tok.text) + "' (expected quad4 or hex8)");
        const std::size_t n = count(2);
        arity(3);
        if (dimension_of(kind) != mesh.dimension)
          problems_.push_back(where(kind_tok.column) + std::string(to_string(kind)) + " elements in a " +
                              std::to_string(mesh.dimension) + "D mesh");
        read_elements(mesh, kind, n);
      } else if (kw.text == "NSET" || kw.text == "ESET") {
        if (tokens_.size() < 3) fail(kw.column, std::string(kw.text) + " needs a name and a count");
        const std::string name(tokens_[1].text);
        const int name_line = line_no();
        const int name_col = tokens_[1].column;
        const std::size_t n = count(2);
        arity(3);
        const bool nodes = kw.text == "NSET";
        auto& sets = nodes ? mesh.node_sets : mesh.element_sets;
        const IndexSet values = read_indices(n, nodes ? mesh.num_nodes() : mesh.num_elements(),
                                             nodes ? "node" : "element", name);
        if (sets.count(name))
          problems_.push_back(source_ + ":" + std::to_string(name_line) + ":" + std::to_string(name_col) +
                              ": duplicate " + (nodes ? "node" : "element") + " set '" + name + "'");
        else
          sets.emplace(name, values);
      } else {
        fail(kw.column, "unknown section '" + std::string(kw.text) + "'");
      }
    }
    if (!have_dimension) fail(line_no(), "missing DIMENSION");
    if (!problems_.empty()) throw ValidationError(std::move(problems_));
    return mesh;
  }

 private:
  bool at_end() const { return index_ >= lines_.size(); }
  int line_no() const { return static_cast<int>(std::min(index_, lines_.size() - 1)) + 1; }
  std::string where(int column) const {
    return source_ + ":" + std::to_string(line_no()) + ":" + std::to_string(column) + ": ";
  }

  [[noreturn]] void fail(int column, const std::string& what) const {
    throw ParseError(source_, line_no(), column, what);
  }

  // Advances to the next non-empty line (starting after the current one).
  void next_significant() {
    if (started_) ++index_;
    started_ = true;
    for (; index_ < lines_.size(); ++index_) {
      tokens_ = tokenize(lines_[index_], false, "#");
      if (!tokens_.empty()) return;
    }
    tokens_.clear();
  }

  void expect_header() {
    if (tokens_[0].text != "PFFMESH") fail(tokens_[0].column, "expected 'PFFMESH 1' header");
    if (tokens_.size() < 2 || tokens_[1].text != "1")
      fail(tokens_.size() < 2 ? static_cast<int>(lines_[index_].size()) + 1 : tokens_[1].column,
           "unsupported format version (expected 1)");
    arity(2);
  }

  void arity(std::size_t n) const {
    if (tokens_.size() > n) fail(tokens_[n].column, "unexpected token '" + std::string(tokens_[n].text) + "'");
  }

  long long integer(std::size_t i, const char* what) const {
    if (i >= tokens_.size()) fail(static_cast<int>(lines_[index_].size()) + 1, std::string("missing ") + what);
    long long v;
    if (!parse_number(tokens_[i].text, v))
      fail(tokens_[i].column, std::string("expected an integer ") + what + ", got '" + std::string(tokens_[i].text) + "'");
    return v;
  }

  std::size_t count(std::size_t i) const {
    const long long v = integer(i, "count");
    if (v < 0) fail(tokens_[i].column, "count must be non-negative");
    return static_cast<std::size_t>(v);
  }

  void need_data(const char* section) {
    next_significant();
    if (at_end()) fail(line_no(), std::string("unexpected end of document in ") + section + " section");
  }

  void read_nodes(Mesh& mesh, std::size_t n) {
    mesh.nodes.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      need_data("NODES");
      if (tokens_.size() != static_cast<std::size_t>(mesh.dimension))
        fail(tokens_[0].column, "expected " + std::to_string(mesh.dimension) + " coordinates, got " +
                                    std::to_string(tokens_.size()));
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int d = 0; d < mesh.dimension; ++d) {
        if (!parse_number(tokens_[d].text, x[d]))
          fail(tokens_[d].column, "invalid coordinate '" + std::string(tokens_[d].text) + "'");
      }
      mesh.nodes.push_back(x);
    }
  }

  void read_elements(Mesh& mesh, ElementKind kind, std::size_t n) {
    const int nn = nodes_per_element(kind);
    for (std::size_t k = 0; k < n; ++k) {
      need_data("ELEMENTS");
      if (tokens_.size() != static_cast<std::size_t>(nn))
        fail(tokens_[0].column, "expected " + std::to_string(nn) + " node indices, got " + std::to_string(tokens_.size()));
      Element el;
      el.kind = kind;
      bool in_range = true;
      for (int a = 0; a < nn; ++a) {
        const long long v = integer(a, "node index");
        if (v < 0 || static_cast<std::size_t>(v) >= mesh.num_nodes()) {
          problems_.push_back(where(tokens_[a].column) + "element " + std::to_string(mesh.elements.size()) +
                              " references node " + std::to_string(v) + " but the mesh has " +
                              std::to_string(mesh.num_nodes()) + " nodes");
          in_range = false;
          el.nodes[a] = 0;
        } else {
          el.nodes[a] = static_cast<std::size_t>(v);
        }
      }
      const std::size_t e = mesh.elements.size();
      mesh.elements.push_back(el);
      if (in_range && dimension_of(kind) == mesh.dimension) {
        try {
          element_geometry(kind, mesh.element_coords(e), e);
        } catch (const InvertedElementError& err) {
          problems_.push_back(where(tokens_[0].column) + err.what());
        }
      }
    }
  }

  IndexSet read_indices(std::size_t n, std::size_t limit, const char* what, const std::string& name) {
    IndexSet out;
    out.reserve(n);
    while (out.size() < n) {
      need_data("set");
      for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (out.size() == n) fail(tokens_[i].column, "more indices than the declared count " + std::to_string(n));
        const long long v = integer(i, "index");
        if (v < 0 || static_cast<std::size_t>(v) >= limit)
          problems_.push_back(where(tokens_[i].column) + "set '" + name + "' references " + what + " " +
                              std::to_string(v) + " but the mesh has " + std::to_string(limit) + " " + what + "s");
        out.push_back(static_cast<std::size_t>(std::max<long long>(v, 0)));
      }
    }
    return out;
  }

  std::vector<std::string_view> lines_;
  std::string source_;
  std::size_t index_ = 0;
  bool started_ = false;
  std::vector<Token> tokens_;
  std::vector<std::string> problems_;
};

}  // namespace

Mesh parse_native_mesh(std::string_view text, const std::string& source) {
  return NativeParser(text, source).parse();
}

std::string format_native_mesh(const Mesh& mesh) {
  std::ostringstream os;
  os << "PFFMESH 1\nDIMENSION " << mesh.dimension << "\nNODES " << mesh.num_nodes() << "\n";
  for (const auto& x : mesh.nodes) {
    for (int d = 0; d < mesh.dimension; ++d) os << (d ? " " : "") << fmt("%.17g", x[d]);
    os << "\n";
  }
  // Elements are written in runs of equal kind so that mixed meshes survive a
  // round trip until validation rejects them.
  std::size_t e = 0;
  while (e < mesh.elements.size()) {
    const ElementKind kind = mesh.elements[e].kind;
    std::size_t end = e;
    while (end < mesh.elements.size() && mesh.elements[end].kind == kind) ++end;
    os << "ELEMENTS " << to_string(kind) << " " << (end - e) << "\n";
    for (; e < end; ++e) {
      const auto conn = mesh.elements[e].connectivity();
      for (std::size_t a = 0; a < conn.size(); ++a) os << (a ? " " : "") << conn[a];
      os << "\n";
    }
  }
  auto sets = [&](const char* kw, const std::map<std::string, IndexSet>& m) {
    for (const auto& [name, set] : m) {
      os << kw << " " << name << " " << set.size() << "\n";
      for (std::size_t i = 0; i < set.size(); ++i) os << set[i] << ((i % 16 == 15 || i + 1 == set.size()) ? "\n" : " ");
    }
  };
  sets("NSET", mesh.node_sets);
  sets("ESET", mesh.element_sets);
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

Mesh read_native_mesh(const std::string& path) { return parse_native_mesh(read_text_file(path), path); }

void write_native_mesh(const Mesh& mesh, const std::string& path) { write_text_file(path, format_native_mesh(mesh)); }

namespace {

class InpParser {
 public:
  InpParser(std::string_view text, std::string source) : lines_(split_lines(text)), source_(std::move(source)) {}

  InpDeck parse() {
    enum class Section { None, Node, Element, NSet, ElSet, Boundary, Skip };
    Section section = Section::None;
    ElementKind kind = ElementKind::Quad4PlaneStrain;
    bool have_kind = false;
    std::string set_name, elset_name;
    bool generate = false;
    std::vector<Token> pending;  // element data continued over several lines
    int pending_line = 0;

    for (line_ = 1; line_ <= static_cast<int>(lines_.size()); ++line_) {
      const std::string_view raw = lines_[line_ - 1];
      const std::string t = trim(raw);
      if (t.empty() || t.rfind("**", 0) == 0) continue;
      if (t[0] == '*') {
        if (!pending.empty()) fail(pending_line, pending.back().column, "element data line ends with a continuation comma");
        const auto [name, params] = keyword(raw);
        generate = params.count("GENERATE") > 0;
        if (name == "NODE") {
          section = Section::Node;
        } else if (name == "ELEMENT") {
          const auto it = params.find("TYPE");
          if (it == params.end()) fail(line_, 1, "*ELEMENT requires TYPE=");
          if (it->second == "CPE4T") kind = ElementKind::Quad4PlaneStrain;
          else if (it->second == "C3D8T") kind = ElementKind::Hex8;
          else fail(line_, 1, "unsupported element type '" + it->second + "' (supported: CPE4T, C3D8T)");
          if (have_kind && kind != deck_.mesh.element_kind())
            problems_.push_back(at(line_, 1) + "mixed element types in one deck");
          have_kind = true;
          deck_.mesh.dimension = dimension_of(kind);
          elset_name = params.count("ELSET") ? params.at("ELSET") : "";
          section = Section::Element;
        } else if (name == "NSET" || name == "ELSET") {
          const auto it = params.find(name);
          if (it == params.end()) fail(line_, 1, "*" + name + " requires " + name + "=");
          set_name = it->second;
          section = name == "NSET" ? Section::NSet : Section::ElSet;
          auto& sets = section == Section::NSet ? nsets_ : elsets_;
          sets[set_name];
        } else if (name == "BOUNDARY") {
          section = Section::Boundary;
        } else {
          deck_.warnings.push_back(at(line_, 1) + "unsupported keyword *" + name + " skipped");
          section = Section::Skip;
        }
        continue;
      }
      std::vector<Token> tok = tokenize(raw, true, "");
      switch (section) {
        case Section::None:
          fail(line_, tok.empty() ? 1 : tok[0].column, "data line outside of a keyword block");
        case Section::Skip:
          break;
        case Section::Node: node_line(tok); break;
        case Section::Element: {
          if (pending.empty()) pending_line = line_;
          pending.insert(pending.end(), tok.begin(), tok.end());
          if (trim(raw).back() == ',') break;
          element_line(pending, pending_line, kind, elset_name);
          pending.clear();
          break;
        }
        case Section::NSet: set_line(tok, nsets_[set_name], generate); break;
        case Section::ElSet: set_line(tok, elsets_[set_name], generate); break;
        case Section::Boundary: boundary_line(tok); break;
      }
    }
    if (!pending.empty()) fail(pending_line, pending.back().column, "element data line ends with a continuation comma");
    resolve();
    if (!problems_.empty()) throw ValidationError(std::move(problems_));
    return std::move(deck_);
  }

 private:
  struct Entry {
    long long label;
    int line, column;
  };
  struct PendingElement {
    std::vector<Entry> nodes;
    ElementKind kind;
    int line;
  };
  struct PendingBc {
    std::string target;
    bool is_label;
    long long label;
    Dof dof;
    double value;
    int line, column;
  };

  std::string at(int line, int column) const {
    return source_ + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
  }
  [[noreturn]] void fail(int line, int column, const std::string& what) const {
    throw ParseError(source_, line, column, what);
  }

  std::pair<std::string, std::map<std::string, std::string>> keyword(std::string_view raw) {
    std::map<std::string, std::string> params;
    std::vector<std::string> parts;
    std::size_t start = 1;
    for (std::size_t i = 1; i <= raw.size(); ++i) {
      if (i == raw.size() || raw[i] == ',') {
        parts.push_back(trim(raw.substr(start, i - start)));
        start = i + 1;
      }
    }
    if (parts.empty() || parts[0].empty()) fail(line_, 2, "missing keyword name");
    std::string name = upper(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].empty()) continue;
      const auto eq = parts[i].find('=');
      if (eq == std::string::npos) {
        params[upper(parts[i])] = "";
      } else {
        const std::string key = upper(trim(parts[i].substr(0, eq)));
        if (key.empty()) fail(line_, static_cast<int>(raw.find(parts[i])) + 1, "malformed parameter '" + parts[i] + "'");
        std::string value = trim(parts[i].substr(eq + 1));
        params[key] = key == "TYPE" ? upper(value) : value;
      }
    }
    return {name, params};
  }

  long long label(const Token& t) const {
    long long v;
    if (!parse_number(t.text, v)) fail(line_, t.column, "expected an integer label, got '" + std::string(t.text) + "'");
    return v;
  }

  double real(const Token& t) const {
    double v;
    if (!parse_number(t.text, v)) fail(line_, t.column, "expected a number, got '" + std::string(t.text) + "'");
    return v;
  }

  void node_line(const std::vector<Token>& tok) {
    if (tok.size() < 3 || tok.size() > 4)
      fail(line_, tok.empty() ? 1 : tok[0].column, "*NODE data needs a label and 2 or 3 coordinates");
    const long long l = label(tok[0]);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t i = 1; i < tok.size(); ++i) x[i - 1] = real(tok[i]);
    if (!node_index_.emplace(l, deck_.mesh.nodes.size()).second)
      problems_.push_back(at(line_, tok[0].column) + "duplicate node label " + std::to_string(l));
    else
      deck_.mesh.nodes.push_back(x);
  }

  void element_line(const std::vector<Token>& tok, int line, ElementKind kind, const std::string& elset) {
    const std::size_t nn = static_cast<std::size_t>(nodes_per_element(kind));
    if (tok.size() != nn + 1)
      fail(line, tok.empty() ? 1 : tok[0].column,
           "expected a label and " + std::to_string(nn) + " node labels, got " + std::to_string(tok.size()) + " fields");
    const int saved = line_;
    line_ = line;
    const long long l = label(tok[0]);
    PendingElement el{{}, kind, line};
    for (std::size_t i = 1; i < tok.size(); ++i) el.nodes.push_back({label(tok[i]), line, tok[i].column});
    line_ = saved;
    if (!element_index_.emplace(l, elements_.size()).second) {
      problems_.push_back(at(line, tok[0].column) + "duplicate element label " + std::to_string(l));
      return;
    }
    if (!elset.empty()) elsets_[elset].push_back({l, line, tok[0].column});
    elements_.push_back(std::move(el));
  }

  void set_line(const std::vector<Token>& tok, std::vector<Entry>& set, bool generate) {
    if (generate) {
      if (tok.size() < 2 || tok.size() > 3) fail(line_, tok.empty() ? 1 : tok[0].column, "GENERATE needs start, end[, step]");
      const long long a = label(tok[0]), b = label(tok[1]);
      const long long step = tok.size() == 3 ? label(tok[2]) : 1;
      if (step <= 0 || b < a) fail(line_, tok[0].column, "invalid GENERATE range");
      for (long long v = a; v <= b; v += step) set.push_back({v, line_, tok[0].column});
      return;
    }
    for (const Token& t : tok) set.push_back({label(t), line_, t.column});
  }

  void boundary_line(const std::vector<Token>& tok) {
    if (tok.empty()) return;
    PendingBc bc{};
    bc.line = line_;
    bc.column = tok[0].column;
    long long l;
    bc.is_label = parse_number(tok[0].text, l);
    bc.label = bc.is_label ? l : 0;
    bc.target = std::string(tok[0].text);
    if (tok.size() == 2 && !parse_number(tok[1].text, l)) {
      const std::string type = upper(tok[1].text);
      if (type != "ENCASTRE" && type != "PINNED")
        fail(line_, tok[1].column, "unsupported boundary type '" + std::string(tok[1].text) + "'");
      for (Dof d : {Dof::X, Dof::Y, Dof::Z}) {
        bc.dof = d;
        bc.value = 0.0;
        bcs_.push_back(bc);
      }
      return;
    }
    if (tok.size() < 2 || tok.size() > 4)
      fail(line_, tok[0].column, "*BOUNDARY data needs node or set, first dof[, last dof[, value]]");
    const long long first = label(tok[1]);
    const long long last = tok.size() >= 3 ? label(tok[2]) : first;
    const double value = tok.size() == 4 ? real(tok[3]) : 0.0;
    for (long long d = first; d <= last; ++d) {
      if (d >= 1 && d <= 3) bc.dof = static_cast<Dof>(d - 1);
      else if (d == 11) bc.dof = Dof::Phi;
      else fail(line_, tok[1].column, "unsupported dof " + std::to_string(d) + " (supported: 1, 2, 3, 11)");
      bc.value = value;
      bcs_.push_back(bc);
    }
  }

  void resolve() {
    Mesh& mesh = deck_.mesh;
    for (const PendingElement& pe : elements_) {
      Element el;
      el.kind = pe.kind;
      bool ok = true;
      for (std::size_t a = 0; a < pe.nodes.size(); ++a) {
        const auto it = node_index_.find(pe.nodes[a].label);
        if (it == node_index_.end()) {
          problems_.push_back(at(pe.nodes[a].line, pe.nodes[a].column) + "undefined node label " +
                              std::to_string(pe.nodes[a].label));
          ok = false;
        } else {
          el.nodes[a] = it->second;
        }
      }
      const std::size_t e = mesh.elements.size();
      mesh.elements.push_back(el);
      if (ok) {
        try {
          element_geometry(el.kind, mesh.element_coords(e), e);
        } catch (const InvertedElementError& err) {
          problems_.push_back(at(pe.line, 1) + err.what());
        }
      }
    }
    auto resolve_set = [&](const std::vector<Entry>& in, const std::unordered_map<long long, std::size_t>& index,
                           const char* what) {
      IndexSet out;
      for (const Entry& en : in) {
        const auto it = index.find(en.label);
        if (it == index.end())
          problems_.push_back(at(en.line, en.column) + "undefined " + what + " label " + std::to_string(en.label));
        else
          out.push_back(it->second);
      }
      return out;
    };
    for (const auto& [name, entries] : nsets_) mesh.node_sets[name] = resolve_set(entries, node_index_, "node");
    for (const auto& [name, entries] : elsets_) mesh.element_sets[name] = resolve_set(entries, element_index_, "element");

    for (const PendingBc& bc : bcs_) {
      if (bc.dof == Dof::Z && mesh.dimension == 2) continue;  // ENCASTRE in 2D
      std::string set = bc.target;
      if (bc.is_label) {
        const auto it = node_index_.find(bc.label);
        if (it == node_index_.end()) {
          problems_.push_back(at(bc.line, bc.column) + "undefined node label " + std::to_string(bc.label));
          continue;
        }
        set = "NODE" + std::to_string(bc.label);
        mesh.node_sets[set] = {it->second};
      } else if (!mesh.node_sets.count(set)) {
        problems_.push_back(at(bc.line, bc.column) + "undefined node set '" + set + "'");
        continue;
      }
      deck_.bcs.push_back({set, bc.dof, bc.value});
    }
  }

  std::vector<std::string_view> lines_;
  std::string source_;
  int line_ = 0;
  InpDeck deck_;
  std::unordered_map<long long, std::size_t> node_index_, element_index_;
  std::vector<PendingElement> elements_;
  std::map<std::string, std::vector<Entry>> nsets_, elsets_;
  std::vector<PendingBc> bcs_;
  std::vector<std::string> problems_;
};

}  // namespace

InpDeck parse_inp_subset(std::string_view text, const std::string& source) {
  return InpParser(text, source).parse();
}

InpDeck read_inp_subset(const std::string& path) { return parse_inp_subset(read_text_file(path), path); }

std::string format_vtk(const Mesh& mesh, const FieldState& state, const std::string& title) {
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& x : mesh.nodes) os << fmt("%.9e", x[0]) << " " << fmt("%.9e", x[1]) << " " << fmt("%.9e", x[2]) << "\n";
  std::size_t size = 0;
  for (const auto& el : mesh.elements) size += 1 + el.connectivity().size();
  os << "CELLS " << mesh.num_elements() << " " << size << "\n";
  for (const auto& el : mesh.elements) {
    const auto conn = el.connectivity();
    os << conn.size();
    for (std::size_t n : conn) os << " " << n;
    os << "\n";
  }
  os << "CELL_TYPES " << mesh.num_elements() << "\n";
  for (const auto& el : mesh.elements) os << (el.kind == ElementKind::Hex8 ? 12 : 9) << "\n";

  const int dim = mesh.dimension;
  os << "POINT_DATA " << mesh.num_nodes() << "\n";
  if (state.u.size() == static_cast<Eigen::Index>(mesh.num_nodes() * dim)) {
    os << "VECTORS u double\n";
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
      for (int d = 0; d < 3; ++d) os << (d ? " " : "") << fmt("%.9e", d < dim ? state.u(n * dim + d) : 0.0);
      os << "\n";
    }
  }
  if (state.phi.size() == static_cast<Eigen::Index>(mesh.num_nodes())) {
    os << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index n = 0; n < state.phi.size(); ++n) os << fmt("%.9e", state.phi(n)) << "\n";
  }
  const std::size_t nq = static_cast<std::size_t>(points_per_element(mesh.element_kind()));
  if (mesh.num_elements() > 0 && state.history.size() == static_cast<Eigen::Index>(mesh.num_elements() * nq)) {
    os << "CELL_DATA " << mesh.num_elements() << "\nSCALARS H double 1\nLOOKUP_TABLE default\n";
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
      os << fmt("%.9e", state.history.segment(e * nq, nq).mean()) << "\n";
  }
  return os.str();
}

void write_vtk(const Mesh& mesh, const FieldState& state, const std::string& path) {
  write_text_file(path, format_vtk(mesh, state));
}

std::string format_csv_history(const std::vector<IncrementRecord>& records) {
  std::string out = "increment,displacement,force,iterations,elastic_energy,fracture_energy\n";
  for (const auto& r : records) {
    out += std::to_string(r.increment) + "," + fmt("%.12e", r.displacement) + "," + fmt("%.12e", r.force) + "," +
           std::to_string(r.iterations) + "," + fmt("%.12e", r.elastic_energy) + "," +
           fmt("%.12e", r.fracture_energy) + "\n";
  }
  return out;
}

void write_csv_history(const std::vector<IncrementRecord>& records, const std::string& path) {
  write_text_file(path, format_csv_history(records));
}

IndexSet nodes_where(const Mesh& mesh, const std::function<bool(const std::array<double, 3>&)>& pred) {
  IndexSet out;
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n)
    if (pred(mesh.nodes[n])) out.push_back(n);
  return out;
}

}  // namespace pff
