#include "pff/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pff/cases.hpp"
#include "pff/error.hpp"
#include "pff/linear_solver.hpp"
#include "pff/mesh_io.hpp"

namespace pff {

namespace {

struct RunOptions {
  std::string case_name;
  std::string config_path;
  std::string out_dir = "results";
  std::string scheme;
  int increments = 0;
  std::vector<std::string> overrides;
  int workers = 0;
  std::string vtk_mode = "auto";
  bool verbose = false;
};

int default_workers() {
  if (const char* env = std::getenv("PFF_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    throw InvalidArgument(std::string("PFF_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 0;
}

CaseDefinition resolve_case(const RunOptions& o) {
  ConfigDocument doc;
  if (!o.config_path.empty()) {
    doc = parse_config(read_text_file(o.config_path), o.config_path);
  } else {
    doc = parse_config(format_case(catalog_case(o.case_name)), o.case_name);
  }
  if (!o.scheme.empty()) doc.set("solver.scheme", o.scheme);
  if (o.increments > 0) doc.set("solver.increments", std::to_string(o.increments));
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    doc.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  int workers = o.workers > 0 ? o.workers : default_workers();
  if (workers > 0) doc.set("solver.workers", std::to_string(workers));
  if (o.vtk_mode == "none") doc.set("output.vtk", "false");
  if (o.vtk_mode == "all") {
    doc.set("output.vtk", "true");
    doc.set("output.vtk_phi_step", "0");
  }
  return case_from_config(doc);
}

std::string log_line(const IncrementRecord& r) {
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "increment %d load %.6e displacement %.6e force %.6e iterations %d converged %s "
                "residual_u %.3e residual_phi %.3e max_phi %.6f wall %.3f\n",
                r.increment, r.load_factor, r.displacement, r.force, r.iterations, r.converged ? "yes" : "no",
                r.residual_u, r.residual_phi, r.max_phi, r.wall_seconds);
  return buf;
}

int run_command(const RunOptions& o, std::ostream& out, std::ostream& err) {
  CaseDefinition def;
  BuiltCase built;
  try {
    def = resolve_case(o);
    built = build_case(def);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(o.out_dir) / "vtk", ec);
  if (ec) {
    err << "error: " << o.out_dir << ": cannot create output directory: " << ec.message() << "\n";
    return kExitInputError;
  }
  const std::string dir = o.out_dir;
  for (const auto& w : built.warnings) err << "warning: " << w << "\n";

  std::ofstream log(dir + "/run.log");
  if (!log) {
    err << "error: " << dir << "/run.log: cannot open for writing\n";
    return kExitInputError;
  }
  try {
    write_text_file(dir + "/case.cfg", format_case(def));
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  log << "case " << def.name << ": " << built.mesh.num_nodes() << " nodes, " << built.mesh.num_elements()
      << " elements, scheme " << to_string(def.solve.scheme) << ", " << def.solve.n_increments
      << " increments, linear solver " << SparseSpdSolver::backend() << ", workers " << def.solve.workers << "\n";

  std::vector<IncrementRecord> records;
  double last_vtk_phi = -1.0;
  int vtk_count = 0;
  RunCallbacks cb;
  cb.on_increment = [&](const IncrementRecord& r, const FieldState& s) {
    records.push_back(r);
    const std::string line = log_line(r);
    log << line << std::flush;
    if (o.verbose) err << line;
    const bool last = r.increment == def.solve.n_increments || (!r.converged && def.solve.on_failure == OnFailure::Abort);
    if (def.output.vtk && (last || std::abs(r.max_phi - last_vtk_phi) > def.output.vtk_phi_step ||
                           def.output.vtk_phi_step <= 0.0)) {
      char name[64];
      std::snprintf(name, sizeof name, "/vtk/%s_%05d.vtk", def.name.c_str(), r.increment);
      write_vtk(built.mesh, s, dir + name);
      last_vtk_phi = r.max_phi;
      ++vtk_count;
    }
  };
  cb.on_numerical_failure = [&](const FieldState& s) { write_vtk(built.mesh, s, dir + "/failure.vtk"); };

  int code = kExitOk;
  try {
    Solver solver(built.mesh, built.model, built.load, built.solve);
    const RunResult result = solver.run(cb);
    if (!result.all_converged) code = kExitNotConverged;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << " (state written to " << dir << "/failure.vtk)\n";
    log << "numerical failure: " << e.what() << "\n";
    code = kExitNotConverged;
  } catch (const LinearSolveError& e) {
    err << "error: " << e.what() << "\n";
    log << "linear solve failure: " << e.what() << "\n";
    code = kExitNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  try {
    write_csv_history(records, dir + "/history.csv");
    const std::string table = report(records);
    write_text_file(dir + "/report.txt", table);
    out << table;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  log << "wrote " << vtk_count << " VTK files; exit code " << code << "\n";
  if (code == kExitNotConverged) err << "some increments did not converge; partial results in " << dir << "\n";
  return code;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase field fracture solver", "pff"};
  app.require_subcommand(1);
  RunOptions o;
  CLI::App* run = app.add_subcommand("run", "Run a catalog case or a case file");
  auto* case_opt = run->add_option("--case", o.case_name, "Catalog case name");
  auto* config_opt = run->add_option("--config", o.config_path, "Case file");
  case_opt->excludes(config_opt);
  run->add_option("--out", o.out_dir, "Output directory (created if absent)");
  run->add_option("--scheme", o.scheme, "monolithic, staggered or staggered-multipass");
  run->add_option("--increments", o.increments, "Number of load increments")->check(CLI::PositiveNumber);
  run->add_option("--set", o.overrides, "Override a setting, key=value or section.key=value");
  run->add_option("--workers", o.workers, "Assembly worker threads (default: $PFF_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  run->add_option("--vtk", o.vtk_mode, "auto (on phi change), all or none")
      ->check(CLI::IsMember({"auto", "all", "none"}));
  run->add_flag("-v,--verbose", o.verbose, "Print one line per increment");
  CLI::App* list = app.add_subcommand("list", "List catalog cases");
  CLI::App* show = app.add_subcommand("show", "Print a catalog case in case-file form");
  std::string show_name;
  show->add_option("name", show_name, "Catalog case name")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }
  if (list->parsed()) {
    for (const auto& n : catalog_names()) out << n << "\n";
    return kExitOk;
  }
  if (show->parsed()) {
    try {
      out << format_case(catalog_case(show_name));
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kExitInputError;
    }
    return kExitOk;
  }
  if (o.case_name.empty() && o.config_path.empty()) {
    err << "error: run needs --case or --config\n";
    return kExitInputError;
  }
  return run_command(o, out, err);
}

}  // namespace pff
