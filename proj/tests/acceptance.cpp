#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pff/cases.hpp"
#include "pff/element.hpp"

using namespace pff;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records one sub-check; every check is reported, failed ones marked.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CaseRun {
  BuiltCase built;
  RunResult result;
  std::vector<Eigen::VectorXd> phi;  // committed phi after every increment
  double seconds = 0.0;
};

CaseRun run_case(const CaseDefinition& def, bool keep_phi = false) {
  const auto t0 = std::chrono::steady_clock::now();
  CaseRun r;
  r.built = build_case(def);
  RunCallbacks cb;
  if (keep_phi) cb.on_increment = [&](const IncrementRecord&, const FieldState& s) { r.phi.push_back(s.phi); };
  r.result = Solver(r.built.mesh, r.built.model, r.built.load, r.built.solve).run(cb);
  r.seconds = seconds_since(t0);
  return r;
}

std::size_t peak_index(const std::vector<IncrementRecord>& recs) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (recs[i].force > recs[k].force) k = i;
  return k;
}

// First increment after the peak whose force is below 10% of the peak, or
// recs.size() if the load never drops.
std::size_t drop_index(const std::vector<IncrementRecord>& recs) {
  const std::size_t p = peak_index(recs);
  for (std::size_t i = p; i < recs.size(); ++i)
    if (recs[i].force < 0.1 * recs[p].force) return i;
  return recs.size();
}

int cumulative_iterations(const std::vector<IncrementRecord>& recs, std::size_t count) {
  int n = 0;
  for (std::size_t i = 0; i < std::min(count, recs.size()); ++i) n += recs[i].iterations;
  return n;
}

// Piecewise linear force at displacement d along a recorded curve.
double force_at(const std::vector<IncrementRecord>& recs, double d) {
  if (d <= recs.front().displacement) return recs.front().force * d / recs.front().displacement;
  for (std::size_t i = 1; i < recs.size(); ++i)
    if (d <= recs[i].displacement) {
      const auto& a = recs[i - 1];
      const auto& b = recs[i];
      return a.force + (b.force - a.force) * (d - a.displacement) / (b.displacement - a.displacement);
    }
  return recs.back().force;
}

// Largest |F_other - F_ref| over the reference increments from `first`,
// relative to the reference peak force.
double max_deviation(const std::vector<IncrementRecord>& ref, const std::vector<IncrementRecord>& other,
                     std::size_t first = 0) {
  const double peak = ref[peak_index(ref)].force;
  double dev = 0.0;
  for (std::size_t i = first; i < ref.size(); ++i)
    dev = std::max(dev, std::abs(force_at(other, ref[i].displacement) - ref[i].force) / peak);
  return dev;
}

// ---------------------------------------------------------------------------

Outcome crack_profile() {
  const CaseDefinition def = case_bar_1d_profile(0.024, 0.1);
  const CaseRun r = run_case(def);
  Outcome o;
  const Mesh& m = r.built.mesh;
  const double ell = def.material.ell;
  // Nodes on the bottom edge, ordered by x.
  std::map<double, double> line;
  for (std::size_t n = 0; n < m.num_nodes(); ++n)
    if (m.nodes[n][1] == 0.0) line[m.nodes[n][0]] = r.result.state.phi(n);
  // Gauss integration of the linear interpolant against the exact profile.
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  double err2 = 0.0, ref2 = 0.0;
  for (auto b = std::next(line.begin()), a = line.begin(); b != line.end(); ++a, ++b) {
    const double h = b->first - a->first;
    for (double s : g) {
      const double x = a->first + s * h;
      const double ph = a->second + s * (b->second - a->second);
      const double ex = oracle::crack_profile(x, ell);
      err2 += 0.5 * h * (ph - ex) * (ph - ex);
      ref2 += 0.5 * h * ex * ex;
    }
  }
  const double l2 = std::sqrt(err2 / ref2);
  const double area = def.mesh.hi[1] - def.mesh.lo[1];
  const double energy = r.result.records.back().fracture_energy / (def.material.Gc * area);
  o.check(r.result.all_converged, "converged");
  o.check(l2 <= 0.02, fmt("L2 error %.3f%% (limit 2%%)", 100 * l2));
  o.check(std::abs(energy - 1.0) <= 0.03, fmt("surface energy / (Gc area) %.4f (limit 3%%)", energy));
  o.check(r.seconds < 10.0, fmt("%.1f s (limit 10 s)", r.seconds));
  return o;
}

Outcome bar_strength() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double peak[2];
  const double ells[2] = {0.024, 4 * 0.024};
  for (int i = 0; i < 2; ++i) {
    const CaseDefinition def = case_bar_1d_strength(ells[i]);
    const CaseRun r = run_case(def);
    const double area = def.mesh.hi[1] - def.mesh.lo[1];
    peak[i] = r.result.records[peak_index(r.result.records)].force / area;
    const double expected = oracle::homogeneous_peak_stress(def.material.E, def.material.Gc, ells[i]);
    const double rel = peak[i] / expected - 1.0;
    o.check(r.result.all_converged && std::abs(rel) <= 0.02,
            fmt("ell %.3f: peak stress %.2f", ells[i], peak[i]) + fmt(" vs %.2f (%+.2f%%, limit 2%%)", expected, 100 * rel));
  }
  const double ratio = peak[1] / peak[0];
  o.check(std::abs(ratio - 0.5) <= 0.02 * 0.5, fmt("peak(4 ell) / peak(ell) %.4f (expected 0.5, limit 2%%)", ratio));
  const double s = seconds_since(t0);
  o.check(s < 30.0, fmt("%.1f s (limit 30 s)", s));
  return o;
}

Outcome tangent_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen gen(2024);
  struct Combo {
    SplitScheme split;
    SpectralTrace trace;
    Formulation form;
    ElementKind kind;
  };
  std::vector<Combo> combos;
  for (auto kind : {ElementKind::Quad4PlaneStrain, ElementKind::Hex8})
    for (auto form : {Formulation::Hybrid, Formulation::Anisotropic}) {
      combos.push_back({SplitScheme::NoSplit, SpectralTrace::Macaulay, form, kind});
      combos.push_back({SplitScheme::VolDev, SpectralTrace::Macaulay, form, kind});
      combos.push_back({SplitScheme::Spectral, SpectralTrace::Macaulay, form, kind});
      combos.push_back({SplitScheme::Spectral, SpectralTrace::Literal, form, kind});
    }
  const int states = 1000;
  double worst_k = 0.0, worst_r = 0.0, worst_phi = 0.0;
  for (int s = 0; s < states; ++s) {
    const Combo& c = combos[s % combos.size()];
    MaterialModel model{ElasticProps(gen.uniform(1e3, 3e5), gen.uniform(0.0, 0.45)),
                        FractureProps(gen.uniform(0.1, 10), gen.uniform(0.01, 0.1)), c.split, c.form, c.trace};
    const int n = nodes_per_element(c.kind), dim = dimension_of(c.kind), ndof = n * dim;
    NodeCoords x(n, dim);
    const double size = gen.uniform(0.01, 1.0);
    for (int a = 0; a < n; ++a) {
      const auto xi = node_natural_coords(c.kind, a);
      for (int d = 0; d < dim; ++d) x(a, d) = size * (0.5 * (xi[d] + 1.0) + gen.uniform(-0.15, 0.15));
    }
    const ElementGeometry geo = element_geometry(c.kind, x);
    std::vector<double> u(ndof), phi(n), H(points_per_element(c.kind));
    const double strain = gen.uniform(1e-4, 1e-2);
    for (auto& v : u) v = gen.uniform(-1, 1) * strain * size;
    for (auto& v : phi) v = gen.uniform(0.0, 0.99);
    for (auto& v : H) v = gen.uniform(0.0, 100.0);

    DisplacementSystem sys;
    element_displacement_system(geo, u, phi, model, true, sys);
    const double kscale = sys.K.cwiseAbs().maxCoeff(), rscale = std::max(sys.R.cwiseAbs().maxCoeff(), 1e-300);
    const double h = 1e-7 * strain * size;
    for (int j = 0; j < ndof; ++j) {
      auto up = u, um = u;
      up[j] += h;
      um[j] -= h;
      DisplacementSystem p, q;
      element_displacement_system(geo, up, phi, model, false, p);
      element_displacement_system(geo, um, phi, model, false, q);
      const ElementVector fd = (p.R - q.R) / (2 * h);
      worst_k = std::max(worst_k, (fd - sys.K.col(j)).cwiseAbs().maxCoeff() / kscale);
      // The hybrid residual is not an energy gradient.
      if (c.form == Formulation::Anisotropic || c.split == SplitScheme::NoSplit)
        worst_r = std::max(worst_r, std::abs((p.elastic_energy - q.elastic_energy) / (2 * h) - sys.R(j)) / rscale);
    }

    PhaseSystem ph;
    element_phase_system(geo, phi, H, model.fracture, ph);
    const double pscale = ph.K.cwiseAbs().maxCoeff();
    for (int j = 0; j < n; ++j) {
      auto pp = phi, pm = phi;
      const double hp = 1e-6;
      pp[j] += hp;
      pm[j] -= hp;
      PhaseSystem a, b;
      element_phase_system(geo, pp, H, model.fracture, a);
      element_phase_system(geo, pm, H, model.fracture, b);
      const ElementVector fd = (a.R - b.R) / (2 * hp);
      worst_phi = std::max(worst_phi, (fd - ph.K.col(j)).cwiseAbs().maxCoeff() / pscale);
    }
  }
  Outcome o;
  o.check(true, std::to_string(states) + " states over " + std::to_string(combos.size()) + " combinations");
  o.check(worst_k <= 1e-6, fmt("displacement tangent %.2e", worst_k));
  o.check(worst_r <= 1e-6, fmt("residual vs energy %.2e", worst_r));
  o.check(worst_phi <= 1e-6, fmt("phase tangent %.2e (limit 1e-6)", worst_phi));
  const double s = seconds_since(t0);
  o.check(s < 60.0, fmt("%.1f s (limit 60 s)", s));
  return o;
}

// Shared plate tension run with the catalog settings (extrapolation on).
const CaseRun& tension_run() {
  static const CaseRun r = run_case(case_plate_tension());
  return r;
}

Outcome plate_tension() {
  const CaseRun& r = tension_run();
  const auto& recs = r.result.records;
  const Mesh& m = r.built.mesh;
  Outcome o;
  o.check(m.num_elements() >= 3000 && m.num_elements() <= 9000, std::to_string(m.num_elements()) + " elements");
  int failed = 0;
  for (const auto& rec : recs) failed += rec.converged ? 0 : 1;
  o.check(failed == 0 && recs.size() == 100, std::to_string(recs.size() - failed) + "/100 increments converged");

  const std::size_t p = peak_index(recs), d = drop_index(recs);
  o.check(d < recs.size() && d - p <= 3, "force falls below 10% of the peak " + std::to_string(d - p) +
                                             " increment(s) after the peak (limit 3)");
  bool single = d < recs.size();
  for (std::size_t i = d; i < recs.size(); ++i) single = single && recs[i].force < 0.1 * recs[p].force;
  o.check(single, "no recovery after the drop");

  // For every node column on the ligament some node near y = 0.5 is broken.
  const double ell = r.built.model.fracture.ell();
  std::map<double, double> column;
  for (std::size_t n = 0; n < m.num_nodes(); ++n) {
    const auto& x = m.nodes[n];
    if (x[0] >= 0.5 && std::abs(x[1] - 0.5) <= 2 * ell) {
      double& v = column[x[0]];
      v = std::max(v, r.result.state.phi(n));
    }
  }
  double weakest = 1.0;
  for (const auto& [x, v] : column) weakest = std::min(weakest, v);
  o.check(weakest > 0.95, fmt("smallest column max phi across the ligament %.3f (limit > 0.95)", weakest));
  o.check(r.seconds < 300.0, fmt("%.1f s (limit 300 s)", r.seconds));
  return o;
}

Outcome plate_shear() {
  const auto t0 = std::chrono::steady_clock::now();
  const CaseRun mono = run_case(case_plate_shear(Scheme::Monolithic));
  const CaseRun fine = run_case(case_plate_shear(Scheme::StaggeredSinglePass, 10000));
  const CaseRun coarse = run_case(case_plate_shear(Scheme::StaggeredSinglePass, 1000));
  Outcome o;
  const auto& rm = mono.result.records;
  const auto& rf = fine.result.records;
  const auto& rc = coarse.result.records;
  o.check(mono.result.all_converged, "monolithic converged every increment");

  // Crack path from the monolithic run: broken nodes beyond the notch tip.
  const Mesh& m = mono.built.mesh;
  const double ell = mono.built.model.fracture.ell();
  double upper = 0.0, reach = 0.0;
  std::array<double, 3> far{0.5, 0.5, 0};
  for (std::size_t n = 0; n < m.num_nodes(); ++n) {
    const auto& x = m.nodes[n];
    const double v = mono.result.state.phi(n);
    if (x[1] > 0.5 + 4 * ell) upper = std::max(upper, v);
    if (v > 0.95 && x[0] > 0.5) {
      const double dist = std::hypot(x[0] - 0.5, x[1] - 0.5);
      if (dist > reach) {
        reach = dist;
        far = x;
      }
    }
  }
  o.check(far[0] > 0.5 && far[1] < 0.5 - 0.5 * reach, fmt("crack tip reached (%.3f, %.3f)", far[0], far[1]));
  o.check(reach > 0.25, fmt("crack length %.3f (limit > 0.25)", reach));
  o.check(upper < 0.5, fmt("max phi in the upper half %.3f (limit < 0.5)", upper));

  const double dev_fine = max_deviation(rm, rf);
  o.check(dev_fine <= 0.05, fmt("staggered 1e4 vs monolithic max deviation %.2f%% of peak (limit 5%%)", 100 * dev_fine));
  int not_two = 0;
  for (const auto& rec : rf) not_two += rec.iterations == 2 ? 0 : 1;
  o.check(not_two == 0 && rf.size() == 10000, std::to_string(not_two) + " staggered steps not at 2 iterations");
  const int it_m = cumulative_iterations(rm, rm.size()), it_f = cumulative_iterations(rf, rf.size());
  o.check(it_f < it_m, "cumulative iterations staggered " + std::to_string(it_f) + " < monolithic " + std::to_string(it_m));

  const double pm = rm[peak_index(rm)].force, pc = rc[peak_index(rc)].force;
  o.check(std::abs(pc / pm - 1) <= 0.05, fmt("staggered 1e3 peak %.2f vs monolithic %.2f (limit 5%%)", pc, pm));
  const double dev_soft = max_deviation(rm, rc, peak_index(rm));
  o.check(dev_soft >= 0.05, fmt("staggered 1e3 softening deviation %.2f%% of peak (required >= 5%%)", 100 * dev_soft));
  const double s = seconds_since(t0);
  o.check(s < 900.0, fmt("monolithic %.0f s, total %.0f s (limit 900 s)", mono.seconds, s));
  return o;
}

Outcome irreversibility() {
  const auto& ref = tension_run().result.records;
  const std::size_t d = drop_index(ref);
  Outcome o;
  if (d >= ref.size()) {
    o.check(false, "reference tension run did not fail");
    return o;
  }
  // Same increment size as the monotonic run on every branch.
  CaseDefinition def = case_plate_tension();
  const double lambda_f = ref[d].load_factor, step = 1.0 / def.solve.n_increments;
  const int n_up = static_cast<int>(std::ceil(0.6 * lambda_f / step));
  const int N = 2 * n_up + def.solve.n_increments;
  def.amplitude.points = {{0, 0}, {double(n_up) / N, 0.6 * lambda_f}, {2.0 * n_up / N, 0.0}, {1, 1}};
  def.solve.n_increments = N;
  const CaseRun r = run_case(def, true);
  const auto& recs = r.result.records;

  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 1; i < r.phi.size(); ++i) {
    const double dmin = (r.phi[i] - r.phi[i - 1]).minCoeff();
    if (dmin < worst) {
      worst = dmin;
      at = i + 1;
    }
  }
  o.check(r.result.all_converged, "converged every increment");
  o.check(worst >= -1e-10, fmt("largest committed phi decrease %.2e", -worst) + " at increment " + std::to_string(at) +
                               " (limit 1e-10)");

  const IncrementRecord& top = recs[n_up - 1];
  double secant = 0.0;
  for (int i = n_up; i < 2 * n_up; ++i)
    secant = std::max(secant, std::abs(recs[i].force - top.force * recs[i].displacement / top.displacement) / top.force);
  o.check(secant <= 1e-3, fmt("unloading departs from the secant by %.2e of the unload force (limit 1e-3)", secant));
  o.check(std::abs(recs[2 * n_up - 1].force) <= 1e-3 * top.force, "zero force at zero displacement");
  const std::size_t dr = drop_index(recs);
  o.check(dr < recs.size() && dr >= static_cast<std::size_t>(2 * n_up), "reloaded to failure");
  o.check(true, fmt("%.1f s", r.seconds));
  return o;
}

Outcome split_behavior() {
  Outcome o;
  for (auto split : {SplitScheme::Spectral, SplitScheme::NoSplit}) {
    // Uniaxial strain compression: lateral faces held, top pushed down.
    CaseDefinition c;
    c.name = "compression";
    c.mesh.generator = MeshSpec::Generator::Rectangle;
    c.mesh.divisions = {4, 4, 1};
    c.material.split = split;
    c.bcs = {{"bottom", Dof::Y, 0.0}, {"left", Dof::X, 0.0}, {"right", Dof::X, 0.0}, {"top", Dof::Y, -0.01}};
    c.reaction_set = "top";
    c.solve.n_increments = 5;
    const CaseRun r = run_case(c);
    const MaterialModel& mm = r.built.model;
    const double psi0 = 0.5 * (mm.elastic.lambda() + 2 * mm.elastic.mu()) * 1e-4;
    const double hmin = r.result.state.history.minCoeff(), hmax = r.result.state.history.maxCoeff();
    if (split == SplitScheme::Spectral)
      o.check(r.result.all_converged && hmax <= 1e-12 * psi0, fmt("spectral: max H / psi0 %.1e (limit 1e-12)", hmax / psi0));
    else
      o.check(r.result.all_converged && hmin > 0.5 * psi0, fmt("no split: min H / psi0 %.3f (limit > 0.5)", hmin / psi0));
  }
  return o;
}

Outcome extrapolation_study() {
  const auto& on = tension_run().result.records;
  CaseDefinition def = case_plate_tension();
  def.solve.extrapolate = false;
  const CaseRun off_run = run_case(def);
  const auto& off = off_run.result.records;
  Outcome o;
  const std::size_t before = std::min(peak_index(on), peak_index(off));
  const int pre_on = cumulative_iterations(on, before), pre_off = cumulative_iterations(off, before);
  const int all_on = cumulative_iterations(on, on.size()), all_off = cumulative_iterations(off, off.size());
  o.check(pre_on < pre_off, "before failure (" + std::to_string(before) + " increments): on " + std::to_string(pre_on) +
                                " < off " + std::to_string(pre_off));
  const bool reverses = all_on >= all_off;
  const bool narrows = all_off - all_on < pre_off - pre_on;
  o.check(reverses || narrows, "full run: on " + std::to_string(all_on) + ", off " + std::to_string(all_off) +
                                   (reverses ? " (ordering reverses)" : narrows ? " (gap narrows)" : ""));
  o.check(off_run.result.all_converged, fmt("extrapolation off %.1f s", off_run.seconds));
  return o;
}

Outcome smoke_3d() {
  Outcome o;
  const CaseRun r = run_case(case_cube3d_smoke(0.1, false));
  bool finite = true;
  for (const auto& rec : r.result.records)
    finite = finite && std::isfinite(rec.elastic_energy) && std::isfinite(rec.fracture_energy) && std::isfinite(rec.force);
  o.check(r.result.all_converged && finite && r.result.records.size() == 10,
          std::to_string(r.built.mesh.num_elements()) + " hex elements, finite energies");

  CaseDefinition comp = case_cube3d_smoke(0.1, true);
  const CaseRun c = run_case(comp);
  // Phase field of the seeds alone: the same problem without load.
  comp.amplitude.points = {{0, 0}, {1, 0}};
  comp.solve.n_increments = 1;
  const CaseRun seed = run_case(comp);
  const double diff = (c.result.state.phi - seed.result.state.phi).cwiseAbs().maxCoeff();
  o.check(c.result.all_converged && diff <= 1e-10, fmt("compression phi departs from the seed field by %.1e (limit 1e-10)", diff));
  o.check(true, fmt("%.1f s", r.seconds + c.seconds + seed.seconds));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria", "pff_acceptance"};
  std::vector<int> only;
  app.add_option("criteria", only, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"analytic crack profile", crack_profile},
      {"homogeneous strength", bar_strength},
      {"tangent and residual consistency", tangent_consistency},
      {"plate tension", plate_tension},
      {"plate shear", plate_shear},
      {"irreversibility", irreversibility},
      {"split behavior under compression", split_behavior},
      {"extrapolation study", extrapolation_study},
      {"3D smoke", smoke_3d},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s [%s] (%.1f s)\n", id, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
