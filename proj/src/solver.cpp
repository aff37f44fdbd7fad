#include "pff/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pff/error.hpp"

namespace pff {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Monolithic: return "monolithic";
    case Scheme::StaggeredSinglePass: return "staggered";
    case Scheme::StaggeredMultiPass: return "staggered-multipass";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "monolithic") return Scheme::Monolithic;
  if (text == "staggered" || text == "staggered-singlepass") return Scheme::StaggeredSinglePass;
  if (text == "staggered-multipass") return Scheme::StaggeredMultiPass;
  throw InvalidArgument("unknown scheme '" + std::string(text) +
                        "' (expected monolithic, staggered or staggered-multipass)");
}

std::string_view to_string(Dof d) {
  switch (d) {
    case Dof::X: return "x";
    case Dof::Y: return "y";
    case Dof::Z: return "z";
    case Dof::Phi: return "phi";
  }
  return "?";
}

Dof parse_dof(std::string_view text) {
  if (text == "x") return Dof::X;
  if (text == "y") return Dof::Y;
  if (text == "z") return Dof::Z;
  if (text == "phi") return Dof::Phi;
  throw InvalidArgument("unknown dof '" + std::string(text) + "' (expected x, y, z or phi)");
}

void SolveConfig::validate() const {
  std::vector<std::string> p;
  if (n_increments < 1) p.push_back("n_increments must be at least 1");
  if (max_iterations < 1) p.push_back("max_iterations must be at least 1");
  if (!(tol_relative > 0.0)) p.push_back("tol_relative must be positive");
  if (!(tol_absolute > 0.0)) p.push_back("tol_absolute must be positive");
  if (!(stagger_tol > 0.0)) p.push_back("stagger_tol must be positive");
  if (max_stagger_passes < 1) p.push_back("max_stagger_passes must be at least 1");
  if (workers < 1) p.push_back("workers must be at least 1");
  if (!p.empty()) throw ValidationError(std::move(p));
}

double LoadPath::operator()(double t) const {
  if (t <= points.front().first) return points.front().second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& [t1, a1] = points[i];
    if (t <= t1) {
      const auto& [t0, a0] = points[i - 1];
      return t1 > t0 ? a0 + (a1 - a0) * (t - t0) / (t1 - t0) : a1;
    }
  }
  return points.back().second;
}

void LoadPath::validate() const {
  std::vector<std::string> p;
  if (points.empty()) p.push_back("load path needs at least one point");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].first < points[i - 1].first) p.push_back("load path times must be non-decreasing");
  for (const auto& [t, a] : points)
    if (!std::isfinite(t) || !std::isfinite(a)) p.push_back("load path values must be finite");
  if (!p.empty()) throw ValidationError(std::move(p));
}

bool convergence_check(const BlockNorms& u, const BlockNorms& phi, const SolveConfig& c) {
  for (const BlockNorms* b : {&u, &phi}) {
    const char* name = b == &u ? "displacement" : "phase";
    for (double v : {b->residual, b->reference, b->correction, b->field})
      if (!std::isfinite(v))
        throw NumericalError(std::string("non-finite ") + name + " norm (residual " +
                             std::to_string(b->residual) + ", correction " + std::to_string(b->correction) +
                             ")");
  }
  auto ok = [&](const BlockNorms& b) {
    const bool residual = b.residual <= c.tol_relative * b.reference || b.residual <= c.tol_absolute;
    const bool correction = b.correction <= c.tol_relative * b.field + c.tol_absolute;
    return residual && correction;
  };
  return ok(u) && ok(phi);
}

Eigen::VectorXd extrapolate_guess(const Eigen::VectorXd& x_t, const Eigen::VectorXd* x_prev, bool enabled,
                                  double ratio) {
  if (!enabled || x_prev == nullptr || x_prev->size() != x_t.size()) return x_t;
  return x_t + ratio * (x_t - *x_prev);
}

namespace {

int component(Dof d, int dim) {
  const int c = d == Dof::X ? 0 : d == Dof::Y ? 1 : 2;
  if (c >= dim) throw InvalidArgument("dof " + std::string(to_string(d)) + " does not exist in " +
                                      std::to_string(dim) + "D");
  return c;
}

struct Constraints {
  std::vector<bool> u_mask, phi_mask;
};

Constraints constraints_of(const Mesh& mesh, const LoadCase& load) {
  Constraints c;
  c.u_mask.assign(mesh.num_nodes() * mesh.dimension, false);
  c.phi_mask.assign(mesh.num_nodes(), false);
  for (const auto& bc : load.bcs) {
    for (std::size_t n : mesh.node_set(bc.node_set)) {
      if (bc.dof == Dof::Phi) c.phi_mask[n] = true;
      else c.u_mask[n * mesh.dimension + component(bc.dof, mesh.dimension)] = true;
    }
  }
  for (std::size_t n : load.initial_crack) {
    if (n >= mesh.num_nodes()) throw InvalidArgument("initial crack references node " + std::to_string(n));
    c.phi_mask[n] = true;
  }
  return c;
}

DofMap dof_map_of(const Mesh& mesh, const LoadCase& load) {
  const Constraints c = constraints_of(mesh, load);
  return DofMap::build(mesh, c.u_mask, c.phi_mask);
}

using Clock = std::chrono::steady_clock;

}  // namespace

Solver::Solver(const Mesh& mesh, MaterialModel model, LoadCase load, SolveConfig config)
    : mesh_(mesh),
      model_(model),
      load_(std::move(load)),
      config_(config),
      assembler_(mesh, dof_map_of(mesh, load_), config.workers) {
  config_.validate();
  load_.amplitude.validate();
  const int dim = mesh.dimension;
  for (const auto& bc : load_.bcs) {
    for (std::size_t n : mesh.node_set(bc.node_set)) {
      if (bc.dof == Dof::Phi) phi_prescribed_.push_back({n, bc.value});
      else u_prescribed_.push_back({n * dim + component(bc.dof, dim), bc.value});
    }
  }
  for (std::size_t n : load_.initial_crack) phi_prescribed_.push_back({n, 1.0});
  if (!load_.reaction_set.empty()) {
    if (load_.reaction_dof == Dof::Phi) throw InvalidArgument("reaction dof must be a displacement component");
    const int c = component(load_.reaction_dof, dim);
    for (std::size_t n : mesh.node_set(load_.reaction_set)) reaction_dofs_.push_back(n * dim + c);
    for (const auto& bc : load_.bcs)
      if (bc.node_set == load_.reaction_set && bc.dof == load_.reaction_dof) reaction_value_ = bc.value;
  }
}

FieldState Solver::initial_state() const {
  FieldState s = FieldState::zeros(mesh_);
  for (const auto& p : phi_prescribed_) s.phi(p.index) = p.value;
  return s;
}

void Solver::apply_dirichlet(FieldState& state, double a) const {
  for (const auto& p : u_prescribed_) state.u(p.index) = a * p.value;
  for (const auto& p : phi_prescribed_) state.phi(p.index) = p.value;
}

double Solver::reaction(const Eigen::VectorXd& R_u) const {
  double f = 0.0;
  for (std::size_t i : reaction_dofs_) f += R_u(i);
  return f;
}

double Solver::phase_field_floor() const {
  return std::sqrt(static_cast<double>(dofs().num_phi_free()));
}

namespace {

double reaction_norm(const DofMap& dofs, const Eigen::VectorXd& R_u) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < R_u.size(); ++i)
    if (dofs.u_free[i] < 0) s += R_u(i) * R_u(i);
  return std::sqrt(s);
}

}  // namespace

Solver::IterationResult Solver::evaluate_monolithic(const FieldState& state) {
  AssemblyRequest req;
  req.history = HistoryMode::Current;
  assembler_.assemble(state, model_, req, system_);
  const DofMap& d = dofs();
  IterationResult r;
  r.u.residual = d.restrict_u(system_.R_u).norm();
  r.u.reference = reaction_norm(d, system_.R_u);
  r.u.field = state.u.norm();
  r.phi.residual = d.restrict_phi(system_.R_phi).norm();
  r.phi.reference = system_.phase_scale_norm;
  r.phi.field = std::max(state.phi.norm(), phase_field_floor());
  last_reaction_ = reaction(system_.R_u);
  return r;
}

void Solver::correct_monolithic(FieldState& state, IterationResult& r) {
  const DofMap& d = dofs();
  if (d.num_u_free() > 0) {
    solver_u_.factorize(system_.K_u);
    const Eigen::VectorXd du = solver_u_.solve(-d.restrict_u(system_.R_u));
    d.add_u(state.u, du);
    r.u.correction = du.norm();
  }
  if (d.num_phi_free() > 0) {
    solver_phi_.factorize(system_.K_phi);
    const Eigen::VectorXd dp = solver_phi_.solve(-d.restrict_phi(system_.R_phi));
    d.add_phi(state.phi, dp);
    r.phi.correction = dp.norm();
  }
  r.solves = 1;
}

Solver::IterationResult Solver::monolithic_iteration(FieldState& state) {
  IterationResult r = evaluate_monolithic(state);
  if (!std::isfinite(r.u.residual) || !std::isfinite(r.phi.residual))
    throw NumericalError("non-finite residual norm");
  correct_monolithic(state, r);
  return r;
}

std::pair<int, bool> Solver::solve_displacement(FieldState& state, bool force_solve) {
  const DofMap& d = dofs();
  AssemblyRequest req;
  req.phase = false;
  req.history = HistoryMode::Frozen;
  const BlockNorms idle{};
  double reference = 0.0, last_residual = 0.0, last_correction = 0.0;
  for (int k = 0; k <= config_.max_iterations; ++k) {
    // Later iterations check the residual first and only build the tangent
    // when another step is needed.
    req.tangent = k == 0;
    assembler_.assemble(state, model_, req, system_);
    const Eigen::VectorXd Ru = d.restrict_u(system_.R_u);
    last_reaction_ = reaction(system_.R_u);
    BlockNorms n;
    n.residual = Ru.norm();
    if (k == 0) reference = n.residual;
    n.reference = std::max(reference, reaction_norm(d, system_.R_u));
    n.field = state.u.norm();
    if (k == 0) {
      n.correction = n.residual <= config_.tol_absolute ? 0.0 : std::numeric_limits<double>::max();
    } else {
      // Predicted size of the next Newton step from the residual reduction.
      n.correction = last_residual > 0.0 ? last_correction * std::min(1.0, n.residual / last_residual) : 0.0;
    }
    if ((k > 0 || !force_solve) && convergence_check(n, idle, config_)) return {k, true};
    if (k == config_.max_iterations || Ru.size() == 0) return {k, Ru.size() == 0};
    if (!req.tangent) {
      req.tangent = true;
      assembler_.assemble(state, model_, req, system_);
    }
    solver_u_.factorize(system_.K_u);
    const Eigen::VectorXd du = solver_u_.solve(-Ru);
    d.add_u(state.u, du);
    last_residual = n.residual;
    last_correction = du.norm();
  }
  return {config_.max_iterations, false};
}

void Solver::solve_phase(FieldState& state, HistoryMode mode) {
  const DofMap& d = dofs();
  AssemblyRequest req;
  req.displacement = false;
  req.history = mode;
  assembler_.assemble(state, model_, req, system_);
  const Eigen::VectorXd Rp = d.restrict_phi(system_.R_phi);
  if (!Rp.allFinite()) throw NumericalError("non-finite phase residual");
  if (Rp.size() == 0) return;
  solver_phi_.factorize(system_.K_phi);
  d.add_phi(state.phi, solver_phi_.solve(-Rp));
}

std::pair<int, bool> Solver::staggered_iteration(FieldState& state) {
  if (config_.scheme == Scheme::StaggeredSinglePass) {
    const auto [n, ok] = solve_displacement(state, true);
    solve_phase(state, HistoryMode::Frozen);
    return {n + (dofs().num_phi_free() > 0 ? 1 : 0), ok};
  }
  int solves = 0;
  for (int pass = 0; pass < config_.max_stagger_passes; ++pass) {
    const Eigen::VectorXd u0 = state.u, phi0 = state.phi;
    const auto [n, ok] = solve_displacement(state);
    solves += n;
    if (!ok) return {solves, false};
    solve_phase(state, HistoryMode::Current);
    solves += dofs().num_phi_free() > 0 ? 1 : 0;
    const double du = (state.u - u0).norm() / std::max(state.u.norm(), 1e-300);
    const double dp = (state.phi - phi0).norm() / std::max(state.phi.norm(), phase_field_floor());
    if (std::max(du, dp) < config_.stagger_tol) {
      // The last phase update moved u off equilibrium by at most the pass tolerance.
      return {solves, true};
    }
  }
  return {solves, false};
}

RunResult Solver::run(const RunCallbacks& callbacks) {
  RunResult result;
  FieldState committed = initial_state();
  apply_dirichlet(committed, load_.amplitude(0.0));
  FieldState previous;
  bool have_previous = false;
  double lambda_prev = load_.amplitude(0.0), dlambda_prev = 0.0;
  const int N = config_.n_increments;

  for (int n = 1; n <= N; ++n) {
    const auto t0 = Clock::now();
    const double lambda = load_.amplitude(static_cast<double>(n) / N);
    const double dlambda = lambda - lambda_prev;
    FieldState state = committed;
    if (config_.extrapolate && have_previous && dlambda_prev != 0.0) {
      const double ratio = dlambda / dlambda_prev;
      state.u = extrapolate_guess(committed.u, &previous.u, true, ratio);
      state.phi = extrapolate_guess(committed.phi, &previous.phi, true, ratio)
                      .cwiseMax(committed.phi)
                      .cwiseMin(1.0);
    }
    apply_dirichlet(state, lambda);

    IncrementRecord rec;
    rec.increment = n;
    rec.load_factor = lambda;
    rec.displacement = lambda * reaction_value_;
    try {
      if (config_.scheme == Scheme::Monolithic) {
        double corr_u = 0.0, corr_p = 0.0, ref_u = 0.0, ref_p = 0.0;
        for (int k = 0;; ++k) {
          IterationResult it = evaluate_monolithic(state);
          if (k == 0) {
            ref_u = it.u.residual;
            ref_p = it.phi.residual;
          }
          BlockNorms u = it.u, p = it.phi;
          u.reference = std::max(u.reference, ref_u);
          p.reference = std::max(p.reference, ref_p);
          if (k == 0) {
            const bool trivial = u.residual <= config_.tol_absolute && p.residual <= config_.tol_absolute;
            u.correction = p.correction = trivial ? 0.0 : std::numeric_limits<double>::max();
          } else {
            u.correction = corr_u;
            p.correction = corr_p;
          }
          rec.residual_u = it.u.residual;
          rec.residual_phi = it.phi.residual;
          if (convergence_check(u, p, config_)) {
            rec.converged = true;
            break;
          }
          if (k == config_.max_iterations) break;
          correct_monolithic(state, it);
          rec.iterations = k + 1;
          corr_u = it.u.correction;
          corr_p = it.phi.correction;
        }
        // Bring phi in line with the history that is about to be committed, so
        // an unchanged history reproduces the same phi in later increments.
        if (rec.converged) solve_phase(state, HistoryMode::Current);
      } else {
        const auto [solves, ok] = staggered_iteration(state);
        rec.iterations = solves;
        rec.converged = ok;
      }
    } catch (const NumericalError& e) {
      if (callbacks.on_numerical_failure) callbacks.on_numerical_failure(state);
      throw NumericalError("increment " + std::to_string(n) + ": " + e.what());
    } catch (const LinearSolveError& e) {
      throw LinearSolveError("increment " + std::to_string(n) + ": " + e.what());
    }
    const double staggered_force = last_reaction_;

    // Commit: history from the final state, energies and reactions for the record.
    AssemblyRequest post;
    post.tangent = false;
    post.history = HistoryMode::Current;
    assembler_.assemble(state, model_, post, system_);
    state.history = system_.history;
    rec.force = config_.scheme == Scheme::Monolithic ? reaction(system_.R_u) : staggered_force;
    rec.elastic_energy = system_.elastic_energy;
    rec.fracture_energy = system_.fracture_energy;
    rec.max_phi = state.phi.size() ? state.phi.maxCoeff() : 0.0;
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!rec.converged) result.all_converged = false;

    previous = std::move(committed);
    have_previous = true;
    committed = std::move(state);
    dlambda_prev = dlambda;
    lambda_prev = lambda;
    result.records.push_back(rec);
    if (callbacks.on_increment) callbacks.on_increment(rec, committed);
    if (!rec.converged && config_.on_failure == OnFailure::Abort) {
      result.aborted = true;
      break;
    }
  }
  result.state = std::move(committed);
  return result;
}

RunResult run(const Mesh& mesh, const MaterialModel& model, const LoadCase& load, const SolveConfig& config,
              const RunCallbacks& callbacks) {
  Solver s(mesh, model, load, config);
  return s.run(callbacks);
}

}  // namespace pff
