#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pff/assembly.hpp"
#include "pff/linear_solver.hpp"

namespace pff {

enum class Scheme { Monolithic, StaggeredSinglePass, StaggeredMultiPass };
enum class OnFailure { Abort, Continue };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);  // "monolithic", "staggered", "staggered-multipass"

struct SolveConfig {
  Scheme scheme = Scheme::Monolithic;
  int n_increments = 100;
  int max_iterations = 500;
  double tol_relative = 1e-6;
  double tol_absolute = 1e-10;
  bool extrapolate = true;
  double stagger_tol = 1e-4;
  int max_stagger_passes = 200;
  OnFailure on_failure = OnFailure::Continue;
  int workers = 1;

  /// Throws ValidationError listing every bad field.
  void validate() const;
};

enum class Dof { X, Y, Z, Phi };
std::string_view to_string(Dof d);
Dof parse_dof(std::string_view text);

/// Prescribed value on every node of a set. Displacement values are scaled by
/// the load amplitude; phi values are held fixed (initial cracks).
struct DirichletBC {
  std::string node_set;
  Dof dof = Dof::X;
  double value = 0.0;
};

/// Piecewise-linear amplitude over the normalized time t = n / n_increments.
/// The default is the proportional ramp 0 -> 1.
struct LoadPath {
  std::vector<std::pair<double, double>> points{{0.0, 0.0}, {1.0, 1.0}};

  double operator()(double t) const;
  void validate() const;
};

struct LoadCase {
  std::vector<DirichletBC> bcs;
  /// Nodes with phi = 1 from the start; they stay constrained.
  IndexSet initial_crack;
  /// Reaction force is the sum over this set in `reaction_dof`.
  std::string reaction_set;
  Dof reaction_dof = Dof::Y;
  LoadPath amplitude;
};

struct IncrementRecord {
  int increment = 0;
  double load_factor = 0.0;
  double displacement = 0.0;  // prescribed value on the reaction set
  double force = 0.0;
  int iterations = 0;
  bool converged = false;
  double elastic_energy = 0.0;
  double fracture_energy = 0.0;
  double residual_u = 0.0;
  double residual_phi = 0.0;
  double max_phi = 0.0;
  double wall_seconds = 0.0;
};

/// Norms of one block at one iteration. `reference` is the residual scale the
/// relative tolerance applies to; `correction` is the size of the last update
/// (or an estimate of the next one), `field` the size of the unknown.
struct BlockNorms {
  double residual = 0.0;
  double reference = 0.0;
  double correction = 0.0;
  double field = 0.0;
};

/// True when both blocks pass the residual test
///   |R| <= tol_rel * |R_ref|  or  |R| <= tol_abs
/// and the correction test |dx| <= tol_rel * |x| + tol_abs.
/// Throws NumericalError if any norm is NaN or Inf.
bool convergence_check(const BlockNorms& u, const BlockNorms& phi, const SolveConfig& config);

/// x_t + ratio * (x_t - x_prev); identity when disabled or without history.
Eigen::VectorXd extrapolate_guess(const Eigen::VectorXd& x_t, const Eigen::VectorXd* x_prev, bool enabled,
                                  double ratio = 1.0);

struct RunResult {
  std::vector<IncrementRecord> records;
  FieldState state;
  bool all_converged = true;
  bool aborted = false;
};

struct RunCallbacks {
  std::function<void(const IncrementRecord&, const FieldState&)> on_increment;
  /// Invoked with the offending state before a NumericalError propagates.
  std::function<void(const FieldState&)> on_numerical_failure;
};

/// Drives one boundary value problem through all increments. Constraint masks,
/// the assembler and the factorization caches live here so single iterations
/// can also be exercised directly.
class Solver {
 public:
  Solver(const Mesh& mesh, MaterialModel model, LoadCase load, SolveConfig config);

  RunResult run(const RunCallbacks& callbacks = {});

  /// Initial state: zero fields, phi = 1 on the initial crack and phi BCs.
  FieldState initial_state() const;
  /// Writes the prescribed values for amplitude `a` into `state`.
  void apply_dirichlet(FieldState& state, double a) const;

  struct IterationResult {
    BlockNorms u, phi;
    int solves = 0;
  };
  /// Assemble both blocks at `state` (live history), solve each block once and
  /// update both fields. Norms are those of the residual before the update.
  IterationResult monolithic_iteration(FieldState& state);

  /// One staggered step. Single pass: u to convergence with phi frozen, then
  /// phi once with the history stored in `state`. Multi pass: repeat with the
  /// history refreshed from the current u until the pass correction is below
  /// stagger_tol. Returns the number of linear solves and whether the inner
  /// loops converged.
  std::pair<int, bool> staggered_iteration(FieldState& state);

  /// Displacement sub-problem with phi fixed, Newton to convergence. With
  /// force_solve at least one Newton step is taken even if the initial
  /// residual already passes.
  std::pair<int, bool> solve_displacement(FieldState& state, bool force_solve = false);
  /// Phase sub-problem (linear in phi) with the given history mode.
  void solve_phase(FieldState& state, HistoryMode mode);

  const Assembler& assembler() const { return assembler_; }
  const DofMap& dofs() const { return assembler_.dofs(); }
  const SolveConfig& config() const { return config_; }
  const MaterialModel& model() const { return model_; }

  /// Reaction force on the reaction set for a residual vector.
  double reaction(const Eigen::VectorXd& R_u) const;

 private:
  struct Prescribed {
    std::size_t index;
    double value;
  };
  double phase_field_floor() const;
  IterationResult evaluate_monolithic(const FieldState& state);
  void correct_monolithic(FieldState& state, IterationResult& r);

  const Mesh& mesh_;
  MaterialModel model_;
  LoadCase load_;
  SolveConfig config_;
  std::vector<Prescribed> u_prescribed_;
  std::vector<Prescribed> phi_prescribed_;
  std::vector<std::size_t> reaction_dofs_;
  double reaction_value_ = 0.0;
  Assembler assembler_;
  SparseSpdSolver solver_u_;
  SparseSpdSolver solver_phi_;
  GlobalSystem system_;
  double last_reaction_ = 0.0;
};

/// Convenience wrapper around Solver::run.
RunResult run(const Mesh& mesh, const MaterialModel& model, const LoadCase& load, const SolveConfig& config,
              const RunCallbacks& callbacks = {});

}  // namespace pff
