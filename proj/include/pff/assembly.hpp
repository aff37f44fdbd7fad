#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "pff/constitutive.hpp"
#include "pff/mesh.hpp"

namespace pff {

/// Which history field drives the phase block.
///  - Current: H = max(H_committed, psi+(u)) evaluated from the state being
///    assembled (monolithic scheme).
///  - Frozen: H = the history stored in the state, untouched (staggered).
enum class HistoryMode { Current, Frozen };

/// Primary unknowns plus the committed history field.
struct FieldState {
  Eigen::VectorXd u;        // node-major, `dimension` components per node
  Eigen::VectorXd phi;      // one value per node
  Eigen::VectorXd history;  // element-major, one value per quadrature point

  static FieldState zeros(const Mesh& mesh);
};

/// Global dof numbering. Constrained dofs keep their global slot but have no
/// free index; the reduced blocks only contain free-free couplings.
struct DofMap {
  int dimension = 2;
  std::size_t num_nodes = 0;
  std::vector<int> u_free;    // global u dof -> free index or -1
  std::vector<int> phi_free;  // node -> free index or -1
  std::vector<std::size_t> u_free_dofs;
  std::vector<std::size_t> phi_free_dofs;

  static DofMap build(const Mesh& mesh, const std::vector<bool>& u_constrained,
                      const std::vector<bool>& phi_constrained);
  static DofMap unconstrained(const Mesh& mesh);

  std::size_t num_u() const { return u_free.size(); }
  std::size_t num_u_free() const { return u_free_dofs.size(); }
  std::size_t num_phi_free() const { return phi_free_dofs.size(); }

  Eigen::VectorXd restrict_u(const Eigen::VectorXd& full) const;
  Eigen::VectorXd restrict_phi(const Eigen::VectorXd& full) const;
  void add_u(Eigen::VectorXd& full, const Eigen::VectorXd& free) const;
  void add_phi(Eigen::VectorXd& full, const Eigen::VectorXd& free) const;
};

/// Assembled displacement and phase blocks. There are no coupling blocks:
/// the two sub-systems only talk to each other through the state.
struct GlobalSystem {
  Eigen::SparseMatrix<double> K_u;    // free x free, both triangles stored
  Eigen::SparseMatrix<double> K_phi;  // free x free, both triangles stored
  Eigen::VectorXd R_u;                // every u dof; constrained rows hold reactions
  Eigen::VectorXd R_phi;              // every node
  Eigen::VectorXd psi_plus;           // per quadrature point, from the assembled u
  Eigen::VectorXd history;            // H that drove the phase block
  double elastic_energy = 0.0;
  double fracture_energy = 0.0;
  /// Norm of int (Gc/l + 2 H) N dV over free phase dofs, a scale for R_phi.
  double phase_scale_norm = 0.0;
};

struct AssemblyRequest {
  bool displacement = true;
  bool phase = true;
  bool tangent = true;
  HistoryMode history = HistoryMode::Current;
};

/// Caches element geometry, sparsity patterns and scatter maps for one mesh
/// and constraint set. Element loops are split into contiguous chunks, one per
/// worker, each accumulating into a private buffer; buffers are merged in
/// worker order so a fixed worker count is deterministic. Different worker
/// counts agree to floating-point associativity (about 1e-14 relative).
class Assembler {
 public:
  Assembler(const Mesh& mesh, DofMap dofs, int workers = 1);

  void assemble(const FieldState& state, const MaterialModel& model, const AssemblyRequest& request,
                GlobalSystem& out) const;

  const DofMap& dofs() const { return dofs_; }
  int workers() const { return workers_; }
  void set_workers(int workers) { workers_ = workers < 1 ? 1 : workers; }
  std::size_t num_points() const { return num_elements_ * points_per_element_; }
  int points_per_element() const { return points_per_element_; }
  const std::vector<ElementGeometry>& geometry() const { return geometry_; }

  /// Assemble in a caller-given element order (testing aid for order invariance).
  void set_element_order(std::vector<std::size_t> order) { order_ = std::move(order); }

 private:
  struct Chunk;
  void assemble_range(std::size_t begin, std::size_t end, const FieldState& state,
                      const MaterialModel& model, const AssemblyRequest& request, Chunk& chunk,
                      Eigen::VectorXd& psi_plus, Eigen::VectorXd& history) const;

  DofMap dofs_;
  int workers_;
  int dim_;
  ElementKind kind_;
  std::size_t num_elements_;
  int points_per_element_;
  std::vector<std::array<std::size_t, kMaxNodes>> connectivity_;
  std::vector<ElementGeometry> geometry_;
  std::vector<std::size_t> order_;

  Eigen::SparseMatrix<double> pattern_u_;
  Eigen::SparseMatrix<double> pattern_phi_;
  // Per element, row-major local (a, b) -> index into valuePtr(), or -1.
  std::vector<int> scatter_u_;
  std::vector<int> scatter_phi_;
};

/// One-shot assembly without constraints.
GlobalSystem assemble(const Mesh& mesh, const FieldState& state, const MaterialModel& model,
                      HistoryMode mode);

}  // namespace pff
