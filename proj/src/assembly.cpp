#include "pff/assembly.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <numeric>
#include <thread>

#include "pff/error.hpp"

namespace pff {

FieldState FieldState::zeros(const Mesh& mesh) {
  FieldState s;
  s.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes() * mesh.dimension));
  s.phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  s.history = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(mesh.num_elements() * points_per_element(mesh.element_kind())));
  return s;
}

DofMap DofMap::build(const Mesh& mesh, const std::vector<bool>& u_constrained,
                     const std::vector<bool>& phi_constrained) {
  DofMap m;
  m.dimension = mesh.dimension;
  m.num_nodes = mesh.num_nodes();
  const std::size_t nu = m.num_nodes * static_cast<std::size_t>(m.dimension);
  if (u_constrained.size() != nu || phi_constrained.size() != m.num_nodes)
    throw InvalidArgument("constraint masks do not match the mesh size");
  m.u_free.assign(nu, -1);
  m.phi_free.assign(m.num_nodes, -1);
  for (std::size_t i = 0; i < nu; ++i) {
    if (!u_constrained[i]) {
      m.u_free[i] = static_cast<int>(m.u_free_dofs.size());
      m.u_free_dofs.push_back(i);
    }
  }
  for (std::size_t i = 0; i < m.num_nodes; ++i) {
    if (!phi_constrained[i]) {
      m.phi_free[i] = static_cast<int>(m.phi_free_dofs.size());
      m.phi_free_dofs.push_back(i);
    }
  }
  return m;
}

DofMap DofMap::unconstrained(const Mesh& mesh) {
  return build(mesh, std::vector<bool>(mesh.num_nodes() * mesh.dimension, false),
               std::vector<bool>(mesh.num_nodes(), false));
}

Eigen::VectorXd DofMap::restrict_u(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(u_free_dofs.size()));
  for (std::size_t i = 0; i < u_free_dofs.size(); ++i) r(i) = full(u_free_dofs[i]);
  return r;
}

Eigen::VectorXd DofMap::restrict_phi(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(phi_free_dofs.size()));
  for (std::size_t i = 0; i < phi_free_dofs.size(); ++i) r(i) = full(phi_free_dofs[i]);
  return r;
}

void DofMap::add_u(Eigen::VectorXd& full, const Eigen::VectorXd& free) const {
  for (std::size_t i = 0; i < u_free_dofs.size(); ++i) full(u_free_dofs[i]) += free(i);
}

void DofMap::add_phi(Eigen::VectorXd& full, const Eigen::VectorXd& free) const {
  for (std::size_t i = 0; i < phi_free_dofs.size(); ++i) full(phi_free_dofs[i]) += free(i);
}

namespace {

// Sparse pattern of free-free couplings plus the element scatter map.
void build_pattern(std::size_t num_elements, int local_size,
                   const std::function<int(std::size_t, int)>& free_index, std::size_t n_free,
                   Eigen::SparseMatrix<double>& pattern, std::vector<int>& scatter) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(num_elements * local_size * local_size);
  for (std::size_t e = 0; e < num_elements; ++e) {
    for (int a = 0; a < local_size; ++a) {
      const int r = free_index(e, a);
      if (r < 0) continue;
      for (int b = 0; b < local_size; ++b) {
        const int c = free_index(e, b);
        if (c >= 0) triplets.emplace_back(r, c, 0.0);
      }
    }
  }
  pattern.resize(static_cast<Eigen::Index>(n_free), static_cast<Eigen::Index>(n_free));
  pattern.setFromTriplets(triplets.begin(), triplets.end());
  pattern.makeCompressed();

  scatter.assign(num_elements * local_size * local_size, -1);
  const int* outer = pattern.outerIndexPtr();
  const int* inner = pattern.innerIndexPtr();
  for (std::size_t e = 0; e < num_elements; ++e) {
    for (int a = 0; a < local_size; ++a) {
      const int r = free_index(e, a);
      if (r < 0) continue;
      for (int b = 0; b < local_size; ++b) {
        const int c = free_index(e, b);
        if (c < 0) continue;
        const int* first = inner + outer[c];
        const int* last = inner + outer[c + 1];
        const int* pos = std::lower_bound(first, last, r);
        scatter[(e * local_size + a) * local_size + b] = static_cast<int>(pos - inner);
      }
    }
  }
}

}  // namespace

struct Assembler::Chunk {
  Eigen::VectorXd values_u;
  Eigen::VectorXd values_phi;
  Eigen::VectorXd R_u;
  Eigen::VectorXd R_phi;
  Eigen::VectorXd drive;
  double elastic_energy = 0.0;
  double fracture_energy = 0.0;

  void reset(const Assembler& a, const AssemblyRequest& req) {
    if (req.displacement) {
      if (req.tangent) values_u.setZero(a.pattern_u_.nonZeros());
      R_u.setZero(static_cast<Eigen::Index>(a.dofs_.num_u()));
    }
    if (req.phase) {
      if (req.tangent) values_phi.setZero(a.pattern_phi_.nonZeros());
      R_phi.setZero(static_cast<Eigen::Index>(a.dofs_.num_nodes));
      drive.setZero(static_cast<Eigen::Index>(a.dofs_.num_nodes));
    }
    elastic_energy = 0.0;
    fracture_energy = 0.0;
  }
};

Assembler::Assembler(const Mesh& mesh, DofMap dofs, int workers)
    : dofs_(std::move(dofs)),
      workers_(workers < 1 ? 1 : workers),
      dim_(mesh.dimension),
      kind_(mesh.element_kind()),
      num_elements_(mesh.num_elements()),
      points_per_element_(pff::points_per_element(mesh.element_kind())) {
  connectivity_.reserve(num_elements_);
  geometry_.reserve(num_elements_);
  for (std::size_t e = 0; e < num_elements_; ++e) {
    connectivity_.push_back(mesh.elements[e].nodes);
    geometry_.push_back(element_geometry(mesh.elements[e].kind, mesh.element_coords(e), e));
  }
  order_.resize(num_elements_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});

  const int nn = nodes_per_element(kind_);
  build_pattern(
      num_elements_, nn * dim_,
      [&](std::size_t e, int a) { return dofs_.u_free[connectivity_[e][a / dim_] * dim_ + a % dim_]; },
      dofs_.num_u_free(), pattern_u_, scatter_u_);
  build_pattern(
      num_elements_, nn, [&](std::size_t e, int a) { return dofs_.phi_free[connectivity_[e][a]]; },
      dofs_.num_phi_free(), pattern_phi_, scatter_phi_);
}

void Assembler::assemble_range(std::size_t begin, std::size_t end, const FieldState& state,
                               const MaterialModel& model, const AssemblyRequest& req, Chunk& chunk,
                               Eigen::VectorXd& psi_plus, Eigen::VectorXd& history) const {
  const int nn = nodes_per_element(kind_);
  const int nu = nn * dim_;
  const int nq = points_per_element_;
  std::array<double, kMaxDofs> u_e{};
  std::array<double, kMaxNodes> phi_e{};
  std::array<double, kMaxNodes> H_e{};
  DisplacementSystem ds;
  PhaseSystem ps;

  for (std::size_t k = begin; k < end; ++k) {
    const std::size_t e = order_[k];
    const auto& conn = connectivity_[e];
    for (int a = 0; a < nn; ++a) {
      phi_e[a] = state.phi(conn[a]);
      for (int d = 0; d < dim_; ++d) u_e[a * dim_ + d] = state.u(conn[a] * dim_ + d);
    }
    const ElementGeometry& geo = geometry_[e];

    if (req.displacement || req.history == HistoryMode::Current) {
      element_displacement_system(geo, {u_e.data(), std::size_t(nu)}, {phi_e.data(), std::size_t(nn)},
                                  model, req.displacement && req.tangent, ds);
      for (int q = 0; q < nq; ++q) psi_plus(e * nq + q) = ds.psi_plus[q];
    }
    if (req.displacement) {
      for (int a = 0; a < nu; ++a) chunk.R_u(conn[a / dim_] * dim_ + a % dim_) += ds.R(a);
      if (req.tangent) {
        const int* map = scatter_u_.data() + e * nu * nu;
        for (int a = 0; a < nu; ++a)
          for (int b = 0; b < nu; ++b) {
            const int idx = map[a * nu + b];
            if (idx >= 0) chunk.values_u(idx) += ds.K(a, b);
          }
      }
      chunk.elastic_energy += ds.elastic_energy;
    }
    for (int q = 0; q < nq; ++q) {
      const double h_old = state.history(e * nq + q);
      H_e[q] = req.history == HistoryMode::Current ? update_history(ds.psi_plus[q], h_old) : h_old;
      history(e * nq + q) = H_e[q];
    }
    if (req.phase) {
      element_phase_system(geo, {phi_e.data(), std::size_t(nn)}, {H_e.data(), std::size_t(nq)},
                           model.fracture, ps);
      for (int a = 0; a < nn; ++a) {
        chunk.R_phi(conn[a]) += ps.R(a);
        chunk.drive(conn[a]) += ps.scale(a);
      }
      if (req.tangent) {
        const int* map = scatter_phi_.data() + e * nn * nn;
        for (int a = 0; a < nn; ++a)
          for (int b = 0; b < nn; ++b) {
            const int idx = map[a * nn + b];
            if (idx >= 0) chunk.values_phi(idx) += ps.K(a, b);
          }
      }
      chunk.fracture_energy += ps.fracture_energy;
    }
  }
}

void Assembler::assemble(const FieldState& state, const MaterialModel& model,
                         const AssemblyRequest& req, GlobalSystem& out) const {
  const std::size_t np = num_points();
  if (out.psi_plus.size() != static_cast<Eigen::Index>(np)) out.psi_plus.setZero(np);
  if (out.history.size() != static_cast<Eigen::Index>(np)) out.history.setZero(np);

  const int workers = static_cast<int>(std::min<std::size_t>(workers_, std::max<std::size_t>(num_elements_, 1)));
  std::vector<Chunk> chunks(workers);
  for (auto& c : chunks) c.reset(*this, req);

  if (workers == 1) {
    assemble_range(0, num_elements_, state, model, req, chunks[0], out.psi_plus, out.history);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t per = (num_elements_ + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t b = std::min(num_elements_, w * per), e = std::min(num_elements_, (w + 1) * per);
      threads.emplace_back([&, w, b, e] {
        try {
          assemble_range(b, e, state, model, req, chunks[w], out.psi_plus, out.history);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
    for (int w = 1; w < workers; ++w) {
      if (req.displacement) {
        if (req.tangent) chunks[0].values_u += chunks[w].values_u;
        chunks[0].R_u += chunks[w].R_u;
      }
      if (req.phase) {
        if (req.tangent) chunks[0].values_phi += chunks[w].values_phi;
        chunks[0].R_phi += chunks[w].R_phi;
        chunks[0].drive += chunks[w].drive;
      }
      chunks[0].elastic_energy += chunks[w].elastic_energy;
      chunks[0].fracture_energy += chunks[w].fracture_energy;
    }
  }

  Chunk& c = chunks[0];
  if (req.displacement) {
    if (req.tangent) {
      out.K_u = pattern_u_;
      std::copy(c.values_u.data(), c.values_u.data() + c.values_u.size(), out.K_u.valuePtr());
    }
    out.R_u = std::move(c.R_u);
    out.elastic_energy = c.elastic_energy;
  }
  if (req.phase) {
    if (req.tangent) {
      out.K_phi = pattern_phi_;
      std::copy(c.values_phi.data(), c.values_phi.data() + c.values_phi.size(), out.K_phi.valuePtr());
    }
    out.R_phi = std::move(c.R_phi);
    out.fracture_energy = c.fracture_energy;
    out.phase_scale_norm = dofs_.restrict_phi(c.drive).norm();
  }
}

GlobalSystem assemble(const Mesh& mesh, const FieldState& state, const MaterialModel& model,
                      HistoryMode mode) {
  Assembler a(mesh, DofMap::unconstrained(mesh));
  GlobalSystem sys;
  AssemblyRequest req;
  req.history = mode;
  a.assemble(state, model, req, sys);
  return sys;
}

}  // namespace pff
