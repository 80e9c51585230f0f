#include "prrbc/assembly.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "prrbc/quadrature.hpp"

namespace prrbc {

namespace {

using Triplet = Eigen::Triplet<double>;

struct ElementMats {
  Eigen::Matrix<double, 12, 12> M, A, H;
};

// Element matrices on an affine P2 triangle.  dof order (2a+d) for node a,
// direction d; M carries rho, A is unit-Young plane strain, H = grad:grad + L2.
ElementMats element_matrices(const ComponentMesh& mesh, const std::array<int, 6>& t, double rho,
                             double nu) {
  ElementMats em;
  em.M.setZero();
  em.A.setZero();
  em.H.setZero();

  const auto& p0 = mesh.nodes[t[0]];
  const auto& p1 = mesh.nodes[t[1]];
  const auto& p2 = mesh.nodes[t[2]];
  Eigen::Matrix2d J;
  J << p1.x() - p0.x(), p2.x() - p0.x(), p1.y() - p0.y(), p2.y() - p0.y();
  const double detJ = J.determinant();
  if (!(detJ > 0) || std::abs(detJ) < 1e-30)
    throw std::runtime_error("degenerate triangle in assembly");
  const Eigen::Matrix2d JinvT = J.inverse().transpose();
  const double area = 0.5 * detJ;

  const double lam = lame_lambda(1.0, nu);
  const double mu = lame_mu(1.0, nu);

  // stiffness and gradient part of H: degree-2 rule is exact
  for (const auto& qp : tri_rule_deg2) {
    const auto gref = p2_gradients(qp.r, qp.s);
    std::array<Eigen::Vector2d, 6> g;
    for (int a = 0; a < 6; ++a) g[a] = JinvT * Eigen::Vector2d(gref[a][0], gref[a][1]);
    const double w = qp.w * area;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const double gg = g[a].dot(g[b]);
        for (int i = 0; i < 2; ++i) {
          em.H(2 * a + i, 2 * b + i) += w * gg;
          for (int j = 0; j < 2; ++j) {
            double v = lam * g[a](i) * g[b](j) + mu * g[a](j) * g[b](i);
            if (i == j) v += mu * gg;
            em.A(2 * a + i, 2 * b + j) += w * v;
          }
        }
      }
  }

  // mass and L2 part of H: degree-4 rule is exact for P2 x P2
  for (const auto& qp : tri_rule_deg4) {
    const auto phi = p2_values(qp.r, qp.s);
    const double w = qp.w * area;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const double pp = w * phi[a] * phi[b];
        for (int i = 0; i < 2; ++i) {
          em.M(2 * a + i, 2 * b + i) += rho * pp;
          em.H(2 * a + i, 2 * b + i) += pp;
        }
      }
  }
  return em;
}

SparseMat restrict_matrix(const SparseMat& full, const std::vector<int>& full_to_free,
                          int n_free) {
  std::vector<Triplet> trips;
  trips.reserve(full.nonZeros());
  for (int k = 0; k < full.outerSize(); ++k)
    for (SparseMat::InnerIterator it(full, k); it; ++it) {
      const int r = full_to_free[it.row()];
      const int c = full_to_free[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  SparseMat out(n_free, n_free);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

AffineOperatorSet assemble_impl(const ComponentMesh& mesh, double rho, double nu, int n_threads) {
  if (!(nu > 0 && nu < 0.5)) throw std::invalid_argument("Poisson ratio must lie in (0, 0.5)");
  const int n = mesh.num_dofs();
  const int n_tris = static_cast<int>(mesh.tris.size());

  std::vector<std::vector<Triplet>> tm(n_threads), ta(n_threads), th(n_threads);
  std::exception_ptr failure;

#pragma omp parallel num_threads(n_threads)
  {
    const int tid = omp_get_thread_num();
    auto& lm = tm[tid];
    auto& la = ta[tid];
    auto& lh = th[tid];
#pragma omp for schedule(static)
    for (int e = 0; e < n_tris; ++e) {
      try {
        const auto& t = mesh.tris[e];
        const ElementMats em = element_matrices(mesh, t, rho, nu);
        for (int a = 0; a < 6; ++a)
          for (int i = 0; i < 2; ++i) {
            const int ga = 2 * t[a] + i;
            for (int b = 0; b < 6; ++b)
              for (int j = 0; j < 2; ++j) {
                const int gb = 2 * t[b] + j;
                lm.emplace_back(ga, gb, em.M(2 * a + i, 2 * b + j));
                la.emplace_back(ga, gb, em.A(2 * a + i, 2 * b + j));
                lh.emplace_back(ga, gb, em.H(2 * a + i, 2 * b + j));
              }
          }
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  auto gather = [&](std::vector<std::vector<Triplet>>& parts) {
    std::vector<Triplet> all;
    size_t total = 0;
    for (auto& p : parts) total += p.size();
    all.reserve(total);
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    SparseMat m(n, n);
    m.setFromTriplets(all.begin(), all.end());
    return m;
  };

  AffineOperatorSet ops;
  ops.rho = rho;
  ops.nu = nu;
  ops.M0_full = gather(tm);
  ops.A0_full = gather(ta);
  ops.H1_full = gather(th);

  const std::vector<int> fixed = mesh.dirichlet_dofs();
  ops.full_to_free.assign(n, -1);
  size_t fi = 0;
  for (int d = 0; d < n; ++d) {
    if (fi < fixed.size() && fixed[fi] == d) {
      ++fi;
      continue;
    }
    ops.full_to_free[d] = static_cast<int>(ops.free_dofs.size());
    ops.free_dofs.push_back(d);
  }
  ops.n_free = static_cast<int>(ops.free_dofs.size());
  ops.M0 = restrict_matrix(ops.M0_full, ops.full_to_free, ops.n_free);
  ops.A0 = restrict_matrix(ops.A0_full, ops.full_to_free, ops.n_free);
  ops.H1 = restrict_matrix(ops.H1_full, ops.full_to_free, ops.n_free);
  return ops;
}

}  // namespace

Eigen::VectorXd AffineOperatorSet::restrict_to_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(n_free);
  for (int i = 0; i < n_free; ++i) out[i] = full[free_dofs[i]];
  return out;
}

AffineOperatorSet assemble_operators(const ComponentMesh& mesh, double rho, double nu,
                                     bool parallel) {
  return assemble_impl(mesh, rho, nu, parallel ? omp_get_max_threads() : 1);
}

AffineOperatorSet assemble_operators_serial(const ComponentMesh& mesh, double rho, double nu) {
  return assemble_impl(mesh, rho, nu, 1);
}

namespace {

// Accumulate the traction integral over one loaded boundary edge into f.
// The traction acts on the connection strip [-d1, d2] about the component
// midpoint (the region transmitting the vehicle-bridge interaction), so the
// activation switch only ever cuts the far Gaussian tail.  Composite Gauss
// panels sized by the Gaussian width resolve the integrand.
void edge_load(const ComponentMesh& mesh, const BoundaryEdge& e, const MovingLoad& load,
               double center_x, Eigen::VectorXd& f) {
  const auto& a = mesh.nodes[e.v0];
  const auto& b = mesh.nodes[e.v1];
  const double mid = 0.5 * mesh.geom.length;
  const double lo = std::max(std::min(a.x(), b.x()), mid - load.d1);
  const double hi = std::min(std::max(a.x(), b.x()), mid + load.d2);
  if (lo >= hi) return;
  // skip edges far outside the Gaussian support
  if (lo - center_x > 8 * load.sigma_x || center_x - hi > 8 * load.sigma_x) return;

  const double xi_a = (lo - a.x()) / (b.x() - a.x());
  const double xi_b = (hi - a.x()) / (b.x() - a.x());
  const double xi0 = std::min(xi_a, xi_b);
  const double total = std::abs(xi_b - xi_a);
  const double len = (b - a).norm();

  const int nodes[3] = {e.v0, e.v1, e.mid};
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / (0.5 * load.sigma_x))));
  for (int p = 0; p < panels; ++p) {
    const double t0 = xi0 + total * p / panels;
    const double dt = total / panels;
    for (const auto& gp : gauss4) {
      const double xi = t0 + gp.x * dt;
      const double w = gp.w * dt * len;
      const double x = a.x() + xi * (b.x() - a.x());
      const double d = (x - center_x) / load.sigma_x;
      const double g = load.amplitude * std::exp(-d * d);
      const auto phi = p2_edge_values(xi);
      for (int k = 0; k < 3; ++k) {
        f[2 * nodes[k]] += w * g * phi[k];
        f[2 * nodes[k] + 1] += -load.friction * w * g * phi[k];
      }
    }
  }
}

}  // namespace

Eigen::VectorXd assemble_load_vector(const ComponentMesh& mesh, const MovingLoad& load, double l) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_dofs());
  if (!load.active(l)) return f;
  const double center_x = l + 0.5 * mesh.geom.length;  // local frame centered at the midpoint
  for (const auto& e : mesh.boundary)
    if (e.tag == BoundaryTag::NeumannLoaded) edge_load(mesh, e, load, center_x, f);
  return f;
}

Eigen::VectorXd load_vector_entries(const ComponentMesh& mesh, const MovingLoad& load, double l,
                                    const std::vector<int>& dofs) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.size()));
  if (!load.active(l)) return out;
  const double center_x = l + 0.5 * mesh.geom.length;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_dofs());
  std::vector<char> wanted(mesh.num_nodes(), 0);
  for (int d : dofs) wanted[d / 2] = 1;
  for (const auto& e : mesh.boundary) {
    if (e.tag != BoundaryTag::NeumannLoaded) continue;
    if (wanted[e.v0] || wanted[e.v1] || wanted[e.mid]) edge_load(mesh, e, load, center_x, f);
  }
  for (size_t i = 0; i < dofs.size(); ++i) out[static_cast<Eigen::Index>(i)] = f[dofs[i]];
  return out;
}

}  // namespace prrbc
