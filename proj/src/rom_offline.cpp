#include "prrbc/rom_offline.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>

#include "prrbc/quadrature.hpp"

namespace prrbc {

namespace {

// Interior solver with values imposed on a constrained dof subset:
// A_II x_I = f_I - A_IC g.  The factorization is reused across right-hand
// sides, which the lifting training leans on heavily.
template <typename Scalar, typename Factorization>
class ConstrainedSolver {
 public:
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  using Mat = Eigen::SparseMatrix<Scalar>;

  ConstrainedSolver(const Mat& A, const std::vector<int>& constrained) {
    const int n = static_cast<int>(A.rows());
    to_interior_.assign(n, -1);
    std::vector<char> is_c(n, 0);
    for (int c : constrained) is_c[c] = 1;
    for (int i = 0; i < n; ++i)
      if (!is_c[i]) {
        to_interior_[i] = n_interior_;
        interior_.push_back(i);
        ++n_interior_;
      }
    std::vector<Eigen::Triplet<Scalar>> aii, aic;
    for (int k = 0; k < A.outerSize(); ++k)
      for (typename Mat::InnerIterator it(A, k); it; ++it) {
        const int ri = to_interior_[it.row()];
        if (ri < 0) continue;
        const int ci = to_interior_[it.col()];
        if (ci >= 0)
          aii.emplace_back(ri, ci, it.value());
        else
          aic.emplace_back(ri, static_cast<int>(it.col()), it.value());
      }
    Mat A_ii(n_interior_, n_interior_);
    A_ii.setFromTriplets(aii.begin(), aii.end());
    A_ic_.resize(n_interior_, n);
    A_ic_.setFromTriplets(aic.begin(), aic.end());
    solver_.compute(A_ii);
    if (solver_.info() != Eigen::Success)
      throw std::runtime_error("constrained interior operator is singular");
    n_ = n;
  }

  // f and g are full-length; only interior entries of f and constrained
  // entries of g are read
  Vec solve(const Vec& f, const Vec& g) const {
    Vec rhs(n_interior_);
    for (int i = 0; i < n_interior_; ++i) rhs[i] = f[interior_[i]];
    rhs -= A_ic_ * g;
    Vec x = solver_.solve(rhs);
    Vec full = g;
    for (int i = 0; i < n_interior_; ++i) full[interior_[i]] = x[i];
    return full;
  }

 private:
  int n_ = 0, n_interior_ = 0;
  std::vector<int> interior_, to_interior_;
  Mat A_ic_;
  Factorization solver_;
};

using RealConstrained = ConstrainedSolver<double, Eigen::SimplicialLDLT<SparseMat>>;
using ComplexConstrained = ConstrainedSolver<Complex, Eigen::SparseLU<SparseMatC>>;

SparseMatC arch_frequency_operator(const ArchetypeData& a, double youngs, double omega,
                                   double alpha, double beta) {
  const Complex cm = AffineOperatorSet::freq_mass_coeff(omega, alpha);
  const Complex ck = AffineOperatorSet::freq_stiff_coeff(omega, beta, youngs);
  return cm * a.ops.M0.cast<Complex>() + ck * a.ops.A0.cast<Complex>();
}

std::vector<int> all_port_dofs(const ArchetypeData& a) {
  std::vector<int> out = a.port_free_dofs[0];
  out.insert(out.end(), a.port_free_dofs[1].begin(), a.port_free_dofs[1].end());
  return out;
}

}  // namespace

SparseMat port_trace_gram(const ComponentMesh& mesh, PortSide side) {
  const auto dofs = extract_port_dofs(mesh, side);  // mesh dofs, node-sorted
  const int n_nodes = static_cast<int>(dofs.size()) / 2;
  std::map<int, int> node_pos;
  for (int i = 0; i < n_nodes; ++i) node_pos[dofs[2 * i] / 2] = i;

  const BoundaryTag want = side == PortSide::Left ? BoundaryTag::PortLeft : BoundaryTag::PortRight;
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& e : mesh.boundary) {
    if (e.tag != want) continue;
    const int local[3] = {node_pos.at(e.v0), node_pos.at(e.v1), node_pos.at(e.mid)};
    const double len = std::abs(mesh.nodes[e.v1].y() - mesh.nodes[e.v0].y());
    for (const auto& gp : gauss3) {
      const auto N = p2_edge_values(gp.x);
      const auto dN = p2_edge_derivs(gp.x);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const double v = gp.w * (len * N[a] * N[b] + dN[a] * dN[b] / len);
          for (int d = 0; d < 2; ++d)
            trips.emplace_back(2 * local[a] + d, 2 * local[b] + d, v);
        }
    }
  }
  SparseMat G(2 * n_nodes, 2 * n_nodes);
  G.setFromTriplets(trips.begin(), trips.end());
  return G;
}

std::vector<std::pair<int, int>> ref_port_pairs(int ref_port) {
  switch (ref_port) {
    case 0: return {{kAbutLeft, kTee}};
    case 1: return {{kTee, kSpan}, {kSpan, kTee}};
    case 2:
      return {{kSpan, kSpanLoaded}, {kSpanLoaded, kSpan}, {kSpan, kSpanCracked},
              {kSpanCracked, kSpan}};
    case 3: return {{kTee, kAbutRight}};
  }
  throw std::invalid_argument("reference port must be 0..3");
}

std::vector<std::pair<PortSide, int>> archetype_port_combos(int archetype) {
  using P = std::pair<PortSide, int>;
  switch (archetype) {
    case kAbutLeft: return {P{PortSide::Right, 0}};
    case kTee:
      return {P{PortSide::Left, 0}, P{PortSide::Left, 1}, P{PortSide::Right, 1},
              P{PortSide::Right, 3}};
    case kSpan:
      return {P{PortSide::Left, 1}, P{PortSide::Left, 2}, P{PortSide::Right, 1},
              P{PortSide::Right, 2}};
    case kSpanLoaded:
    case kSpanCracked: return {P{PortSide::Left, 2}, P{PortSide::Right, 2}};
    case kAbutRight: return {P{PortSide::Left, 3}};
  }
  throw std::invalid_argument("unknown archetype");
}

PortSpace train_port_space(const Library& lib, int ref_port, int n_train, int n_modes,
                           uint64_t seed, int* max_assembled_dofs) {
  const auto pairs = ref_port_pairs(ref_port);
  const auto& b = lib.cfg.bounds;
  const auto omegas = omega_set(lib.cfg);
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::normal_distribution<double> normal;

  struct PairSystem {
    AssembledChain chain;
    std::vector<int> outer;  // chain dofs carrying random data
    int loaded_comp = -1;    // 0/1 within the pair, -1 if none
  };
  std::vector<PairSystem> systems;
  for (const auto& [la, ra] : pairs) {
    PairSystem ps;
    ps.chain = assemble_chain(lib, {la, ra}, {1.0, 1.0});
    const auto& left = lib.of(la);
    const auto& right = lib.of(ra);
    for (int d : left.port_free_dofs[0]) ps.outer.push_back(ps.chain.dof_map[0][d]);
    for (int d : right.port_free_dofs[1]) ps.outer.push_back(ps.chain.dof_map[1][d]);
    if (left.loaded) ps.loaded_comp = 0;
    if (right.loaded) ps.loaded_comp = 1;
    if (max_assembled_dofs) *max_assembled_dofs = std::max(*max_assembled_dofs, ps.chain.n_dofs);
    systems.push_back(std::move(ps));
  }

  Eigen::MatrixXd traces;
  for (int s = 0; s < n_train; ++s) {
    PairSystem& ps = systems[s % systems.size()];
    const double e0 = uniform(b.youngs_min, b.youngs_max);
    const double e1 = uniform(b.youngs_min, b.youngs_max);
    const double alpha = uniform(b.alpha_min, b.alpha_max);
    const double beta = uniform(b.beta_min, b.beta_max);
    const double omega = omegas[std::uniform_int_distribution<size_t>(0, omegas.size() - 1)(rng)];

    std::array<double, 2> youngs = {e0, e1};
    SparseMatC A_hat = ps.chain.M0.cast<Complex>() *
                       AffineOperatorSet::freq_mass_coeff(omega, alpha);
    for (int c = 0; c < 2; ++c)
      A_hat += ps.chain.A0_comp[c].cast<Complex>() *
               AffineOperatorSet::freq_stiff_coeff(omega, beta, youngs[c]);

    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(ps.chain.n_dofs);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(ps.chain.n_dofs);
    const bool use_load = ps.loaded_comp >= 0 && (s % 2 == 1);
    if (use_load) {
      MovingLoad load;
      load.amplitude = uniform(b.amplitude_min, b.amplitude_max);
      load.sigma_x = uniform(b.sigma_x_min, b.sigma_x_max);
      load.friction = uniform(b.friction_min, b.friction_max);
      load.d1 = uniform(b.d_min, b.d_max);
      load.d2 = uniform(b.d_min, b.d_max);
      const double l = uniform(-load.d1 - 4 * load.sigma_x, load.d2 + 4 * load.sigma_x);
      const ArchetypeData& a = lib.of(ps.chain.arch[ps.loaded_comp]);
      const Eigen::VectorXd fl =
          a.ops.restrict_to_free(assemble_load_vector(a.mesh, load, l));
      f = ps.chain.scatter(ps.loaded_comp, Eigen::VectorXcd(fl.cast<Complex>()));
    } else {
      for (int d : ps.outer) g[d] = Complex(normal(rng), normal(rng));
    }

    ComplexConstrained solver(A_hat, ps.outer);
    const Eigen::VectorXcd u = solver.solve(f, g);

    const auto& iface = ps.chain.interface[0];
    const Eigen::Index np = static_cast<Eigen::Index>(iface.size());
    if (traces.rows() == 0) traces.resize(np, 0);
    traces.conservativeResize(Eigen::NoChange, traces.cols() + 2);
    for (Eigen::Index k = 0; k < np; ++k) {
      traces(k, traces.cols() - 2) = u[iface[k]].real();
      traces(k, traces.cols() - 1) = u[iface[k]].imag();
    }
  }

  const SparseMat G = port_trace_gram(lib.of(pairs[0].first).mesh, PortSide::Right);
  PodResult res = pod(traces, &G, n_modes);
  PortSpace space;
  space.ref_port = ref_port;
  space.modes = std::move(res.modes);
  space.eigenvalues = std::move(res.eigenvalues);
  space.retained_energy = res.retained_energy;
  return space;
}

std::vector<LiftingSet> train_archetype_liftings(
    const Library& lib, int archetype,
    const std::vector<std::pair<PortSide, const PortSpace*>>& combos, int n_samples, int n_b,
    uint64_t seed) {
  const ArchetypeData& a = lib.of(archetype);
  const std::vector<int> constrained = all_port_dofs(a);
  const int n = a.ops.n_free;
  const auto& b = lib.cfg.bounds;
  const auto omegas = omega_set(lib.cfg);
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  // trace value vectors per (combo, mode)
  std::vector<LiftingSet> sets(combos.size());
  std::vector<std::vector<Eigen::VectorXd>> traces(combos.size());
  for (size_t c = 0; c < combos.size(); ++c) {
    const auto& [side, space] = combos[c];
    const auto& port = a.port_free_dofs[side == PortSide::Left ? 0 : 1];
    if (port.empty()) throw std::invalid_argument("archetype has no port on that side");
    if (static_cast<int>(port.size()) != space->modes.rows())
      throw std::invalid_argument("port space does not match the port discretization");
    sets[c].side = side;
    sets[c].ref_port = space->ref_port;
    for (int k = 0; k < space->modes.cols(); ++k) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
      for (size_t i = 0; i < port.size(); ++i) g[port[i]] = space->modes(i, k);
      traces[c].push_back(std::move(g));
    }
  }

  // fixed discrete-harmonic lifting at unit Young's modulus
  RealConstrained harmonic(a.ops.A0, constrained);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for (size_t c = 0; c < combos.size(); ++c) {
    sets[c].lift.resize(n, traces[c].size());
    for (size_t k = 0; k < traces[c].size(); ++k)
      sets[c].lift.col(k) = harmonic.solve(zero, traces[c][k]);
  }

  // parameter sweep: remainders against the fixed lifting
  std::vector<std::vector<Eigen::MatrixXd>> snaps(combos.size());
  for (size_t c = 0; c < combos.size(); ++c)
    snaps[c].assign(traces[c].size(), Eigen::MatrixXd(n, 2 * n_samples));

  const Eigen::VectorXcd zero_c = Eigen::VectorXcd::Zero(n);
  for (int s = 0; s < n_samples; ++s) {
    const double youngs = uniform(b.youngs_min, b.youngs_max);
    const double alpha = uniform(b.alpha_min, b.alpha_max);
    const double beta = uniform(b.beta_min, b.beta_max);
    const double omega = omegas[std::uniform_int_distribution<size_t>(0, omegas.size() - 1)(rng)];
    ComplexConstrained solver(arch_frequency_operator(a, youngs, omega, alpha, beta), constrained);
    for (size_t c = 0; c < combos.size(); ++c)
      for (size_t k = 0; k < traces[c].size(); ++k) {
        const Eigen::VectorXcd x = solver.solve(zero_c, traces[c][k].cast<Complex>());
        const Eigen::VectorXcd rem = x - sets[c].lift.col(k).cast<Complex>();
        snaps[c][k].col(2 * s) = rem.real();
        snaps[c][k].col(2 * s + 1) = rem.imag();
      }
  }

  for (size_t c = 0; c < combos.size(); ++c) {
    sets[c].bubbles.resize(traces[c].size());
    for (size_t k = 0; k < traces[c].size(); ++k) {
      PodResult res = pod(snaps[c][k], &a.ops.H1, n_b);
      sets[c].bubbles[k] = std::move(res.modes);
    }
  }
  return sets;
}

Eigen::MatrixXd train_inhomogeneity_bubble(const Library& lib, int archetype, int n_samples,
                                           int n_b, uint64_t seed,
                                           Eigen::VectorXd* eigenvalues) {
  const ArchetypeData& a = lib.of(archetype);
  if (!a.eim) throw std::invalid_argument("archetype carries no load");
  const std::vector<int> constrained = all_port_dofs(a);
  const int n = a.ops.n_free;
  const auto& b = lib.cfg.bounds;
  const auto omegas = omega_set(lib.cfg);
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  Eigen::MatrixXd snaps(n, 2 * n_samples);
  const Eigen::VectorXcd zero_g = Eigen::VectorXcd::Zero(n);
  for (int s = 0; s < n_samples; ++s) {
    MovingLoad load;
    load.amplitude = uniform(b.amplitude_min, b.amplitude_max);
    load.sigma_x = uniform(b.sigma_x_min, b.sigma_x_max);
    load.friction = uniform(b.friction_min, b.friction_max);
    load.d1 = uniform(b.d_min, b.d_max);
    load.d2 = uniform(b.d_min, b.d_max);
    const double l = uniform(-load.d1 - 4 * load.sigma_x, load.d2 + 4 * load.sigma_x);
    const double youngs = uniform(b.youngs_min, b.youngs_max);
    const double alpha = uniform(b.alpha_min, b.alpha_max);
    const double beta = uniform(b.beta_min, b.beta_max);
    const double omega = omegas[std::uniform_int_distribution<size_t>(0, omegas.size() - 1)(rng)];

    const Eigen::VectorXd f = a.ops.restrict_to_free(a.eim->interpolate(a.mesh, load, l));
    ComplexConstrained solver(arch_frequency_operator(a, youngs, omega, alpha, beta), constrained);
    const Eigen::VectorXcd x = solver.solve(f.cast<Complex>(), zero_g);
    snaps.col(2 * s) = x.real();
    snaps.col(2 * s + 1) = x.imag();
  }
  PodResult res = pod(snaps, &a.ops.H1, n_b);  // throws when every snapshot is zero
  if (eigenvalues) *eigenvalues = res.eigenvalues;
  return res.modes;
}

const ArchCache::LiftEntry* ArchCache::find(PortSide side, int ref_port) const {
  for (const auto& e : lifts)
    if (e.side == side && e.ref_port == ref_port) return &e;
  return nullptr;
}

namespace {

ArchCache build_arch_cache(const Library& lib, int archetype, std::vector<LiftingSet> sets,
                           const Eigen::MatrixXd& inhomog,
                           const Eigen::VectorXd& inhomog_eigenvalues) {
  const ArchetypeData& a = lib.of(archetype);
  const int n = a.ops.n_free;
  ArchCache cache;

  int col = 0;
  for (const auto& s : sets) {
    ArchCache::LiftEntry e;
    e.side = s.side;
    e.ref_port = s.ref_port;
    e.n_modes = s.n_modes();
    e.col0 = col;
    col += e.n_modes;
    cache.lifts.push_back(e);
  }
  for (size_t i = 0; i < sets.size(); ++i) {
    auto& e = cache.lifts[i];
    e.n_b = sets[i].bubbles.empty() ? 0 : static_cast<int>(sets[i].bubbles[0].cols());
    for (const auto& bub : sets[i].bubbles) {
      e.bubble_col0.push_back(col);
      col += static_cast<int>(bub.cols());
    }
  }
  cache.n_f = static_cast<int>(inhomog.cols());
  cache.inhomog_col0 = cache.n_f > 0 ? col : -1;
  col += cache.n_f;
  cache.m = col;

  cache.V.setZero(n, cache.m);
  for (size_t i = 0; i < sets.size(); ++i) {
    const auto& e = cache.lifts[i];
    cache.V.middleCols(e.col0, e.n_modes) = sets[i].lift;
    for (size_t k = 0; k < sets[i].bubbles.size(); ++k)
      cache.V.middleCols(e.bubble_col0[k], sets[i].bubbles[k].cols()) = sets[i].bubbles[k];
  }
  if (cache.n_f > 0) cache.V.middleCols(cache.inhomog_col0, cache.n_f) = inhomog;
  cache.inhomog_eigenvalues = inhomog_eigenvalues;

  cache.VtM = cache.V.transpose() * (a.ops.M0 * cache.V);
  cache.VtA = cache.V.transpose() * (a.ops.A0 * cache.V);
  cache.VtH = cache.V.transpose() * (a.ops.H1 * cache.V);
  if (a.eim) {
    const int q = a.eim->size();
    cache.VtF.resize(cache.m, q);
    for (int j = 0; j < q; ++j)
      cache.VtF.col(j) =
          cache.V.transpose() * a.ops.restrict_to_free(a.eim->basis.col(j));
  }
  return cache;
}

}  // namespace

OfflineCache train_offline(const Library& lib, bool verbose) {
  const auto t0 = std::chrono::steady_clock::now();
  const Config& cfg = lib.cfg;
  OfflineCache cache;
  cache.library_hash = lib.hash;
  cache.mesh_h = cfg.mesh_h;
  cache.c_lower = cfg.c_lower;
  cache.c_upper = cfg.c_upper;
  cache.sigma_t_ref = cfg.sigma_t_ref();

  for (int r = 0; r < kNumRefPorts; ++r) {
    cache.ports[r] = train_port_space(lib, r, cfg.port_train_samples, cfg.port_modes[r],
                                      cfg.offline_seed + 11 * r, &cache.max_assembled_dofs);
    if (verbose)
      std::printf("port %d: %d modes, retained energy %.3e\n", r + 1,
                  static_cast<int>(cache.ports[r].modes.cols()),
                  cache.ports[r].retained_energy);
  }

  for (int a = 0; a < kNumArchetypes; ++a) {
    std::vector<std::pair<PortSide, const PortSpace*>> combos;
    for (auto [side, rp] : archetype_port_combos(a)) combos.emplace_back(side, &cache.ports[rp]);
    auto sets = train_archetype_liftings(lib, a, combos, cfg.bubble_train_samples,
                                         cfg.lifting_bubbles, cfg.offline_seed + 101 * (a + 1));
    Eigen::MatrixXd inhomog(lib.of(a).ops.n_free, 0);
    Eigen::VectorXd inhomog_ev;
    if (lib.of(a).loaded)
      inhomog = train_inhomogeneity_bubble(lib, a, cfg.bubble_train_samples,
                                           cfg.inhomogeneity_bubbles,
                                           cfg.offline_seed + 1009 * (a + 1), &inhomog_ev);
    cache.arch[a] = build_arch_cache(lib, a, std::move(sets), inhomog, inhomog_ev);
    cache.max_assembled_dofs = std::max(cache.max_assembled_dofs, lib.of(a).ops.n_free);
  }

  cache.offline_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (verbose) std::printf("offline stage: %.1f s\n", cache.offline_seconds);
  return cache;
}

}  // namespace prrbc
