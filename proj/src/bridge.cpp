#include "prrbc/bridge.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace prrbc {

SystemTopology SystemTopology::standard(const Config& cfg) {
  SystemTopology t;
  const double L = cfg.span_length;
  // components 1 and 23 are abutments, even components are tees, components
  // 4, 12, 20 are loaded spans, 8 and 16 damage candidates, the rest plain spans
  for (int c = 0; c < n_comp; ++c) {
    if (c == 0)
      t.base_arch[c] = kAbutLeft;
    else if (c == n_comp - 1)
      t.base_arch[c] = kAbutRight;
    else if (c % 4 == 1)
      t.base_arch[c] = kTee;
    else if (c % 4 == 3)
      t.base_arch[c] = kSpanLoaded;
    else
      t.base_arch[c] = kSpan;
  }
  double x = 0;
  for (int c = 0; c < n_comp; ++c) {
    t.length[c] = (c == 0 || c == n_comp - 1) ? 1.5 * L : L;
    t.x_offset[c] = x;
    x += t.length[c];
  }
  t.bridge_length = x;
  for (int p = 0; p < n_comp - 1; ++p) {
    const int a = t.base_arch[p], b = t.base_arch[p + 1];
    if (a == kAbutLeft)
      t.port_ref[p] = 0;
    else if (b == kAbutRight)
      t.port_ref[p] = 3;
    else if (a == kSpanLoaded || b == kSpanLoaded)
      t.port_ref[p] = 2;
    else
      t.port_ref[p] = 1;
  }
  return t;
}

Eigen::VectorXd GlobalParameter::flatten() const {
  Eigen::VectorXd v(45);
  int k = 0;
  v[k++] = theta[0];
  v[k++] = theta[1];
  v[k++] = alpha_ray;
  v[k++] = beta_ray;
  for (double e : youngs) v[k++] = e;
  for (const auto& a : axles) {
    v[k++] = a.amplitude;
    v[k++] = a.sigma_x;
    v[k++] = a.friction;
  }
  v[k++] = speed;
  v[k++] = axle_gap;
  for (const auto& [d1, d2] : activation) {
    v[k++] = d1;
    v[k++] = d2;
  }
  return v;
}

GlobalParameter sample_parameter(const ParameterBounds& b, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  GlobalParameter mu;
  std::uniform_int_distribution<int> coin(1, 2);
  mu.theta[0] = coin(rng);
  mu.theta[1] = coin(rng);
  mu.alpha_ray = uniform(b.alpha_min, b.alpha_max);
  mu.beta_ray = uniform(b.beta_min, b.beta_max);
  for (auto& e : mu.youngs) e = uniform(b.youngs_min, b.youngs_max);
  for (auto& a : mu.axles) {
    a.amplitude = uniform(b.amplitude_min, b.amplitude_max);
    a.sigma_x = uniform(b.sigma_x_min, b.sigma_x_max);
    a.friction = uniform(b.friction_min, b.friction_max);
  }
  mu.speed = uniform(b.speed_min, b.speed_max);
  std::normal_distribution<double> gap(b.axle_gap_mean, b.axle_gap_std);
  do {
    mu.axle_gap = gap(rng);
  } while (std::abs(mu.axle_gap - b.axle_gap_mean) > 4 * b.axle_gap_std);
  for (auto& [d1, d2] : mu.activation) {
    d1 = uniform(b.d_min, b.d_max);
    d2 = uniform(b.d_min, b.d_max);
  }
  return mu;
}

GlobalParameter example_parameter(const ParameterBounds& b, int which) {
  if (which < 1 || which > 4) throw std::invalid_argument("example parameter case must be 1..4");
  const double s = which == 3 ? 0.0 : which == 4 ? 1.0 : 0.5;
  auto pick = [s](double lo, double hi) { return lo + s * (hi - lo); };
  GlobalParameter mu;
  switch (which) {
    case 1: mu.theta = {1, 1}; break;
    case 2: mu.theta = {2, 1}; break;
    case 3: mu.theta = {1, 2}; break;
    case 4: mu.theta = {2, 2}; break;
  }
  mu.alpha_ray = pick(b.alpha_min, b.alpha_max);
  mu.beta_ray = pick(b.beta_min, b.beta_max);
  for (auto& e : mu.youngs) e = pick(b.youngs_min, b.youngs_max);
  for (auto& a : mu.axles) {
    a.amplitude = pick(b.amplitude_min, b.amplitude_max);
    a.sigma_x = pick(b.sigma_x_min, b.sigma_x_max);
    a.friction = pick(b.friction_min, b.friction_max);
  }
  mu.speed = pick(b.speed_min, b.speed_max);
  mu.axle_gap = b.axle_gap_mean +
                (which == 3 ? -4.0 : which == 4 ? 4.0 : 0.0) * b.axle_gap_std;
  for (auto& [d1, d2] : mu.activation) {
    d1 = pick(b.d_min, b.d_max);
    d2 = pick(b.d_min, b.d_max);
  }
  return mu;
}

VehicleSchedule schedule_vehicle(const GlobalParameter& mu, double bridge_length) {
  if (!(mu.speed > 0)) throw std::invalid_argument("vehicle speed must be positive");
  const double sigma = std::max(mu.axles[0].sigma_x, mu.axles[1].sigma_x);
  VehicleSchedule s;
  s.speed = mu.speed;
  s.entry_x[0] = -4 * sigma;               // front axle
  s.entry_x[1] = -4 * sigma - mu.axle_gap;  // rear axle
  s.t_final = (bridge_length + mu.axle_gap + 8 * sigma) / mu.speed;
  return s;
}

Library Library::build(const Config& cfg) {
  cfg.validate();
  Library lib;
  lib.cfg = cfg;
  lib.hash = cfg.library_hash();
  lib.topo = SystemTopology::standard(cfg);

  const double L = cfg.span_length, H = cfg.thickness;
  const double crack_tip = H * (1.0 - cfg.crack_depth_frac);
  const double extra[] = {crack_tip};

  auto make = [&](int slot, ComponentKind kind, double length, bool mirrored, bool with_crack) {
    ArchetypeData d;
    d.geom.kind = kind;
    d.geom.length = length;
    d.geom.thickness = H;
    d.geom.mirrored = mirrored;
    d.geom.pier_height_factor = cfg.pier_height_factor;
    if (with_crack)
      d.geom.crack = CrackSpec{0.5 * length, cfg.crack_depth_frac * H, cfg.crack_opening};
    d.mesh = generate_component_mesh(d.geom, cfg.mesh_h, extra);
    d.ops = assemble_operators(d.mesh, cfg.bounds.rho, cfg.bounds.nu);
    for (PortSide side : {PortSide::Left, PortSide::Right}) {
      if (!d.mesh.has_port(side)) continue;
      auto full = extract_port_dofs(d.mesh, side);
      auto& out = d.port_free_dofs[side == PortSide::Left ? 0 : 1];
      out.reserve(full.size());
      for (int dof : full) {
        const int f = d.ops.full_to_free[dof];
        if (f < 0) throw std::runtime_error("port dof is Dirichlet-constrained");
        out.push_back(f);
      }
    }
    d.loaded = kind == ComponentKind::RectLoaded || kind == ComponentKind::RectLoadedCracked;
    lib.arch[slot] = std::move(d);
  };

  make(kAbutLeft, ComponentKind::Rect15L, 1.5 * L, false, false);
  make(kTee, ComponentKind::TShape, L, false, false);
  make(kSpan, ComponentKind::Rect, L, false, false);
  make(kSpanLoaded, ComponentKind::RectLoaded, L, false, false);
  make(kSpanCracked, ComponentKind::RectLoadedCracked, L, false, true);
  make(kAbutRight, ComponentKind::Rect15L, 1.5 * L, true, false);

  // affine load surrogate per loaded archetype, trained over the widest
  // activation window with grid spacing set by the narrowest load
  const auto& b = cfg.bounds;
  MovingLoad widest;
  widest.amplitude = 1.0;
  widest.sigma_x = b.sigma_x_max;
  widest.friction = 0.5 * (b.friction_min + b.friction_max);
  widest.d1 = widest.d2 = b.d_max;
  const double hi = b.d_max + 4 * b.sigma_x_max;
  const double spacing = b.sigma_x_min / cfg.eim_points_per_sigma;
  const int n_pts = static_cast<int>(std::ceil(2 * hi / spacing));
  std::vector<double> grid(n_pts + 1);
  for (int i = 0; i <= n_pts; ++i) grid[i] = -hi + 2 * hi * i / n_pts;
  const std::vector<double> sigmas = {b.sigma_x_min, 0.5 * (b.sigma_x_min + b.sigma_x_max),
                                      b.sigma_x_max};
  const std::vector<double> frictions = {b.friction_min, b.friction_max};
  EimTrainOptions eim_opts;
  eim_opts.tol = cfg.eim_tol;
  eim_opts.q_max = cfg.eim_q_max;
  for (int slot : {kSpanLoaded, kSpanCracked})
    lib.arch[slot].eim =
        eim_train(lib.arch[slot].mesh, widest, grid, sigmas, frictions, eim_opts);

  return lib;
}

SparseMat AssembledChain::stiffness() const {
  SparseMat A(n_dofs, n_dofs);
  for (size_t c = 0; c < A0_comp.size(); ++c) A += youngs[c] * A0_comp[c];
  return A;
}

SparseMatC AssembledChain::frequency_operator(double omega, double alpha, double beta) const {
  const Complex cm = AffineOperatorSet::freq_mass_coeff(omega, alpha);
  const Complex ck(1.0, omega * beta);
  SparseMatC out = cm * M0.cast<Complex>();
  for (size_t c = 0; c < A0_comp.size(); ++c)
    out += (youngs[c] * ck) * A0_comp[c].cast<Complex>();
  return out;
}

Eigen::VectorXd AssembledChain::scatter(int comp, const Eigen::VectorXd& arch_free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_dofs);
  const auto& map = dof_map[comp];
  for (size_t k = 0; k < map.size(); ++k) out[map[k]] += arch_free[k];
  return out;
}

Eigen::VectorXcd AssembledChain::scatter(int comp, const Eigen::VectorXcd& arch_free) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_dofs);
  const auto& map = dof_map[comp];
  for (size_t k = 0; k < map.size(); ++k) out[map[k]] += arch_free[k];
  return out;
}

AssembledChain assemble_chain(const Library& lib, const std::vector<int>& archetypes,
                              const std::vector<double>& youngs) {
  if (archetypes.size() != youngs.size() || archetypes.empty())
    throw std::invalid_argument("chain needs one Young's modulus per component");
  AssembledChain ch;
  ch.arch = archetypes;
  ch.youngs = youngs;
  const int nc = static_cast<int>(archetypes.size());
  ch.dof_map.resize(nc);
  ch.interface.resize(nc - 1);

  int next = 0;
  for (int c = 0; c < nc; ++c) {
    const ArchetypeData& a = lib.of(archetypes[c]);
    ch.dof_map[c].assign(a.ops.n_free, -1);
    if (c > 0) {
      const auto& right_prev = lib.of(archetypes[c - 1]).port_free_dofs[1];
      const auto& left_here = a.port_free_dofs[0];
      if (right_prev.size() != left_here.size() || right_prev.empty())
        throw std::runtime_error("incompatible ports between adjacent components");
      ch.interface[c - 1].resize(left_here.size());
      for (size_t k = 0; k < left_here.size(); ++k) {
        const int shared = ch.dof_map[c - 1][right_prev[k]];
        ch.dof_map[c][left_here[k]] = shared;
        ch.interface[c - 1][k] = shared;
      }
    }
    for (int k = 0; k < a.ops.n_free; ++k)
      if (ch.dof_map[c][k] < 0) ch.dof_map[c][k] = next++;
  }
  ch.n_dofs = next;

  using Triplet = Eigen::Triplet<double>;
  auto scatter_mat = [&](const SparseMat& m, int c) {
    std::vector<Triplet> trips;
    trips.reserve(m.nonZeros());
    const auto& map = ch.dof_map[c];
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMat::InnerIterator it(m, k); it; ++it)
        trips.emplace_back(map[it.row()], map[it.col()], it.value());
    SparseMat out(ch.n_dofs, ch.n_dofs);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  };

  ch.M0.resize(ch.n_dofs, ch.n_dofs);
  ch.H1.resize(ch.n_dofs, ch.n_dofs);
  ch.A0_comp.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const ArchetypeData& a = lib.of(archetypes[c]);
    ch.M0 += scatter_mat(a.ops.M0, c);
    ch.H1 += scatter_mat(a.ops.H1, c);
    ch.A0_comp[c] = scatter_mat(a.ops.A0, c);
  }
  return ch;
}

MovingLoad BridgeSystem::axle_load(int axle, int loaded_slot) const {
  MovingLoad load;
  load.amplitude = mu.axles[axle].amplitude;
  load.sigma_x = mu.axles[axle].sigma_x;
  load.friction = mu.axles[axle].friction;
  load.d1 = mu.activation[loaded_slot].first;
  load.d2 = mu.activation[loaded_slot].second;
  return load;
}

double BridgeSystem::local_center(int comp, int axle, double t) const {
  return schedule.axle_x(axle, t) - lib->topo.mid_x(comp);
}

BridgeSystem instantiate_system(const GlobalParameter& mu, const Library& lib) {
  BridgeSystem sys;
  sys.lib = &lib;
  sys.mu = mu;
  for (int c = 0; c < SystemTopology::n_comp; ++c) sys.arch[c] = lib.topo.base_arch[c];
  for (int w = 0; w < 2; ++w)
    if (mu.damaged(w)) sys.arch[lib.topo.damageable[w]] = kSpanCracked;
  sys.chain = assemble_chain(lib, {sys.arch.begin(), sys.arch.end()},
                             {mu.youngs.begin(), mu.youngs.end()});
  sys.schedule = schedule_vehicle(mu, lib.topo.bridge_length);
  return sys;
}

SensorSet resolve_sensors(const BridgeSystem& sys, const std::vector<SensorSpec>& spec) {
  const Library& lib = *sys.lib;
  SensorSet out;
  out.n_sensors_per_comp = static_cast<int>(spec.size());
  for (int w = 0; w < 2; ++w) {
    const int comp = lib.topo.damageable[w];
    const ArchetypeData& a = lib.of(sys.arch[comp]);
    const double crack_x = 0.5 * a.geom.length;
    const double H = a.geom.thickness;
    auto& pc = out.comps[w];
    pc.comp = comp;
    std::vector<int> nodes;
    for (const auto& s : spec) {
      const double tx = crack_x + s.dx;
      const double ty = s.top ? H : 0.0;
      int best = -1;
      double best_d = 1e30;
      for (int n = 0; n < a.mesh.num_nodes(); ++n) {
        const auto& p = a.mesh.nodes[n];
        if (std::abs(p.y() - ty) > 1e-9) continue;
        const double d = std::abs(p.x() - tx);
        if (d < best_d - 1e-15) {
          best_d = d;
          best = n;
        }
      }
      if (best < 0) throw std::runtime_error("no boundary node for sensor placement");
      nodes.push_back(best);
      pc.coords.emplace_back(lib.topo.x_offset[comp] + a.mesh.nodes[best].x(),
                             a.mesh.nodes[best].y());
    }
    // x-block then y-block, matching the output layout
    for (int pass = 0; pass < 2; ++pass)
      for (int n : nodes) {
        const int f = a.ops.full_to_free[2 * n + pass];
        if (f < 0) throw std::runtime_error("sensor dof is constrained");
        pc.dofs.push_back(sys.chain.dof_map[comp][f]);
      }
  }
  return out;
}

std::vector<SensorSpec> near_layout(const Config& cfg) {
  return {{-cfg.sensor_near, true},
          {cfg.sensor_near, true},
          {-cfg.sensor_bottom, false},
          {cfg.sensor_bottom, false}};
}

std::vector<SensorSpec> far_layout(const Config& cfg) {
  return {{-cfg.sensor_far, true},
          {cfg.sensor_far, true},
          {-cfg.sensor_bottom, false},
          {cfg.sensor_bottom, false}};
}

std::vector<SensorSpec> union_layout(const Config& cfg) {
  return {{-cfg.sensor_near, true},   {cfg.sensor_near, true}, {-cfg.sensor_far, true},
          {cfg.sensor_far, true},     {-cfg.sensor_bottom, false},
          {cfg.sensor_bottom, false}};
}

}  // namespace prrbc
