#include "prrbc/rom_online.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>

#include "prrbc/newmark.hpp"

namespace prrbc {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

OnlineTrainSet build_online_train_set(const BridgeSystem& sys, uint64_t seed) {
  const Library& lib = *sys.lib;
  OnlineTrainSet ts;
  ts.seed = seed;
  ts.omegas = omega_set(lib.cfg);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_slot(0, static_cast<int>(lib.topo.loaded.size()) - 1);
  const double sigma = sys.mu.axles[0].sigma_x;
  ts.locations.reserve(ts.omegas.size());
  for (size_t j = 0; j < ts.omegas.size(); ++j) {
    const int slot = pick_slot(rng);
    const int comp = lib.topo.loaded[slot];
    const auto [d1, d2] = sys.mu.activation[slot];
    const double l =
        std::uniform_real_distribution<double>(-d1 - 4 * sigma, d2 + 4 * sigma)(rng);
    ts.locations.push_back(lib.topo.mid_x(comp) + l);
  }
  return ts;
}

PortIndexer PortIndexer::build(const SystemTopology& topo, const OfflineCache& cache) {
  PortIndexer idx;
  idx.offset.resize(topo.n_comp - 1);
  idx.count.resize(topo.n_comp - 1);
  int total = 0;
  for (int p = 0; p < topo.n_comp - 1; ++p) {
    idx.offset[p] = total;
    idx.count[p] = static_cast<int>(cache.ports[topo.port_ref[p]].modes.cols());
    total += idx.count[p];
  }
  idx.total = total;
  return idx;
}

Level1Solution level1_solve(const BridgeSystem& sys, const OfflineCache& cache, double omega,
                            double location) {
  const Library& lib = *sys.lib;
  const SystemTopology& topo = lib.topo;
  const PortIndexer idx = PortIndexer::build(topo, cache);
  const double alpha = sys.mu.alpha_ray, beta = sys.mu.beta_ray;

  // locate the active loaded component (at most one; windows never overlap)
  int active_comp = -1;
  Eigen::VectorXd theta;
  for (size_t s = 0; s < topo.loaded.size(); ++s) {
    const int comp = topo.loaded[s];
    const MovingLoad load = sys.axle_load(0, static_cast<int>(s));
    const double l_loc = location - topo.mid_x(comp);
    if (!load.active(l_loc)) continue;
    active_comp = comp;
    const ArchetypeData& a = lib.of(sys.arch[comp]);
    theta = a.eim->coefficients(a.mesh, load, l_loc);
    break;
  }

  struct CompWork {
    Eigen::MatrixXcd A;                     // projected frequency operator
    const ArchCache* ac = nullptr;
    std::array<const ArchCache::LiftEntry*, 2> entry = {nullptr, nullptr};  // left, right
    std::array<std::vector<Eigen::VectorXcd>, 2> bubble_coef;               // per mode
    Eigen::VectorXcd inhomog_coef;  // n_f
    Eigen::VectorXcd Vtf;           // m, zero unless loaded here
  };

  std::vector<CompWork> work(topo.n_comp);
  for (int c = 0; c < topo.n_comp; ++c) {
    CompWork& w = work[c];
    w.ac = &cache.arch[sys.arch[c]];
    const Complex cm = AffineOperatorSet::freq_mass_coeff(omega, alpha);
    const Complex ck = AffineOperatorSet::freq_stiff_coeff(omega, beta, sys.chain.youngs[c]);
    w.A = cm * w.ac->VtM + ck * w.ac->VtA;
    if (c > 0) w.entry[0] = w.ac->find(PortSide::Left, topo.port_ref[c - 1]);
    if (c < topo.n_comp - 1) w.entry[1] = w.ac->find(PortSide::Right, topo.port_ref[c]);
    for (int side = 0; side < 2; ++side) {
      const auto* e = w.entry[side];
      if (!e) continue;
      w.bubble_coef[side].resize(e->n_modes);
      for (int k = 0; k < e->n_modes; ++k) {
        if (e->n_b == 0) continue;
        const auto Abb = w.A.block(e->bubble_col0[k], e->bubble_col0[k], e->n_b, e->n_b);
        const auto Abl = w.A.block(e->bubble_col0[k], e->col0 + k, e->n_b, 1);
        w.bubble_coef[side][k] = -Abb.lu().solve(Abl);
      }
    }
    w.Vtf = Eigen::VectorXcd::Zero(w.ac->m);
    if (c == active_comp && w.ac->n_f > 0) {
      w.Vtf = (w.ac->VtF * theta).cast<Complex>();
      const auto Aff = w.A.block(w.ac->inhomog_col0, w.ac->inhomog_col0, w.ac->n_f, w.ac->n_f);
      w.inhomog_coef = Aff.lu().solve(w.Vtf.segment(w.ac->inhomog_col0, w.ac->n_f));
    }
  }

  // Petrov-Galerkin Schur complement on the global port unknowns: test space
  // spanned by the fixed lifted port modes, trial by their bubble-corrected
  // counterparts plus the inhomogeneity term.
  std::vector<Eigen::Triplet<Complex>> trips;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(idx.total);
  for (int c = 0; c < topo.n_comp; ++c) {
    const CompWork& w = work[c];
    for (int ts = 0; ts < 2; ++ts) {
      const auto* et = w.entry[ts];
      if (!et) continue;
      const int pt = ts == 0 ? c - 1 : c;
      for (int kt = 0; kt < et->n_modes; ++kt) {
        const int row = idx.offset[pt] + kt;
        const int lt = et->col0 + kt;
        for (int ss = 0; ss < 2; ++ss) {
          const auto* es = w.entry[ss];
          if (!es) continue;
          const int ps = ss == 0 ? c - 1 : c;
          for (int ks = 0; ks < es->n_modes; ++ks) {
            const int col = idx.offset[ps] + ks;
            Complex v = w.A(lt, es->col0 + ks);
            if (es->n_b > 0)
              v += (w.A.block(lt, es->bubble_col0[ks], 1, es->n_b) *
                    w.bubble_coef[ss][ks])(0, 0);
            trips.emplace_back(row, col, v);
          }
        }
        if (c == active_comp && w.ac->n_f > 0) {
          Complex r = w.Vtf[lt];
          r -= (w.A.block(lt, w.ac->inhomog_col0, 1, w.ac->n_f) * w.inhomog_coef)(0, 0);
          rhs[row] += r;
        }
      }
    }
  }

  SparseMatC schur(idx.total, idx.total);
  schur.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SparseMatC> lu(schur);
  if (lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "singular Schur complement at omega=" << omega << ", location=" << location;
    throw std::runtime_error(msg.str());
  }
  Level1Solution sol;
  sol.ports = lu.solve(rhs);

  sol.comp_coeffs.resize(topo.n_comp);
  for (int c = 0; c < topo.n_comp; ++c) {
    const CompWork& w = work[c];
    Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(w.ac->m);
    for (int side = 0; side < 2; ++side) {
      const auto* e = w.entry[side];
      if (!e) continue;
      const int p = side == 0 ? c - 1 : c;
      for (int k = 0; k < e->n_modes; ++k) {
        const Complex u = sol.ports[idx.offset[p] + k];
        coef[e->col0 + k] = u;
        if (e->n_b > 0) coef.segment(e->bubble_col0[k], e->n_b) += u * w.bubble_coef[side][k];
      }
    }
    if (c == active_comp && w.ac->n_f > 0)
      coef.segment(w.ac->inhomog_col0, w.ac->n_f) = w.inhomog_coef;
    sol.comp_coeffs[c] = std::move(coef);
  }
  return sol;
}

std::vector<Level1Solution> level1_sweep(const BridgeSystem& sys, const OfflineCache& cache,
                                         const OnlineTrainSet& ts, bool parallel) {
  const int n = static_cast<int>(ts.omegas.size());
  std::vector<Level1Solution> sols(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int j = 0; j < n; ++j) {
    try {
      sols[j] = level1_solve(sys, cache, ts.omegas[j], ts.locations[j]);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return sols;
}

Eigen::VectorXcd expand_level1(const BridgeSystem& sys, const OfflineCache& cache,
                               const Level1Solution& sol) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(sys.chain.n_dofs);
  for (int c = 0; c < SystemTopology::n_comp; ++c) {
    const ArchCache& ac = cache.arch[sys.arch[c]];
    const Eigen::VectorXd xr = ac.V * sol.comp_coeffs[c].real();
    const Eigen::VectorXd xi = ac.V * sol.comp_coeffs[c].imag();
    const auto& map = sys.chain.dof_map[c];
    // port traces agree between neighbors, so assignment is well defined
    for (size_t k = 0; k < map.size(); ++k) out[map[k]] = Complex(xr[k], xi[k]);
  }
  return out;
}

GreedyResult strong_greedy(const std::vector<Eigen::VectorXcd>& snapshots, const SparseMat& H1,
                           GreedyOptions opts) {
  const int ns = static_cast<int>(snapshots.size());
  if (ns == 0) throw std::invalid_argument("greedy needs at least one snapshot");
  const Eigen::Index n = snapshots[0].size();

  Eigen::MatrixXd Sr(n, ns), Si(n, ns);
  for (int s = 0; s < ns; ++s) {
    Sr.col(s) = snapshots[s].real();
    Si.col(s) = snapshots[s].imag();
  }
  const Eigen::MatrixXd HSr = H1 * Sr, HSi = H1 * Si;
  Eigen::VectorXd sn2(ns);
  for (int s = 0; s < ns; ++s)
    sn2[s] = Sr.col(s).dot(HSr.col(s)) + Si.col(s).dot(HSi.col(s));
  const double max_norm = std::sqrt(sn2.maxCoeff());
  if (!(max_norm > 0)) throw std::invalid_argument("all Level-1 snapshots are zero");

  GreedyResult res;
  Eigen::MatrixXd Z(n, 0), HZ(n, 0), W(2 * ns, 0);
  Eigen::MatrixXd Cr(0, ns), Ci(0, ns);  // H1 products of basis with re/im parts

  auto try_add = [&](int s, bool imag_part) {
    if (Z.cols() >= opts.n_cap) return false;
    Eigen::VectorXd v = imag_part ? Si.col(s) : Sr.col(s);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * ns);
    w[2 * s + (imag_part ? 1 : 0)] = 1.0;
    const double orig = std::sqrt(std::max(0.0, v.dot(H1 * v)));
    if (orig <= 1e-14 * max_norm) return false;
    for (int pass = 0; pass < 2; ++pass) {
      if (Z.cols() == 0) break;
      const Eigen::VectorXd coef = HZ.transpose() * v;
      v -= Z * coef;
      w -= W * coef;
    }
    const Eigen::VectorXd Hv = H1 * v;
    const double nr = std::sqrt(std::max(0.0, v.dot(Hv)));
    if (nr <= 1e-10 * orig) return false;
    Z.conservativeResize(Eigen::NoChange, Z.cols() + 1);
    Z.col(Z.cols() - 1) = v / nr;
    HZ.conservativeResize(Eigen::NoChange, HZ.cols() + 1);
    HZ.col(HZ.cols() - 1) = Hv / nr;
    W.conservativeResize(Eigen::NoChange, W.cols() + 1);
    W.col(W.cols() - 1) = w / nr;
    Cr.conservativeResize(Cr.rows() + 1, Eigen::NoChange);
    Cr.row(Cr.rows() - 1) = HZ.col(HZ.cols() - 1).transpose() * Sr;
    Ci.conservativeResize(Ci.rows() + 1, Eigen::NoChange);
    Ci.row(Ci.rows() - 1) = HZ.col(HZ.cols() - 1).transpose() * Si;
    return true;
  };

  auto errors2 = [&]() {
    Eigen::VectorXd e2 = sn2;
    for (int s = 0; s < ns; ++s) {
      for (int r = 0; r < Cr.rows(); ++r)
        e2[s] -= Cr(r, s) * Cr(r, s) + Ci(r, s) * Ci(r, s);
      e2[s] = std::max(e2[s], 0.0);
    }
    return e2;
  };

  int worst;
  sn2.maxCoeff(&worst);
  try_add(worst, false);
  try_add(worst, true);
  ++res.picks;
  Eigen::VectorXd e2 = errors2();
  const double denom = std::sqrt(e2.maxCoeff());
  res.ratios.push_back(1.0);

  while (true) {
    const double emax = std::sqrt(e2.maxCoeff(&worst));
    if (emax <= 1e-14 * max_norm) break;
    const double ratio = denom > 0 ? emax / denom : 0.0;
    if (ratio <= opts.eps) break;
    if (res.picks >= std::min(ns, opts.max_picks)) break;
    if (Z.cols() >= opts.n_cap) break;
    bool added = try_add(worst, false);
    // the second half of the pick may already be redundant or capped
    e2 = errors2();
    if (denom > 0 && std::sqrt(e2.maxCoeff()) / denom > opts.eps)
      added = try_add(worst, true) || added;
    ++res.picks;
    if (!added) break;  // snapshot already represented to roundoff
    e2 = errors2();
    res.ratios.push_back(denom > 0 ? std::sqrt(e2.maxCoeff()) / denom : 0.0);
  }

  res.Z = std::move(Z);
  res.W = std::move(W);
  return res;
}

ReducedModel build_reduced_model(const BridgeSystem& sys, const OfflineCache& cache,
                                 const OnlineTrainSet& ts, const SensorSet& sensors,
                                 GreedyOptions opts, bool parallel) {
  const Library& lib = *sys.lib;
  ReducedModel model;

  auto t0 = std::chrono::steady_clock::now();
  const auto sols = level1_sweep(sys, cache, ts, parallel);
  std::vector<Eigen::VectorXcd> snaps(sols.size());
  for (size_t j = 0; j < sols.size(); ++j) snaps[j] = expand_level1(sys, cache, sols[j]);
  model.sweep_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  GreedyResult greedy = strong_greedy(snaps, sys.chain.H1, opts);
  model.greedy_seconds = seconds_since(t0);
  model.greedy_ratios = greedy.ratios;

  model.Z = std::move(greedy.Z);
  const SparseMat A = sys.chain.stiffness();
  model.Mr = model.Z.transpose() * (sys.chain.M0 * model.Z);
  model.Ar = model.Z.transpose() * (A * model.Z);
  model.Cr = sys.mu.alpha_ray * model.Mr + sys.mu.beta_ray * model.Ar;
  model.Hr = model.Z.transpose() * (sys.chain.H1 * model.Z);

  std::vector<int> sensor_dofs;
  for (const auto& pc : sensors.comps)
    sensor_dofs.insert(sensor_dofs.end(), pc.dofs.begin(), pc.dofs.end());
  model.Qr.resize(sensor_dofs.size(), model.n());
  for (size_t i = 0; i < sensor_dofs.size(); ++i) model.Qr.row(i) = model.Z.row(sensor_dofs[i]);

  model.load_blocks.resize(lib.topo.loaded.size());
  for (size_t s = 0; s < lib.topo.loaded.size(); ++s) {
    const int comp = lib.topo.loaded[s];
    const ArchetypeData& a = lib.of(sys.arch[comp]);
    const int q = a.eim->size();
    Eigen::MatrixXd blk(model.n(), q);
    for (int j = 0; j < q; ++j) {
      const Eigen::VectorXd fj =
          sys.chain.scatter(comp, a.ops.restrict_to_free(a.eim->basis.col(j)));
      blk.col(j) = model.Z.transpose() * fj;
    }
    model.load_blocks[s] = std::move(blk);
  }
  return model;
}

ReducedModel ReducedModel::truncated(int n_cap) const {
  if (n() <= n_cap) return *this;
  ReducedModel out;
  out.Z = Z.leftCols(n_cap);
  out.Mr = Mr.topLeftCorner(n_cap, n_cap);
  out.Cr = Cr.topLeftCorner(n_cap, n_cap);
  out.Ar = Ar.topLeftCorner(n_cap, n_cap);
  out.Hr = Hr.topLeftCorner(n_cap, n_cap);
  out.Qr = Qr.leftCols(n_cap);
  out.load_blocks.reserve(load_blocks.size());
  for (const auto& b : load_blocks) out.load_blocks.push_back(b.topRows(n_cap));
  out.greedy_ratios = greedy_ratios;
  out.sweep_seconds = sweep_seconds;
  out.greedy_seconds = greedy_seconds;
  return out;
}

ReducedFromBlocks reduced_matrices_from_blocks(const BridgeSystem& sys, const OfflineCache& cache,
                                               const std::vector<Level1Solution>& sols,
                                               const GreedyResult& greedy) {
  const int ns = static_cast<int>(sols.size());
  Eigen::MatrixXd Gm = Eigen::MatrixXd::Zero(2 * ns, 2 * ns);
  Eigen::MatrixXd Ga = Gm, Gh = Gm;
  for (int c = 0; c < SystemTopology::n_comp; ++c) {
    const ArchCache& ac = cache.arch[sys.arch[c]];
    Eigen::MatrixXd P(ac.m, 2 * ns);
    for (int s = 0; s < ns; ++s) {
      P.col(2 * s) = sols[s].comp_coeffs[c].real();
      P.col(2 * s + 1) = sols[s].comp_coeffs[c].imag();
    }
    Gm += P.transpose() * (ac.VtM * P);
    Ga += sys.chain.youngs[c] * (P.transpose() * (ac.VtA * P));
    Gh += P.transpose() * (ac.VtH * P);
  }
  ReducedFromBlocks out;
  out.Mr = greedy.W.transpose() * Gm * greedy.W;
  out.Ar = greedy.W.transpose() * Ga * greedy.W;
  out.Hr = greedy.W.transpose() * Gh * greedy.W;
  out.Cr = sys.mu.alpha_ray * out.Mr + sys.mu.beta_ray * out.Ar;
  return out;
}

namespace {

// reduced load at time t: both axles over every active loaded component
Eigen::VectorXd reduced_load_at(const ReducedModel& model, const BridgeSystem& sys, double t) {
  const Library& lib = *sys.lib;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(model.n());
  for (int axle = 0; axle < 2; ++axle)
    for (size_t s = 0; s < lib.topo.loaded.size(); ++s) {
      const int comp = lib.topo.loaded[s];
      const MovingLoad load = sys.axle_load(axle, static_cast<int>(s));
      const double l = sys.local_center(comp, axle, t);
      if (!load.active(l)) continue;
      const ArchetypeData& a = lib.of(sys.arch[comp]);
      f += model.load_blocks[s] * a.eim->coefficients(a.mesh, load, l);
    }
  return f;
}

}  // namespace

SensorTrajectory reduced_march(const ReducedModel& model, const BridgeSystem& sys, int n_t,
                               Eigen::MatrixXd* reduced_trajectory) {
  SensorTrajectory traj;
  traj.t_final = sys.schedule.t_final;
  traj.n_t = n_t;
  traj.q.resize(n_t + 1, model.Qr.rows());
  if (reduced_trajectory) reduced_trajectory->resize(model.n(), n_t + 1);
  const double dt = traj.t_final / n_t;
  dense_newmark_march(
      model.Mr, model.Cr, model.Ar,
      [&](int j, Eigen::VectorXd& f) { f = reduced_load_at(model, sys, j * dt); }, traj.t_final,
      n_t,
      [&](int j, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
        traj.q.row(j) = (model.Qr * u).transpose();
        if (reduced_trajectory) reduced_trajectory->col(j) = u;
      });
  return traj;
}

double richardson_indicator(const ReducedModel& model, const BridgeSystem& sys, int n_t) {
  if (n_t % 2 != 0) throw std::invalid_argument("Richardson indicator needs an even n_t");
  Eigen::MatrixXd fine, coarse;
  reduced_march(model, sys, n_t, &fine);
  reduced_march(model, sys, n_t / 2, &coarse);

  auto h_norm = [&](const Eigen::VectorXd& u) { return std::sqrt(u.dot(model.Hr * u)); };
  double den = 0, num = 0;
  for (int j = 1; j <= n_t; ++j) den = std::max(den, h_norm(fine.col(j)));
  for (int j = 1; j <= n_t / 2; ++j) num = std::max(num, h_norm(fine.col(2 * j) - coarse.col(j)));

  // load scale for the 0/0 guard
  double load_scale = 0;
  for (int k = 0; k <= 20; ++k)
    load_scale =
        std::max(load_scale, reduced_load_at(model, sys, sys.schedule.t_final * k / 20.0).norm());
  if (den <= 1e-14 * std::max(1.0, load_scale)) return 0.0;
  return num / (3.0 * den);  // 2^p - 1 with p = 2
}

RichardsonResult richardson_check(const ReducedModel& model, const BridgeSystem& sys, int n_t0,
                                  double tol, int n_t_cap) {
  RichardsonResult res;
  int n_t = n_t0 + (n_t0 % 2);
  while (n_t <= n_t_cap) {
    const double eps = richardson_indicator(model, sys, n_t);
    res.history.emplace_back(n_t, eps);
    res.eps_dt = eps;
    res.n_t = n_t;
    if (eps <= tol) {
      res.converged = true;
      return res;
    }
    n_t *= 2;
  }
  return res;  // not converged within the cap
}

void fe_bridge_march(const BridgeSystem& sys, int n_t, const StepObserver& observer) {
  const Library& lib = *sys.lib;
  const SparseMat A = sys.chain.stiffness();
  const SparseMat C = sys.mu.alpha_ray * sys.chain.M0 + sys.mu.beta_ray * A;
  const double dt = sys.schedule.t_final / n_t;
  fe_newmark_march(
      sys.chain.M0, C, A,
      [&](int j, Eigen::VectorXd& f) {
        f.setZero();
        const double t = j * dt;
        for (int axle = 0; axle < 2; ++axle)
          for (size_t s = 0; s < lib.topo.loaded.size(); ++s) {
            const int comp = lib.topo.loaded[s];
            const MovingLoad load = sys.axle_load(axle, static_cast<int>(s));
            const double l = sys.local_center(comp, axle, t);
            if (!load.active(l)) continue;
            const ArchetypeData& a = lib.of(sys.arch[comp]);
            const auto& map = sys.chain.dof_map[comp];
            const Eigen::VectorXd fl =
                a.ops.restrict_to_free(assemble_load_vector(a.mesh, load, l));
            for (size_t k = 0; k < map.size(); ++k) f[map[k]] += fl[k];
          }
      },
      sys.schedule.t_final, n_t, observer);
}

RomFeComparison compare_rom_fe(const BridgeSystem& sys, const OfflineCache& cache,
                               const SensorSet& sensors, GreedyOptions opts, int n_t,
                               uint64_t trainset_seed) {
  RomFeComparison cmp;

  auto t0 = std::chrono::steady_clock::now();
  const OnlineTrainSet ts = build_online_train_set(sys, trainset_seed);
  const ReducedModel model = build_reduced_model(sys, cache, ts, sensors, opts);
  Eigen::MatrixXd U;
  cmp.rom_sensors = reduced_march(model, sys, n_t, &U);
  cmp.rom_seconds = seconds_since(t0);
  cmp.n = model.n();

  t0 = std::chrono::steady_clock::now();
  double max_norm = 0, max_err = 0;
  fe_bridge_march(sys, n_t,
                  [&](int j, const Eigen::VectorXd& u, const Eigen::VectorXd&,
                      const Eigen::VectorXd&) {
                    const Eigen::VectorXd diff = model.Z * U.col(j) - u;
                    max_err = std::max(max_err, std::sqrt(diff.dot(sys.chain.H1 * diff)));
                    max_norm = std::max(max_norm, std::sqrt(u.dot(sys.chain.H1 * u)));
                  });
  cmp.fe_seconds = seconds_since(t0);
  cmp.max_rel_err = max_norm > 0 ? max_err / max_norm : 0.0;
  cmp.speedup = cmp.rom_seconds > 0 ? cmp.fe_seconds / cmp.rom_seconds : 0.0;
  return cmp;
}

}  // namespace prrbc
