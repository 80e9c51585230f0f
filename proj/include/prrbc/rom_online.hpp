#ifndef PRRBC_ROM_ONLINE_HPP
#define PRRBC_ROM_ONLINE_HPP

#include <vector>

#include "prrbc/newmark.hpp"
#include "prrbc/rom_offline.hpp"

namespace prrbc {

// Frequency/location pairs driving the Level-1 sweep; omegas are the
// deterministic equally spaced set, locations are seeded draws over the load's
// existence domain (the union of the loaded components' activation windows).
struct OnlineTrainSet {
  std::vector<double> omegas;
  std::vector<double> locations;  // global coordinates
  uint64_t seed = 0;
};

OnlineTrainSet build_online_train_set(const BridgeSystem& sys, uint64_t seed);

// Global port-unknown numbering over the 22 interfaces.
struct PortIndexer {
  std::vector<int> offset;  // per interface
  std::vector<int> count;
  int total = 0;
  static PortIndexer build(const SystemTopology& topo, const OfflineCache& cache);
};

// One Level-1 solution in compressed form: port coefficients plus, per
// component, the coefficients over that archetype's cached vector family.
struct Level1Solution {
  Eigen::VectorXcd ports;
  std::vector<Eigen::VectorXcd> comp_coeffs;
};

Level1Solution level1_solve(const BridgeSystem& sys, const OfflineCache& cache, double omega,
                            double location);

std::vector<Level1Solution> level1_sweep(const BridgeSystem& sys, const OfflineCache& cache,
                                         const OnlineTrainSet& ts, bool parallel = true);

Eigen::VectorXcd expand_level1(const BridgeSystem& sys, const OfflineCache& cache,
                               const Level1Solution& sol);

struct GreedyOptions {
  double eps = 1e-5;
  int max_picks = 51;  // min(n_omega, picks allowed)
  int n_cap = 40;      // prefixed maximum basis size M
};

struct GreedyResult {
  Eigen::MatrixXd Z;             // n x N, H1-orthonormal real basis
  Eigen::MatrixXd W;             // (2 n_snap) x N with Z = [re/im split of S] W
  std::vector<double> ratios;    // stopping ratio after each pick
  int picks = 0;
};

GreedyResult strong_greedy(const std::vector<Eigen::VectorXcd>& snapshots, const SparseMat& H1,
                           GreedyOptions opts);

struct ReducedModel {
  Eigen::MatrixXd Z;
  Eigen::MatrixXd Mr, Cr, Ar, Hr;
  Eigen::MatrixXd Qr;                        // n_signals x N
  std::vector<Eigen::MatrixXd> load_blocks;  // per loaded slot: N x Q
  std::vector<double> greedy_ratios;
  double sweep_seconds = 0, greedy_seconds = 0;

  int n() const { return static_cast<int>(Z.cols()); }
  ReducedModel truncated(int n_cap) const;  // nested prefix of the greedy basis
};

ReducedModel build_reduced_model(const BridgeSystem& sys, const OfflineCache& cache,
                                 const OnlineTrainSet& ts, const SensorSet& sensors,
                                 GreedyOptions opts, bool parallel = true);

// Reduced matrices recomputed from the cached archetype blocks through the
// snapshot-coefficient route; the direct Z^T X Z path must match.
struct ReducedFromBlocks {
  Eigen::MatrixXd Mr, Cr, Ar, Hr;
};
ReducedFromBlocks reduced_matrices_from_blocks(const BridgeSystem& sys, const OfflineCache& cache,
                                               const std::vector<Level1Solution>& sols,
                                               const GreedyResult& greedy);

struct SensorTrajectory {
  double t_final = 0;
  int n_t = 0;
  Eigen::MatrixXd q;  // (n_t+1) x n_signals, real parts of Qr U
  double dt() const { return t_final / n_t; }
};

// Reduced Newmark march with the two-axle load schedule; optionally records
// the reduced trajectory (N x (n_t+1)).
SensorTrajectory reduced_march(const ReducedModel& model, const BridgeSystem& sys, int n_t,
                               Eigen::MatrixXd* reduced_trajectory = nullptr);

struct RichardsonResult {
  double eps_dt = 0;
  int n_t = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> history;
};

// Doubles n_t until the order-2 extrapolation indicator drops below tol.
RichardsonResult richardson_check(const ReducedModel& model, const BridgeSystem& sys, int n_t0,
                                  double tol = 1e-4, int n_t_cap = 20000);

// Single-run indicator at a given n_t (n_t must be even).
double richardson_indicator(const ReducedModel& model, const BridgeSystem& sys, int n_t);

// FE truth march of the instantiated bridge with exact moving loads.
void fe_bridge_march(const BridgeSystem& sys, int n_t, const StepObserver& observer);

struct RomFeComparison {
  double max_rel_err = 0;   // max-over-time H1 error / max-over-time H1 norm
  double fe_seconds = 0;
  double rom_seconds = 0;   // sweep + greedy + march
  double speedup = 0;
  int n = 0;                // reduced dimension
  SensorTrajectory rom_sensors;
};

RomFeComparison compare_rom_fe(const BridgeSystem& sys, const OfflineCache& cache,
                               const SensorSet& sensors, GreedyOptions opts, int n_t,
                               uint64_t trainset_seed);

}  // namespace prrbc

#endif
