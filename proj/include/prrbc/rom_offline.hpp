#ifndef PRRBC_ROM_OFFLINE_HPP
#define PRRBC_ROM_OFFLINE_HPP

#include <array>
#include <optional>
#include <vector>

#include "prrbc/bridge.hpp"
#include "prrbc/pod.hpp"

namespace prrbc {

// Reduced space on one reference port, orthonormal in the port trace Gram.
struct PortSpace {
  int ref_port = -1;
  Eigen::MatrixXd modes;  // port-dof-count x n_modes
  Eigen::VectorXd eigenvalues;
  double retained_energy = 0;
};

// Port-mode liftings of one (archetype, side, reference port) combination:
// a fixed discrete-harmonic lifting per mode plus a small bubble space that
// corrects it across the parameter range.  Bubbles vanish on all ports.
struct LiftingSet {
  PortSide side = PortSide::Left;
  int ref_port = -1;
  Eigen::MatrixXd lift;                  // n_free x n_modes
  std::vector<Eigen::MatrixXd> bubbles;  // per mode: n_free x n_b
  int n_modes() const { return static_cast<int>(lift.cols()); }
};

// Parameter-independent projections of one archetype: the vector family
// V = [lift modes... | bubbles... | inhomogeneity bubbles] against M0, A0 and
// the H1 Gram, plus the projected affine load basis.
struct ArchCache {
  struct LiftEntry {
    PortSide side;
    int ref_port;
    int n_modes;
    int n_b;
    int col0;                     // first lifting column
    std::vector<int> bubble_col0; // first bubble column per mode
  };
  std::vector<LiftEntry> lifts;
  int inhomog_col0 = -1;
  int n_f = 0;
  int m = 0;
  Eigen::MatrixXd V;                // n_free x m
  Eigen::MatrixXd VtM, VtA, VtH;    // m x m
  Eigen::MatrixXd VtF;              // m x Q, empty when unloaded
  Eigen::VectorXd inhomog_eigenvalues;

  const LiftEntry* find(PortSide side, int ref_port) const;
};

struct OfflineCache {
  uint64_t library_hash = 0;
  double mesh_h = 0;
  int c_lower = 0, c_upper = 0;
  double sigma_t_ref = 0;
  std::array<PortSpace, kNumRefPorts> ports;
  std::array<ArchCache, kNumArchetypes> arch;
  double offline_seconds = 0;
  int max_assembled_dofs = 0;  // largest FE system assembled while training
};

// 1D P2 Gram (mass + stiffness) over the port trace, in port-dof ordering.
SparseMat port_trace_gram(const ComponentMesh& mesh, PortSide side);

// Compatible bi-component systems per reference port, in left|right order.
std::vector<std::pair<int, int>> ref_port_pairs(int ref_port);

// POD port space from pairwise frequency solves driven by random outer-port
// data and (for loaded pairs) the moving load.
PortSpace train_port_space(const Library& lib, int ref_port, int n_train, int n_modes,
                           uint64_t seed, int* max_assembled_dofs = nullptr);

// Liftings and bubble corrections for all (side, ref port) combinations of one
// archetype; factorizations are shared across the combinations.
std::vector<LiftingSet> train_archetype_liftings(
    const Library& lib, int archetype,
    const std::vector<std::pair<PortSide, const PortSpace*>>& combos, int n_samples, int n_b,
    uint64_t seed);

// Bubble space driven by the affine load (zero port traces); throws on an
// all-zero snapshot set.
Eigen::MatrixXd train_inhomogeneity_bubble(const Library& lib, int archetype, int n_samples,
                                           int n_b, uint64_t seed,
                                           Eigen::VectorXd* eigenvalues = nullptr);

OfflineCache train_offline(const Library& lib, bool verbose = false);

// (side, ref port) combinations each archetype needs for the standard chain
std::vector<std::pair<PortSide, int>> archetype_port_combos(int archetype);

}  // namespace prrbc

#endif
