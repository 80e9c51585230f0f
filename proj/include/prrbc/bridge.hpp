#ifndef PRRBC_BRIDGE_HPP
#define PRRBC_BRIDGE_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "prrbc/assembly.hpp"
#include "prrbc/config.hpp"
#include "prrbc/eim.hpp"
#include "prrbc/geometry.hpp"

namespace prrbc {

// Archetype slots of the built library.  The mirrored abutment is kept as its
// own entry so no reflection algebra is needed during assembly.
enum Archetype : int {
  kAbutLeft = 0,
  kTee = 1,
  kSpan = 2,
  kSpanLoaded = 3,
  kSpanCracked = 4,
  kAbutRight = 5,
  kNumArchetypes = 6
};

// Reference ports of the library, oriented left|right:
//   0: abutment | tee      1: tee | span      2: span | loaded span
//   3: tee | mirrored abutment
inline constexpr int kNumRefPorts = 4;

struct SystemTopology {
  static constexpr int n_comp = 23;
  std::array<int, n_comp> base_arch{};   // damage-free archetype per component
  std::array<double, n_comp> x_offset{};
  std::array<double, n_comp> length{};
  std::array<int, n_comp - 1> port_ref{};  // reference port per interface
  std::array<int, 5> loaded = {3, 7, 11, 15, 19};     // 0-based component ids
  std::array<int, 2> damageable = {7, 15};            // components 8 and 16
  double bridge_length = 0;

  static SystemTopology standard(const Config& cfg);
  double mid_x(int comp) const { return x_offset[comp] + 0.5 * length[comp]; }
};

// The 45 varying model inputs.  Damage convention: theta = 2 means cracked.
struct GlobalParameter {
  std::array<int, 2> theta = {1, 1};  // components 8 and 16
  double alpha_ray = 0, beta_ray = 0;
  std::array<double, SystemTopology::n_comp> youngs{};
  struct Axle {
    double amplitude = 0, sigma_x = 0, friction = 0;
  };
  std::array<Axle, 2> axles{};
  double speed = 0;     // [m/s]
  double axle_gap = 0;  // [m]
  std::array<std::pair<double, double>, 5> activation{};  // (d1,d2) per loaded component

  Eigen::VectorXd flatten() const;  // the 45-entry vector
  bool damaged(int which) const { return theta[which] == 2; }
};

GlobalParameter sample_parameter(const ParameterBounds& b, uint64_t seed);
// Cases 1..4: averages / average+crack8 / minima+crack16 / maxima+two cracks.
GlobalParameter example_parameter(const ParameterBounds& b, int which);

struct VehicleSchedule {
  double t_final = 0;
  double speed = 0;
  std::array<double, 2> entry_x{};  // axle positions at t = 0

  double axle_x(int axle, double t) const { return entry_x[axle] + speed * t; }
};

VehicleSchedule schedule_vehicle(const GlobalParameter& mu, double bridge_length);

struct ArchetypeData {
  ComponentGeometry geom;
  ComponentMesh mesh;
  AffineOperatorSet ops;
  std::optional<EimSurrogate> eim;                 // loaded archetypes only
  std::array<std::vector<int>, 2> port_free_dofs;  // [left, right], free indexing
  bool loaded = false;
};

struct Library {
  Config cfg;
  uint64_t hash = 0;
  std::array<ArchetypeData, kNumArchetypes> arch;
  SystemTopology topo;

  static Library build(const Config& cfg);
  const ArchetypeData& of(int a) const { return arch[static_cast<size_t>(a)]; }
};

// A chain of instantiated components with unified port dofs.  Pair systems in
// offline training and the 23-component bridge share this assembly.
struct AssembledChain {
  std::vector<int> arch;                    // archetype per component
  std::vector<double> youngs;               // per component
  std::vector<std::vector<int>> dof_map;    // arch free dof -> chain dof
  std::vector<std::vector<int>> interface;  // chain dofs of each shared port
  int n_dofs = 0;
  SparseMat M0, H1;
  std::vector<SparseMat> A0_comp;  // unit-Young stiffness per component

  SparseMat stiffness() const;  // sum of youngs[c] * A0_comp[c]
  SparseMatC frequency_operator(double omega, double alpha, double beta) const;
  Eigen::VectorXd scatter(int comp, const Eigen::VectorXd& arch_free) const;
  Eigen::VectorXcd scatter(int comp, const Eigen::VectorXcd& arch_free) const;
};

AssembledChain assemble_chain(const Library& lib, const std::vector<int>& archetypes,
                              const std::vector<double>& youngs);

// Sensor placement around the potential cracks; coordinates snap to the
// nearest boundary node of the carrying component.
struct SensorSet {
  struct PerComponent {
    int comp = -1;
    std::vector<Eigen::Vector2d> coords;  // global frame
    std::vector<int> dofs;                // chain dofs, x-block then y-block
  };
  std::array<PerComponent, 2> comps;
  int n_sensors_per_comp = 0;
  int n_signals() const { return 2 * 2 * n_sensors_per_comp; }
};

// The fully instantiated bridge for one parameter value.
struct BridgeSystem {
  const Library* lib = nullptr;
  GlobalParameter mu;
  std::array<int, SystemTopology::n_comp> arch{};  // damage-resolved
  AssembledChain chain;
  VehicleSchedule schedule;

  MovingLoad axle_load(int axle, int loaded_slot) const;
  // component-local load-center coordinate of an axle at time t
  double local_center(int comp, int axle, double t) const;
};

BridgeSystem instantiate_system(const GlobalParameter& mu, const Library& lib);

// offsets: per sensor, (x offset from the crack, top or bottom boundary)
struct SensorSpec {
  double dx;
  bool top;
};
SensorSet resolve_sensors(const BridgeSystem& sys, const std::vector<SensorSpec>& spec);
std::vector<SensorSpec> near_layout(const Config& cfg);
std::vector<SensorSpec> far_layout(const Config& cfg);
std::vector<SensorSpec> union_layout(const Config& cfg);

}  // namespace prrbc

#endif
