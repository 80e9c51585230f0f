#ifndef PRRBC_CONFIG_HPP
#define PRRBC_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace prrbc {

// Sampling intervals of the stochastic model inputs.  Defaults follow the
// reinforced-concrete highway-bridge values used throughout.
struct ParameterBounds {
  double alpha_min = 0.566, alpha_max = 4.311;  // Rayleigh mass damping [1/s]
  double beta_min = 0.009, beta_max = 0.021;    // Rayleigh stiffness damping [s]
  double youngs_min = 29e9, youngs_max = 37e9;  // [Pa]
  double amplitude_min = 1e6, amplitude_max = 2e6;  // load amplitude [Pa]
  double sigma_x_min = 0.02, sigma_x_max = 0.04;    // load width [m]
  double friction_min = 0.5, friction_max = 0.7;
  double d_min = 0.10, d_max = 0.15;            // activation half-extents [m]
  double speed_min = 15.0 / 3.6, speed_max = 50.0 / 3.6;  // [m/s]
  double axle_gap_mean = 3.0, axle_gap_std = 0.5;         // [m]
  double rho = 2400.0;  // [kg/m^3]
  double nu = 0.15;
};

struct Config {
  // archetype library geometry
  double span_length = 5.0;   // L [m]
  double thickness = 1.0;     // H [m]
  double mesh_h = 0.25;       // target element size [m]
  double crack_depth_frac = 0.3;   // of the thickness
  double crack_opening = 0.006;    // [m], meshed as a collapsed slit
  double pier_height_factor = 3.0;

  ParameterBounds bounds;

  // frequency training set: n_omega = c_lower * c_upper + 1 equally spaced
  // angular frequencies from 0, spacing 1/(c_lower * sigma_t_ref)
  int c_lower = 10;
  int c_upper = 5;

  // reduced space sizes and training volumes
  std::array<int, 4> port_modes = {3, 4, 4, 3};
  int lifting_bubbles = 2;
  int inhomogeneity_bubbles = 1;
  int port_train_samples = 200;
  int bubble_train_samples = 32;
  double eim_tol = 1e-6;
  int eim_q_max = 60;
  int eim_points_per_sigma = 8;
  double greedy_eps = 1e-5;
  int greedy_n_cap = 51;

  // time discretization
  int n_t = 10000;
  double richardson_tol = 1e-4;
  int richardson_max_n_t = 20000;

  // sensor offsets from the potential crack [m]
  double sensor_near = 0.2;
  double sensor_far = 0.5;
  double sensor_bottom = 0.5;

  uint64_t offline_seed = 101;

  double sigma_t_ref() const { return bounds.d_min / bounds.speed_max; }
  double d_omega() const { return 1.0 / (c_lower * sigma_t_ref()); }
  double omega_max() const { return c_upper / sigma_t_ref(); }
  int n_omega() const { return c_lower * c_upper + 1; }

  // hash over everything that shapes the offline artifact
  uint64_t library_hash() const;
  uint64_t config_hash() const;

  std::string to_json_string() const;
  static Config from_json_string(const std::string& text);
  static Config load(const std::string& path);  // validates, line-level messages
  void save(const std::string& path) const;
  void validate() const;

  // coarse settings for quick end-to-end runs
  static Config smoke();
};

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 1469598103934665603ull);

// The angular-frequency training set {0, d_omega, ..., omega_max}.
std::vector<double> omega_set(const Config& cfg);

}  // namespace prrbc

#endif
