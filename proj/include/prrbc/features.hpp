#ifndef PRRBC_FEATURES_HPP
#define PRRBC_FEATURES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>

namespace prrbc {

// Sensor trajectories of one component on a uniform time grid; columns hold
// the x-direction signals of every sensor, then the y-direction signals.
struct CorrelationInput {
  int component = -1;
  double t_final = 0;
  int n_sensors = 0;
  Eigen::MatrixXd signals;   // (n_t+1) x (2 n_sensors)
  double noise_level = 0.0;  // provenance: accumulated noise factor

  int n_t() const { return static_cast<int>(signals.rows()) - 1; }
  double dt() const { return t_final / n_t(); }
};

struct ZeroSignalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Normalized two-point correlation of sensors i and j in directions k and l
// (all zero-based) at time shift tau; tau snaps to the trajectory grid.
// Normalization divides by the per-direction max absolute amplitude over the
// component's sensors and the whole record, so |C| <= 1.
double correlation(const CorrelationInput& input, int i, int j, int k, int l, double tau);

// All same-direction pairs at tau = 0, direction-major then i then j:
// 2 n^2 entries for IPV, the x-direction n^2 block for IPVx.
Eigen::VectorXd ipv_feature(const CorrelationInput& input);
Eigen::VectorXd ipvx_feature(const CorrelationInput& input);

enum class FeatureKind { IPV, IPVx };
Eigen::VectorXd feature_of(const CorrelationInput& input, FeatureKind kind);

// Additive Gaussian measurement noise: per signal, std = sigma * max |signal|
// (the max taken before perturbation).
CorrelationInput add_noise(const CorrelationInput& input, double sigma, uint64_t seed);

// Gram matrix of all signal pairs under the trapezoidal time weights; the
// building block behind the feature vectors.  The parallel path splits the
// pair loop across threads; the serial one is the reference.
Eigen::MatrixXd signal_gram(const CorrelationInput& input, bool parallel = false);
Eigen::MatrixXd signal_gram_serial(const CorrelationInput& input);

}  // namespace prrbc

#endif
