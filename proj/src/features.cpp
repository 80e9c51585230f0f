#include "prrbc/features.hpp"

#include <omp.h>

#include <cmath>
#include <random>

namespace prrbc {

namespace {

// per-direction max absolute amplitude over all sensors and times
std::array<double, 2> direction_maxima(const CorrelationInput& in) {
  std::array<double, 2> m{0, 0};
  for (int d = 0; d < 2; ++d)
    for (int s = 0; s < in.n_sensors; ++s)
      m[d] = std::max(m[d], in.signals.col(d * in.n_sensors + s).cwiseAbs().maxCoeff());
  return m;
}

Eigen::VectorXd trapezoid_weights(int n_t, double dt) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n_t + 1, dt);
  w[0] = 0.5 * dt;
  w[n_t] = 0.5 * dt;
  return w;
}

}  // namespace

double correlation(const CorrelationInput& in, int i, int j, int k, int l, double tau) {
  if (i < 0 || j < 0 || i >= in.n_sensors || j >= in.n_sensors || k < 0 || l < 0 || k >= 2 ||
      l >= 2)
    throw std::invalid_argument("correlation index out of range");
  if (tau < 0 || tau > in.t_final) throw std::invalid_argument("tau must lie in [0, t_final]");
  const auto maxima = direction_maxima(in);
  if (maxima[k] == 0 || maxima[l] == 0)
    throw ZeroSignalError("correlation normalization undefined for identically zero signals");

  const int n_t = in.n_t();
  const double dt = in.dt();
  const int shift = static_cast<int>(std::llround(tau / dt));
  const auto& a = in.signals.col(k * in.n_sensors + i);
  const auto& b = in.signals.col(l * in.n_sensors + j);

  // trapezoid over [0, t_final - tau] on the shared grid
  const int last = n_t - shift;
  double acc = 0;
  for (int t = 0; t <= last; ++t) {
    const double w = (t == 0 || t == last) ? 0.5 : 1.0;
    acc += w * a[t] * b[t + shift];
  }
  acc *= dt;
  return acc / (in.t_final * maxima[k] * maxima[l]);
}

Eigen::MatrixXd signal_gram_serial(const CorrelationInput& in) {
  const Eigen::VectorXd w = trapezoid_weights(in.n_t(), in.dt());
  const Eigen::MatrixXd weighted = w.asDiagonal() * in.signals;
  return in.signals.transpose() * weighted;
}

Eigen::MatrixXd signal_gram(const CorrelationInput& in, bool parallel) {
  if (!parallel) return signal_gram_serial(in);
  const Eigen::VectorXd w = trapezoid_weights(in.n_t(), in.dt());
  const int m = static_cast<int>(in.signals.cols());
  Eigen::MatrixXd gram(m, m);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < m; ++a) {
    const Eigen::VectorXd wa = in.signals.col(a).cwiseProduct(w);
    for (int b = 0; b < m; ++b) gram(a, b) = wa.dot(in.signals.col(b));
  }
  return gram;
}

namespace {

Eigen::VectorXd ipv_from_gram(const CorrelationInput& in, int directions) {
  const auto maxima = direction_maxima(in);
  if (maxima[0] == 0 || (directions > 1 && maxima[1] == 0))
    throw ZeroSignalError("feature normalization undefined for identically zero signals");
  const Eigen::MatrixXd gram = signal_gram_serial(in);
  const int n = in.n_sensors;
  Eigen::VectorXd out(directions * n * n);
  int idx = 0;
  for (int k = 0; k < directions; ++k) {
    const double scale = in.t_final * maxima[k] * maxima[k];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[idx++] = gram(k * n + i, k * n + j) / scale;
  }
  return out;
}

}  // namespace

Eigen::VectorXd ipv_feature(const CorrelationInput& in) { return ipv_from_gram(in, 2); }

Eigen::VectorXd ipvx_feature(const CorrelationInput& in) { return ipv_from_gram(in, 1); }

Eigen::VectorXd feature_of(const CorrelationInput& in, FeatureKind kind) {
  return kind == FeatureKind::IPV ? ipv_feature(in) : ipvx_feature(in);
}

CorrelationInput add_noise(const CorrelationInput& in, double sigma, uint64_t seed) {
  if (sigma < 0) throw std::invalid_argument("noise factor must be non-negative");
  CorrelationInput out = in;
  if (sigma == 0) return out;
  out.noise_level += sigma;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  for (int c = 0; c < out.signals.cols(); ++c) {
    const double level = sigma * in.signals.col(c).cwiseAbs().maxCoeff();
    for (int t = 0; t < out.signals.rows(); ++t) out.signals(t, c) += level * dist(rng);
  }
  return out;
}

}  // namespace prrbc
