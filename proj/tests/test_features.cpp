#include <doctest.h>

#include <cmath>
#include <random>

#include "prrbc/features.hpp"

using namespace prrbc;

namespace {

CorrelationInput make_input(int n_sensors, int n_t, double t_final) {
  CorrelationInput in;
  in.component = 7;
  in.t_final = t_final;
  in.n_sensors = n_sensors;
  in.signals.resize(n_t + 1, 2 * n_sensors);
  return in;
}

CorrelationInput random_input(int n_sensors, int n_t, uint64_t seed) {
  CorrelationInput in = make_input(n_sensors, n_t, 2.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  // smooth random signals: random low-order Fourier combinations
  for (int c = 0; c < in.signals.cols(); ++c) {
    const double a = dist(rng), b = dist(rng), ph = dist(rng);
    for (int t = 0; t <= n_t; ++t) {
      const double x = 2 * M_PI * t / n_t;
      in.signals(t, c) = a * std::sin(x + ph) + b * std::sin(3 * x);
    }
  }
  return in;
}

}  // namespace

TEST_CASE("constant unit signals correlate to exactly one") {
  CorrelationInput in = make_input(4, 100, 5.0);
  in.signals.setOnes();
  CHECK(correlation(in, 0, 1, 0, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sine autocorrelation at zero shift is one half") {
  CorrelationInput in = make_input(2, 10000, 3.0);
  for (int t = 0; t <= in.n_t(); ++t) {
    const double v = std::sin(2 * M_PI * t / in.n_t());
    for (int c = 0; c < 4; ++c) in.signals(t, c) = v;
  }
  CHECK(std::abs(correlation(in, 0, 1, 0, 0, 0.0) - 0.5) <= 1e-4);
}

TEST_CASE("correlation is symmetric in the sensors at zero shift") {
  CorrelationInput in = random_input(4, 400, 11);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(correlation(in, i, j, k, k, 0.0) ==
              doctest::Approx(correlation(in, j, i, k, k, 0.0)).epsilon(1e-13));
}

TEST_CASE("correlations are bounded by one in magnitude") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tau_pick(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    CorrelationInput in = random_input(3, 300, 100 + trial);
    const double tau = tau_pick(rng) * in.t_final;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) CHECK(std::abs(correlation(in, i, j, k, l, tau)) <= 1.0);
  }
}

TEST_CASE("feature shapes, slicing and invariances") {
  CorrelationInput in = random_input(4, 500, 21);
  const Eigen::VectorXd ipv = ipv_feature(in);
  const Eigen::VectorXd ipvx = ipvx_feature(in);
  CHECK(ipv.size() == 32);
  CHECK(ipvx.size() == 16);
  CHECK((ipv.head(16) - ipvx).cwiseAbs().maxCoeff() == 0.0);  // k=1 block
  CHECK(ipv.cwiseAbs().maxCoeff() <= 1.0);

  // order-zero homogeneity under uniform displacement scaling
  CorrelationInput scaled = in;
  scaled.signals *= 10.0;
  CHECK((ipv_feature(scaled) - ipv).cwiseAbs().maxCoeff() <= 1e-13);

  // determinism
  CHECK((ipv_feature(in) - ipv).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feature entries match the correlation definition") {
  CorrelationInput in = random_input(4, 300, 33);
  const Eigen::VectorXd ipv = ipv_feature(in);
  int idx = 0;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(ipv[idx++] == doctest::Approx(correlation(in, i, j, k, k, 0.0)).epsilon(1e-12));
}

TEST_CASE("zero signals raise the dedicated error") {
  CorrelationInput in = make_input(2, 50, 1.0);
  in.signals.setZero();
  CHECK_THROWS_AS(correlation(in, 0, 0, 0, 0, 0.0), ZeroSignalError);
  CHECK_THROWS_AS(ipv_feature(in), ZeroSignalError);
}

TEST_CASE("noise model") {
  SUBCASE("zero factor keeps the input bitwise") {
    CorrelationInput in = random_input(4, 200, 5);
    const CorrelationInput same = add_noise(in, 0.0, 9);
    CHECK((same.signals - in.signals).cwiseAbs().maxCoeff() == 0.0);
    CHECK(same.noise_level == 0.0);
  }

  SUBCASE("empirical noise level matches the factor") {
    CorrelationInput in = make_input(1, 100000, 1.0);
    for (int t = 0; t <= in.n_t(); ++t) {
      in.signals(t, 0) = std::sin(2 * M_PI * t / in.n_t());
      in.signals(t, 1) = 0.5 * std::cos(2 * M_PI * t / in.n_t());
    }
    const double sigma = 0.02;
    const CorrelationInput noisy = add_noise(in, sigma, 12345);
    CHECK(noisy.noise_level == sigma);
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd diff = noisy.signals.col(c) - in.signals.col(c);
      const double std_emp = std::sqrt(diff.squaredNorm() / diff.size());
      const double target = sigma * in.signals.col(c).cwiseAbs().maxCoeff();
      CHECK(std_emp == doctest::Approx(target).epsilon(0.10));
    }
  }

  SUBCASE("seeded noise is reproducible") {
    CorrelationInput in = random_input(2, 100, 77);
    const CorrelationInput a = add_noise(in, 0.05, 42);
    const CorrelationInput b = add_noise(in, 0.05, 42);
    CHECK((a.signals - b.signals).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("parallel signal gram matches the serial reference") {
  CorrelationInput in = random_input(6, 800, 55);
  const Eigen::MatrixXd a = signal_gram_serial(in);
  const Eigen::MatrixXd b = signal_gram(in, true);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-13 * a.cwiseAbs().maxCoeff());
}
