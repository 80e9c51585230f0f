#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "prrbc/frequency.hpp"
#include "prrbc/geometry.hpp"
#include "prrbc/newmark.hpp"

using namespace prrbc;

namespace {

SparseMat scalar_mat(double v) {
  SparseMat m(1, 1);
  m.insert(0, 0) = v;
  m.makeCompressed();
  return m;
}

// error against u(t) = 1 - cos(t) for the single-dof oscillator m=1, k=1,
// c=0 under a unit step force
struct OscillatorErrors {
  double at_end = 0, max = 0;
};

OscillatorErrors oscillator_errors(double t_final, int n_t) {
  SparseMat M = scalar_mat(1), C = scalar_mat(0), K = scalar_mat(1);
  const double dt = t_final / n_t;
  OscillatorErrors err;
  fe_newmark_march(
      M, C, K, [](int, Eigen::VectorXd& f) { f.setConstant(1.0); }, t_final, n_t,
      [&](int j, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
        const double e = std::abs(u[0] - (1.0 - std::cos(j * dt)));
        err.max = std::max(err.max, e);
        if (j == n_t) err.at_end = e;
      });
  return err;
}

}  // namespace

TEST_CASE("zero load and zero initial conditions stay identically zero") {
  SparseMat M = scalar_mat(2), C = scalar_mat(0.1), K = scalar_mat(3);
  double max_abs = 0;
  fe_newmark_march(
      M, C, K, [](int, Eigen::VectorXd& f) { f.setZero(); }, 1.0, 50,
      [&](int, const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& a) {
        max_abs = std::max({max_abs, u.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff(),
                            a.cwiseAbs().maxCoeff()});
      });
  CHECK(max_abs == 0.0);
}

TEST_CASE("single-dof oscillator matches the analytic solution") {
  const int n_t = static_cast<int>(std::lround(M_PI / 1e-3));
  CHECK(oscillator_errors(M_PI, n_t).at_end <= 1e-5);
}

TEST_CASE("halving the step reduces the max error by a factor of four") {
  const double t = M_PI;
  double prev = oscillator_errors(t, 200).max;
  for (int n_t : {400, 800}) {
    const double cur = oscillator_errors(t, n_t).max;
    const double ratio = prev / cur;
    CHECK(ratio > 4.0 * 0.85);
    CHECK(ratio < 4.0 * 1.15);
    prev = cur;
  }
}

TEST_CASE("dense and sparse marches agree") {
  SparseMat M = scalar_mat(1), C = scalar_mat(0.2), K = scalar_mat(4);
  Eigen::MatrixXd Md = Eigen::MatrixXd(M), Cd = Eigen::MatrixXd(C), Kd = Eigen::MatrixXd(K);
  std::vector<double> us, ud;
  auto load = [](int j, Eigen::VectorXd& f) { f.setConstant(j == 0 ? 0.0 : 1.0); };
  fe_newmark_march(M, C, K, load, 2.0, 100,
                   [&](int, const Eigen::VectorXd& u, const Eigen::VectorXd&,
                       const Eigen::VectorXd&) { us.push_back(u[0]); });
  dense_newmark_march(Md, Cd, Kd, load, 2.0, 100,
                      [&](int, const Eigen::VectorXd& u, const Eigen::VectorXd&,
                          const Eigen::VectorXd&) { ud.push_back(u[0]); });
  REQUIRE(us.size() == ud.size());
  for (size_t i = 0; i < us.size(); ++i) CHECK(us[i] == doctest::Approx(ud[i]).epsilon(1e-12));
}

TEST_CASE("frequency solve closed forms") {
  SUBCASE("omega zero reduces to statics") {
    SparseMat M = scalar_mat(3), A = scalar_mat(5);
    auto Ah = frequency_operator(M, A, 0.0, 2.0, 1.0, 0.1);
    Eigen::VectorXcd f(1);
    f[0] = Complex(1, 0);
    auto u = fe_frequency_solve(Ah, f);
    CHECK(u[0].real() == doctest::Approx(1.0 / 10.0).epsilon(1e-14));
    CHECK(u[0].imag() == doctest::Approx(0.0));
  }
  SUBCASE("single dof matches the transfer function") {
    const double m = 2, k = 5, omega = 3, alpha = 0.7, beta = 0.02, E = 1.0;
    SparseMat M = scalar_mat(m), A = scalar_mat(k);
    auto Ah = frequency_operator(M, A, omega, E, alpha, beta);
    Eigen::VectorXcd f(1);
    f[0] = Complex(1, 0);
    auto u = fe_frequency_solve(Ah, f);
    const Complex c = m * alpha + beta * k;  // Rayleigh damping
    const Complex expected = 1.0 / (-omega * omega * m + Complex(0, omega) * c + k);
    CHECK(std::abs(u[0] - expected) <= 1e-14 * std::abs(expected));
  }
}

TEST_CASE("late-time response to a sinusoidal load matches the frequency solve") {
  ComponentGeometry g;
  g.kind = ComponentKind::Rect15L;  // fully clamped bottom when length == thickness
  g.length = 1;
  g.thickness = 1;
  auto mesh = generate_component_mesh(g, 0.25);
  auto ops = assemble_operators(mesh, 1.0, 0.15);

  const double E = 1e4, alpha = 4.0, beta = 2e-3, omega = 60.0;
  SparseMat M = ops.M0;
  SparseMat A = E * ops.A0;
  SparseMat C = alpha * M + beta * A;

  Eigen::VectorXcd fhat = Eigen::VectorXcd::Zero(ops.n_free);
  fhat[ops.n_free / 2] = Complex(1.0, 0.5);
  auto uhat = fe_frequency_solve(frequency_operator(ops.M0, ops.A0, omega, E, alpha, beta), fhat);

  const double period = 2 * M_PI / omega;
  const double t_final = 30 * period;
  const int n_t = 6000;
  const double dt = t_final / n_t;
  const double u_scale = uhat.cwiseAbs().maxCoeff();

  double worst_late = 0;
  fe_newmark_march(
      M, C, A,
      [&](int j, Eigen::VectorXd& f) {
        f = (fhat * std::exp(Complex(0, omega * j * dt))).real();
      },
      t_final, n_t,
      [&](int j, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
        if (j < n_t - 200) return;  // compare over the last period after transients decay
        const Eigen::VectorXd ref = (uhat * std::exp(Complex(0, omega * j * dt))).real();
        worst_late = std::max(worst_late, (u - ref).cwiseAbs().maxCoeff() / u_scale);
      });
  CHECK(worst_late < 0.01);
}
