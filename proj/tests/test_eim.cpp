#include <doctest.h>

#include "prrbc/eim.hpp"
#include "prrbc/geometry.hpp"

using namespace prrbc;

namespace {

ComponentMesh loaded_mesh() {
  ComponentGeometry g;
  g.kind = ComponentKind::RectLoaded;
  g.length = 5;
  g.thickness = 1;
  return generate_component_mesh(g, 0.25);
}

MovingLoad widest_load() {
  MovingLoad load;
  load.amplitude = 1.0;
  load.sigma_x = 0.04;
  load.friction = 0.7;
  load.d1 = load.d2 = 0.15;
  return load;
}

}  // namespace

TEST_CASE("single snapshot training reproduces that snapshot exactly") {
  auto mesh = loaded_mesh();
  MovingLoad load = widest_load();
  auto eim = eim_train(mesh, load, {0.05}, {load.sigma_x}, {load.friction});
  CHECK(eim.size() == 1);
  const Eigen::VectorXd exact = assemble_load_vector(mesh, load, 0.05);
  const Eigen::VectorXd approx = eim.interpolate(mesh, load, 0.05);
  CHECK((exact - approx).norm() <= 1e-13 * exact.norm());
}

TEST_CASE("greedy training errors are non-increasing and reach the tolerance") {
  auto mesh = loaded_mesh();
  MovingLoad load = widest_load();
  EimTrainOptions opts;
  opts.tol = 1e-6;
  auto eim = eim_train(mesh, load, eim_location_grid(load, 8), {0.02, 0.03, 0.04}, {0.5, 0.7},
                       opts);
  REQUIRE(eim.train_errors.size() >= 2);
  // mirrored locations tie pairwise, so the max error may repeat once
  for (size_t i = 1; i < eim.train_errors.size(); ++i)
    CHECK(eim.train_errors[i] <= eim.train_errors[i - 1] * (1 + 1e-12));
  CHECK(eim.train_errors.back() < eim.train_errors.front());
  CHECK(eim.train_errors.back() <= opts.tol);
}

TEST_CASE("interpolation is exact at the magic dofs") {
  auto mesh = loaded_mesh();
  MovingLoad load = widest_load();
  auto eim = eim_train(mesh, load, eim_location_grid(load, 8), {0.03}, {0.6});
  MovingLoad probe = load;
  probe.sigma_x = 0.025;
  probe.friction = 0.55;
  const double l = 0.0131;
  const Eigen::VectorXd exact = assemble_load_vector(mesh, probe, l);
  const Eigen::VectorXd approx = eim.interpolate(mesh, probe, l);
  for (int d : eim.magic_dofs)
    CHECK(std::abs(exact[d] - approx[d]) <= 1e-12 * eim.snapshot_scale);
}

TEST_CASE("validation on a ten-times denser grid stays within ten times the tolerance") {
  auto mesh = loaded_mesh();
  MovingLoad load = widest_load();
  EimTrainOptions opts;
  opts.tol = 1e-6;
  auto eim =
      eim_train(mesh, load, eim_location_grid(load, 8), {0.02, 0.03, 0.04}, {0.5, 0.7}, opts);
  const double err = eim_validate(eim, mesh, load, eim_location_grid(load, 80), {0.03}, {0.6});
  CHECK(err <= 10 * opts.tol);
}

TEST_CASE("inactive locations produce exactly zero coefficients") {
  auto mesh = loaded_mesh();
  MovingLoad load = widest_load();
  auto eim = eim_train(mesh, load, eim_location_grid(load, 8), {0.03}, {0.6});
  MovingLoad narrow = load;
  narrow.d1 = narrow.d2 = 0.10;
  narrow.sigma_x = 0.02;
  const double just_outside = narrow.d2 + 4 * narrow.sigma_x + 1e-6;
  CHECK(eim.coefficients(mesh, narrow, just_outside).norm() == 0.0);
  CHECK(eim.interpolate(mesh, narrow, just_outside).norm() == 0.0);
}

TEST_CASE("degenerate all-zero training set is rejected") {
  auto mesh = loaded_mesh();
  MovingLoad dead = widest_load();
  dead.amplitude = 0.0;
  CHECK_THROWS_AS(eim_train(mesh, dead, {0.0, 0.1}, {0.03}, {0.6}), std::invalid_argument);
}
