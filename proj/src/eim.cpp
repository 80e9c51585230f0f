#include "prrbc/eim.hpp"

#include <cmath>
#include <stdexcept>

namespace prrbc {

Eigen::VectorXd EimSurrogate::coefficients(const Eigen::VectorXd& magic_values) const {
  const int q = size();
  Eigen::VectorXd theta(q);
  for (int i = 0; i < q; ++i) {
    double v = magic_values[i];
    for (int j = 0; j < i; ++j) v -= interp(i, j) * theta[j];
    theta[i] = v / interp(i, i);
  }
  return theta;
}

Eigen::VectorXd EimSurrogate::coefficients(const ComponentMesh& mesh, const MovingLoad& load,
                                           double l) const {
  return coefficients(load_vector_entries(mesh, load, l, magic_dofs));
}

Eigen::VectorXd EimSurrogate::interpolate(const ComponentMesh& mesh, const MovingLoad& load,
                                          double l) const {
  return basis * coefficients(mesh, load, l);
}

std::vector<double> eim_location_grid(const MovingLoad& widest, int points_per_sigma) {
  const double lo = -widest.d1 - 4 * widest.sigma_x;
  const double hi = widest.d2 + 4 * widest.sigma_x;
  const double spacing = widest.sigma_x / points_per_sigma;
  const int n = static_cast<int>(std::ceil((hi - lo) / spacing));
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = lo + (hi - lo) * i / n;
  return grid;
}

EimSurrogate eim_train(const ComponentMesh& mesh, const MovingLoad& base,
                       const std::vector<double>& l_grid, const std::vector<double>& sigma_samples,
                       const std::vector<double>& friction_samples, EimTrainOptions opts) {
  const int n = mesh.num_dofs();
  std::vector<Eigen::VectorXd> snaps;
  snaps.reserve(l_grid.size() * sigma_samples.size() * friction_samples.size());
  for (double sig : sigma_samples)
    for (double cf : friction_samples) {
      MovingLoad load = base;
      load.sigma_x = sig;
      load.friction = cf;
      for (double l : l_grid) snaps.push_back(assemble_load_vector(mesh, load, l));
    }

  double scale = 0;
  for (const auto& s : snaps) scale = std::max(scale, s.norm());
  if (!(scale > 0)) throw std::invalid_argument("EIM training set is degenerate (all zero)");

  EimSurrogate eim;
  eim.snapshot_scale = scale;
  eim.basis.resize(n, 0);
  std::vector<Eigen::VectorXd> residuals = snaps;

  while (eim.size() < opts.q_max) {
    int worst = -1;
    double worst_err = 0;
    for (size_t s = 0; s < residuals.size(); ++s) {
      const double e = residuals[s].norm() / scale;
      if (e > worst_err) {
        worst_err = e;
        worst = static_cast<int>(s);
      }
    }
    eim.train_errors.push_back(worst_err);
    if (worst_err <= opts.tol || worst < 0) break;

    const Eigen::VectorXd& r = residuals[worst];
    int magic = 0;
    r.cwiseAbs().maxCoeff(&magic);
    const Eigen::VectorXd new_basis = r / r[magic];

    const int q = eim.size();
    eim.basis.conservativeResize(Eigen::NoChange, q + 1);
    eim.basis.col(q) = new_basis;
    eim.magic_dofs.push_back(magic);
    // deflate every residual at the new magic dof
    for (auto& res : residuals) res -= res[magic] * new_basis;
  }

  const int q = eim.size();
  if (q == 0) throw std::runtime_error("EIM selected no basis vectors");
  eim.interp.setZero(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) eim.interp(i, j) = eim.basis(eim.magic_dofs[i], j);
  return eim;
}

double eim_validate(const EimSurrogate& eim, const ComponentMesh& mesh, const MovingLoad& base,
                    const std::vector<double>& l_grid, const std::vector<double>& sigma_samples,
                    const std::vector<double>& friction_samples) {
  double worst = 0;
  for (double sig : sigma_samples)
    for (double cf : friction_samples) {
      MovingLoad load = base;
      load.sigma_x = sig;
      load.friction = cf;
      for (double l : l_grid) {
        const Eigen::VectorXd exact = assemble_load_vector(mesh, load, l);
        const Eigen::VectorXd approx = eim.interpolate(mesh, load, l);
        worst = std::max(worst, (exact - approx).norm() / eim.snapshot_scale);
      }
    }
  return worst;
}

}  // namespace prrbc
