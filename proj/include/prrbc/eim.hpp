#ifndef PRRBC_EIM_HPP
#define PRRBC_EIM_HPP

#include <Eigen/Core>
#include <vector>

#include "prrbc/assembly.hpp"

namespace prrbc {

// Affine-in-parameter surrogate of the moving-load vector built by the greedy
// empirical interpolation method.  Coefficients for an arbitrary parameter are
// recovered from exact load values at the magic dofs (lower-triangular
// interpolation system), so the activation indicator is honored exactly: an
// inactive load yields all-zero coefficients.
struct EimSurrogate {
  Eigen::MatrixXd basis;        // n_dofs x Q, basis(magic[q], q) = 1
  std::vector<int> magic_dofs;  // mesh-dof indices, one per basis vector
  Eigen::MatrixXd interp;       // Q x Q lower triangular
  std::vector<double> train_errors;  // max relative training error per size
  double snapshot_scale = 0;         // largest training snapshot 2-norm

  int size() const { return static_cast<int>(magic_dofs.size()); }
  Eigen::VectorXd coefficients(const Eigen::VectorXd& magic_values) const;
  Eigen::VectorXd coefficients(const ComponentMesh& mesh, const MovingLoad& load, double l) const;
  Eigen::VectorXd interpolate(const ComponentMesh& mesh, const MovingLoad& load, double l) const;
};

struct EimTrainOptions {
  double tol = 1e-6;  // relative to the largest snapshot norm
  int q_max = 60;
};

// Greedy EIM over the load family sampled on the location grid and the given
// width/friction samples (amplitude fixed: the family is linear in it).
EimSurrogate eim_train(const ComponentMesh& mesh, const MovingLoad& base,
                       const std::vector<double>& l_grid, const std::vector<double>& sigma_samples,
                       const std::vector<double>& friction_samples, EimTrainOptions opts = {});

// Max relative interpolation error over a validation location grid.
double eim_validate(const EimSurrogate& eim, const ComponentMesh& mesh, const MovingLoad& base,
                    const std::vector<double>& l_grid, const std::vector<double>& sigma_samples,
                    const std::vector<double>& friction_samples);

// Uniform grid spanning the activation window with the spec'd margin.
std::vector<double> eim_location_grid(const MovingLoad& widest, int points_per_sigma = 8);

}  // namespace prrbc

#endif
