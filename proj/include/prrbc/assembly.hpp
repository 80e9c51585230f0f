#ifndef PRRBC_ASSEMBLY_HPP
#define PRRBC_ASSEMBLY_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <vector>

#include "prrbc/geometry.hpp"

namespace prrbc {

using SparseMat = Eigen::SparseMatrix<double>;
using SparseMatC = Eigen::SparseMatrix<std::complex<double>>;
using Complex = std::complex<double>;

// Parameter-affine operators of one component: two parameter-independent
// matrices suffice.  M0 carries the density; A0 is the unit-Young plane-strain
// stiffness; H1 is the (grad:grad + L2) Gram matrix of the solution space.
// The *_full matrices live on all dofs; M0/A0/H1 are restricted to free dofs
// (Dirichlet dofs eliminated symmetrically).
struct AffineOperatorSet {
  SparseMat M0_full, A0_full, H1_full;
  SparseMat M0, A0, H1;
  std::vector<int> free_dofs;     // free-dof -> mesh-dof
  std::vector<int> full_to_free;  // mesh-dof -> free-dof or -1
  double rho = 0, nu = 0;
  int n_free = 0;

  // time operator: M = M0, C = alpha*M0 + beta*E*A0, A = E*A0
  // frequency operator: (-w^2 + i w alpha) M0 + E (1 + i w beta) A0
  static Complex freq_mass_coeff(double omega, double alpha) {
    return Complex(-omega * omega, omega * alpha);
  }
  static Complex freq_stiff_coeff(double omega, double beta, double youngs) {
    return youngs * Complex(1.0, omega * beta);
  }

  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;
};

// Plane-strain Lame coefficients for unit Young's modulus.
inline double lame_lambda(double youngs, double nu) {
  return youngs * nu / ((1 + nu) * (1 - 2 * nu));
}
inline double lame_mu(double youngs, double nu) { return youngs / (2 * (1 + nu)); }

AffineOperatorSet assemble_operators(const ComponentMesh& mesh, double rho, double nu,
                                     bool parallel = true);

// Serial reference used by tests and the kernel benchmark.
AffineOperatorSet assemble_operators_serial(const ComponentMesh& mesh, double rho, double nu);

// Gaussian traction moving along the loaded (upper) boundary.  The load-center
// coordinate l is measured from the component midpoint; the traction acts on
// the connection strip [-d1, d2] and is active iff l lies in
// [-d1 - 4 sigma_x, d2 + 4 sigma_x], so switching only cuts the far tail.
struct MovingLoad {
  double amplitude = 1e6;   // F [Pa]
  double sigma_x = 0.03;    // spatial width [m]
  double friction = 0.6;    // c_friction: y-traction = -friction * x-traction
  double d1 = 0.125, d2 = 0.125;  // activation half-extents [m]

  bool active(double l) const {
    return l >= -d1 - 4 * sigma_x && l <= d2 + 4 * sigma_x;
  }
};

// Full-length load vector on mesh dofs (zero when the activation indicator
// vanishes); boundary quadrature resolves the Gaussian width.
Eigen::VectorXd assemble_load_vector(const ComponentMesh& mesh, const MovingLoad& load, double l);

// Single entries of the exact load vector (used for EIM interpolation
// coefficients); `dofs` are mesh-dof indices.
Eigen::VectorXd load_vector_entries(const ComponentMesh& mesh, const MovingLoad& load, double l,
                                    const std::vector<int>& dofs);

}  // namespace prrbc

#endif
