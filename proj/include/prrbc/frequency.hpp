#ifndef PRRBC_FREQUENCY_HPP
#define PRRBC_FREQUENCY_HPP

#include <Eigen/Core>
#include <vector>

#include "prrbc/assembly.hpp"

namespace prrbc {

// Frequency-domain operator (-w^2 + i w alpha) M0 + E (1 + i w beta) A0 on the
// given restricted operators.
SparseMatC frequency_operator(const SparseMat& M0, const SparseMat& A0, double omega,
                              double youngs, double alpha, double beta);

// Direct sparse solve of the Helmholtz problem A_hat u = f.
Eigen::VectorXcd fe_frequency_solve(const SparseMatC& A_hat, const Eigen::VectorXcd& f);

// Solve with Dirichlet values imposed on a subset of dofs.  values is a
// full-length vector of which only the constrained entries are read; the
// interior block solves A_II x_I = f_I - A_IC g.
Eigen::VectorXcd constrained_frequency_solve(const SparseMatC& A_hat, const Eigen::VectorXcd& f,
                                             const std::vector<int>& constrained,
                                             const Eigen::VectorXcd& values);

}  // namespace prrbc

#endif
