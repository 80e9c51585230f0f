#ifndef PRRBC_POD_HPP
#define PRRBC_POD_HPP

#include <Eigen/Core>

#include "prrbc/assembly.hpp"

namespace prrbc {

struct PodResult {
  Eigen::MatrixXd modes;        // n x n_kept, metric-orthonormal
  Eigen::VectorXd eigenvalues;  // all snapshot-Gram eigenvalues, non-increasing
  double retained_energy = 0;   // sum of kept eigenvalues / total
};

// Snapshot POD via the method of snapshots; metric may be empty (Euclidean).
// Modes with eigenvalues below rank_tol * lambda_max are never kept, so the
// result may hold fewer than n_modes columns when the snapshots are deficient.
PodResult pod(const Eigen::MatrixXd& snapshots, const SparseMat* metric, int n_modes,
              double rank_tol = 1e-12);

}  // namespace prrbc

#endif
