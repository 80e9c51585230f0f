#include "prrbc/pod.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace prrbc {

PodResult pod(const Eigen::MatrixXd& snapshots, const SparseMat* metric, int n_modes,
              double rank_tol) {
  const Eigen::Index m = snapshots.cols();
  if (m == 0) throw std::invalid_argument("POD needs at least one snapshot");
  Eigen::MatrixXd gram;
  if (metric)
    gram = snapshots.transpose() * (*metric * snapshots);
  else
    gram = snapshots.transpose() * snapshots;
  gram = 0.5 * (gram + gram.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("POD eigensolve failed");

  PodResult out;
  out.eigenvalues = eig.eigenvalues().reverse();
  const double lmax = out.eigenvalues[0];
  if (!(lmax > 0)) throw std::invalid_argument("POD snapshots are all zero");

  int kept = 0;
  double energy = 0;
  const int want = std::min<int>(n_modes, static_cast<int>(m));
  out.modes.resize(snapshots.rows(), want);
  for (int k = 0; k < want; ++k) {
    const double lambda = out.eigenvalues[k];
    if (lambda <= rank_tol * lmax) break;
    out.modes.col(kept) = snapshots * eig.eigenvectors().col(m - 1 - k) / std::sqrt(lambda);
    energy += lambda;
    ++kept;
  }
  out.modes.conservativeResize(Eigen::NoChange, kept);
  out.retained_energy = energy / out.eigenvalues.sum();
  return out;
}

}  // namespace prrbc
