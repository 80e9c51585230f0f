#include "prrbc/frequency.hpp"

#include <Eigen/SparseLU>
#include <stdexcept>

namespace prrbc {

SparseMatC frequency_operator(const SparseMat& M0, const SparseMat& A0, double omega,
                              double youngs, double alpha, double beta) {
  const Complex cm = AffineOperatorSet::freq_mass_coeff(omega, alpha);
  const Complex ca = AffineOperatorSet::freq_stiff_coeff(omega, beta, youngs);
  return cm * M0.cast<Complex>() + ca * A0.cast<Complex>();
}

Eigen::VectorXcd fe_frequency_solve(const SparseMatC& A_hat, const Eigen::VectorXcd& f) {
  Eigen::SparseLU<SparseMatC> lu(A_hat);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("frequency operator is numerically singular");
  return lu.solve(f);
}

Eigen::VectorXcd constrained_frequency_solve(const SparseMatC& A_hat, const Eigen::VectorXcd& f,
                                             const std::vector<int>& constrained,
                                             const Eigen::VectorXcd& values) {
  const int n = static_cast<int>(A_hat.rows());
  std::vector<int> to_int(n);
  std::vector<char> is_c(n, 0);
  for (int c : constrained) is_c[c] = 1;
  std::vector<int> interior;
  interior.reserve(n - constrained.size());
  for (int i = 0; i < n; ++i) {
    if (!is_c[i]) {
      to_int[i] = static_cast<int>(interior.size());
      interior.push_back(i);
    } else {
      to_int[i] = -1;
    }
  }
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(n);
  for (int c : constrained) full[c] = values[c];

  // rhs_I = f_I - A_IC g, gathered from the full operator
  Eigen::VectorXcd rhs(interior.size());
  for (size_t i = 0; i < interior.size(); ++i) rhs[i] = f[interior[i]];
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(A_hat.nonZeros());
  for (int k = 0; k < A_hat.outerSize(); ++k)
    for (SparseMatC::InnerIterator it(A_hat, k); it; ++it) {
      const int ri = to_int[it.row()];
      if (ri < 0) continue;
      const int ci = to_int[it.col()];
      if (ci >= 0)
        trips.emplace_back(ri, ci, it.value());
      else
        rhs[ri] -= it.value() * full[it.col()];
    }
  SparseMatC A_ii(interior.size(), interior.size());
  A_ii.setFromTriplets(trips.begin(), trips.end());
  const Eigen::VectorXcd x = fe_frequency_solve(A_ii, rhs);
  for (size_t i = 0; i < interior.size(); ++i) full[interior[i]] = x[i];
  return full;
}

}  // namespace prrbc
