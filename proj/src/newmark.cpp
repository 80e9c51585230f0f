#include "prrbc/newmark.hpp"

namespace prrbc {

void fe_newmark_march(const SparseMat& M, const SparseMat& C, const SparseMat& A,
                      const LoadFn& load, double t_final, int n_t, const StepObserver& observer,
                      NewmarkParams p, const Eigen::VectorXd* u0, const Eigen::VectorXd* v0) {
  newmark_march<SparseMat, Eigen::SimplicialLDLT<SparseMat>>(M, C, A, load, t_final, n_t, observer,
                                                             p, u0, v0);
}

void dense_newmark_march(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                         const Eigen::MatrixXd& A, const LoadFn& load, double t_final, int n_t,
                         const StepObserver& observer, NewmarkParams p, const Eigen::VectorXd* u0,
                         const Eigen::VectorXd* v0) {
  newmark_march<Eigen::MatrixXd, Eigen::LDLT<Eigen::MatrixXd>>(M, C, A, load, t_final, n_t,
                                                               observer, p, u0, v0);
}

}  // namespace prrbc
