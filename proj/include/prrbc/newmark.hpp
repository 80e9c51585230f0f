#ifndef PRRBC_NEWMARK_HPP
#define PRRBC_NEWMARK_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <functional>
#include <stdexcept>

#include "prrbc/assembly.hpp"

namespace prrbc {

struct NewmarkParams {
  double beta = 0.25;
  double gamma = 0.5;
};

using LoadFn = std::function<void(int, Eigen::VectorXd&)>;
using StepObserver = std::function<void(int, const Eigen::VectorXd&, const Eigen::VectorXd&,
                                        const Eigen::VectorXd&)>;

// One Newmark-beta march with the marching matrix factored once.  Matrices may
// be sparse (FE truth) or dense (reduced model); the observer receives
// (step j, u, v=du/dt, a=d2u/dt2) including the initial state at j=0.
// The initial acceleration solves M a0 = f(0) - C v0 - A u0.
template <typename Mat, typename Solver>
void newmark_march(const Mat& M, const Mat& C, const Mat& A, const LoadFn& load, double t_final,
                   int n_t, const StepObserver& observer, NewmarkParams p = {},
                   const Eigen::VectorXd* u0 = nullptr, const Eigen::VectorXd* v0 = nullptr) {
  if (n_t < 1) throw std::invalid_argument("n_t must be >= 1");
  const double dt = t_final / n_t;
  const auto n = M.rows();

  Mat T = M + (dt * p.gamma) * C + (dt * dt * p.beta) * A;
  Solver mass_solver(M);
  if (mass_solver.info() != Eigen::Success) throw std::runtime_error("singular mass matrix");
  Solver march_solver(T);
  if (march_solver.info() != Eigen::Success) throw std::runtime_error("singular marching matrix");

  Eigen::VectorXd u = u0 ? *u0 : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = v0 ? *v0 : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f(n), rhs(n);
  load(0, f);
  Eigen::VectorXd a = mass_solver.solve(f - C * v - A * u);
  observer(0, u, v, a);

  Eigen::VectorXd a_new(n);
  for (int j = 1; j <= n_t; ++j) {
    load(j, f);
    rhs = f - C * (v + dt * (1 - p.gamma) * a) -
          A * (u + dt * v + dt * dt * (0.5 - p.beta) * a);
    a_new = march_solver.solve(rhs);
    u += dt * v + dt * dt * ((0.5 - p.beta) * a + p.beta * a_new);
    v += dt * ((1 - p.gamma) * a + p.gamma * a_new);
    a = a_new;
    observer(j, u, v, a);
  }
}

void fe_newmark_march(const SparseMat& M, const SparseMat& C, const SparseMat& A,
                      const LoadFn& load, double t_final, int n_t, const StepObserver& observer,
                      NewmarkParams p = {}, const Eigen::VectorXd* u0 = nullptr,
                      const Eigen::VectorXd* v0 = nullptr);

void dense_newmark_march(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                         const Eigen::MatrixXd& A, const LoadFn& load, double t_final, int n_t,
                         const StepObserver& observer, NewmarkParams p = {},
                         const Eigen::VectorXd* u0 = nullptr, const Eigen::VectorXd* v0 = nullptr);

}  // namespace prrbc

#endif
