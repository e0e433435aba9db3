#pragma once

#include <Eigen/Dense>

namespace ipdyn {

struct SymPinv {
  Eigen::MatrixXd inverse;
  Eigen::Index rank = 0;
};

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix via eigendecomposition,
// dropping eigenvalues below rel_tol * (largest eigenvalue).
inline SymPinv sym_pinv(const Eigen::MatrixXd& m, double rel_tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double largest = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double tol = rel_tol * largest;
  SymPinv out;
  Eigen::VectorXd inv_ev = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > tol) {
      inv_ev[i] = 1.0 / ev[i];
      ++out.rank;
    }
  }
  out.inverse = es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();
  return out;
}

}  // namespace ipdyn
