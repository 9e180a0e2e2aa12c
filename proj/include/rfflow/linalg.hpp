#pragma once
#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace rfflow {

struct LinalgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symmetric eigendecomposition: A is replaced by its eigenvector matrix
// (columns), evals receives the ascending eigenvalues.  LAPACK dsyevd.
void eigh_inplace(Eigen::MatrixXd& A, Eigen::VectorXd& evals);

// Eigenvalues only (destroys A).
Eigen::VectorXd eigvalsh_inplace(Eigen::MatrixXd& A);

// Dense complex LU with reusable factors (LAPACK zgetrf / zgetrs).
class ComplexLu {
  public:
    explicit ComplexLu(Eigen::MatrixXcd A);  // takes ownership, factorizes
    void solve_inplace(Eigen::MatrixXcd& B) const;

  private:
    Eigen::MatrixXcd lu_;
    std::vector<int> ipiv_;
};

}  // namespace rfflow
