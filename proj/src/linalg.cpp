#include "rfflow/linalg.hpp"

#include <complex>
#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace rfflow {

void eigh_inplace(Eigen::MatrixXd& A, Eigen::VectorXd& evals) {
    const auto n = lapack_int(A.rows());
    if (A.rows() != A.cols()) throw LinalgError("eigh: matrix not square");
    evals.resize(n);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(), n, evals.data());
    if (info != 0) throw LinalgError("dsyevd failed, info=" + std::to_string(info));
}

Eigen::VectorXd eigvalsh_inplace(Eigen::MatrixXd& A) {
    const auto n = lapack_int(A.rows());
    if (A.rows() != A.cols()) throw LinalgError("eigvalsh: matrix not square");
    Eigen::VectorXd evals(n);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, A.data(), n, evals.data());
    if (info != 0) throw LinalgError("dsyevd(N) failed, info=" + std::to_string(info));
    return evals;
}

ComplexLu::ComplexLu(Eigen::MatrixXcd A) : lu_(std::move(A)), ipiv_(lu_.rows()) {
    const auto n = lapack_int(lu_.rows());
    if (lu_.rows() != lu_.cols()) throw LinalgError("lu: matrix not square");
    lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n,
                                     reinterpret_cast<lapack_complex_double*>(lu_.data()), n,
                                     ipiv_.data());
    if (info != 0) throw LinalgError("zgetrf failed, info=" + std::to_string(info));
}

void ComplexLu::solve_inplace(Eigen::MatrixXcd& B) const {
    const auto n = lapack_int(lu_.rows());
    if (B.rows() != lu_.rows()) throw LinalgError("lu solve: dimension mismatch");
    lapack_int info = LAPACKE_zgetrs(
        LAPACK_COL_MAJOR, 'N', n, lapack_int(B.cols()),
        reinterpret_cast<const lapack_complex_double*>(lu_.data()), n, ipiv_.data(),
        reinterpret_cast<lapack_complex_double*>(B.data()), n);
    if (info != 0) throw LinalgError("zgetrs failed, info=" + std::to_string(info));
}

}  // namespace rfflow
