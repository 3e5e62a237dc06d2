#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace vdiff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double>;

/// Element of W = R^m with the componentwise order.
using LatticeVector = Vec;

/// Raised when a linear solve cannot proceed (singular step matrix, failed
/// factorization). Carries the smallest pivot magnitude seen.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double smallest_pivot)
        : std::runtime_error(what), smallest_pivot_(smallest_pivot) {}

    double smallest_pivot() const noexcept { return smallest_pivot_; }

private:
    double smallest_pivot_;
};

}  // namespace vdiff
