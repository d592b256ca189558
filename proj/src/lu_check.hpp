#pragma once

#include "epsvr/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace epsvr::detail {

// Partial-pivot LU leaves rcond() meaningless when a pivot is exactly zero
// (the triangular solves inside the estimator overflow), so singularity is
// detected from the pivots first and the rcond estimate is consulted only
// for invertible factorizations.
inline void ensure_invertible(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                              const char* context) {
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double min_pivot = pivots.minCoeff();
    const double max_pivot = pivots.maxCoeff();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    if (min_pivot == 0.0 || !std::isfinite(max_pivot) ||
        min_pivot < max_pivot * std::numeric_limits<double>::denorm_min() / eps) {
        throw SingularSystemError(
            std::string(context) + ": matrix is exactly singular",
            std::numeric_limits<double>::infinity());
    }
    const double rc = lu.rcond();
    if (!(rc >= eps)) {
        throw SingularSystemError(
            std::string(context) + ": matrix is singular to working precision",
            rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    }
}

}  // namespace epsvr::detail
