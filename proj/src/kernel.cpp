#include "epsvr/kernel.hpp"

#include "epsvr/errors.hpp"

#include <cmath>
#include <utility>

namespace epsvr {

void KernelConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidArgumentError("kernel width c must be a positive finite value");
    }
}

namespace {

// Direct summation; the norm-expansion form cancels catastrophically at
// small distances.
double squared_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& z) {
    double sq = 0.0;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        const double diff = x[d] - z[d];
        sq += diff * diff;
    }
    return sq;
}

double squared_distance_rows(const Eigen::Ref<const Eigen::MatrixXd>& a, Eigen::Index i,
                             const Eigen::Ref<const Eigen::MatrixXd>& b, Eigen::Index j) {
    double sq = 0.0;
    for (Eigen::Index d = 0; d < a.cols(); ++d) {
        const double diff = a(i, d) - b(j, d);
        sq += diff * diff;
    }
    return sq;
}

}  // namespace

double rbf(const Eigen::Ref<const Eigen::VectorXd>& x,
           const Eigen::Ref<const Eigen::VectorXd>& z,
           const KernelConfig& cfg) {
    cfg.validate();
    if (x.size() != z.size()) {
        throw InvalidArgumentError("rbf: inputs have different dimensions");
    }
    if (x.size() < 1) {
        throw InvalidArgumentError("rbf: inputs must have dimension >= 1");
    }
    return std::exp(-cfg.c_squared() * squared_distance(x, z));
}

KernelMatrix gram(const Eigen::Ref<const Eigen::MatrixXd>& X,
                  const KernelConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = X.rows();
    if (n < 1 || X.cols() < 1) {
        throw InvalidArgumentError("gram: need at least one point of dimension >= 1");
    }
    Eigen::MatrixXd omega(n, n);
    const double c2 = cfg.c_squared();
    for (Eigen::Index i = 0; i < n; ++i) {
        omega(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double k = std::exp(-c2 * squared_distance_rows(X, i, X, j));
            omega(i, j) = k;
            omega(j, i) = k;
        }
    }
    return KernelMatrix{std::move(omega)};
}

Eigen::MatrixXd cross_gram(const Eigen::Ref<const Eigen::MatrixXd>& Xtest,
                           const Eigen::Ref<const Eigen::MatrixXd>& Xtrain,
                           const KernelConfig& cfg) {
    cfg.validate();
    if (Xtest.cols() != Xtrain.cols()) {
        throw InvalidArgumentError("cross_gram: test and train dimensions differ");
    }
    if (Xtest.rows() < 1 || Xtrain.rows() < 1 || Xtrain.cols() < 1) {
        throw InvalidArgumentError("cross_gram: need nonempty point sets");
    }
    Eigen::MatrixXd k(Xtest.rows(), Xtrain.rows());
    const double c2 = cfg.c_squared();
    for (Eigen::Index m = 0; m < Xtest.rows(); ++m) {
        for (Eigen::Index i = 0; i < Xtrain.rows(); ++i) {
            k(m, i) = std::exp(-c2 * squared_distance_rows(Xtest, m, Xtrain, i));
        }
    }
    return k;
}

}  // namespace epsvr
