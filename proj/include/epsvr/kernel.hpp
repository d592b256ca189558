#pragma once

#include <Eigen/Dense>

namespace epsvr {

// RBF width parameter. The kernel uses c^2 internally, so both the c and
// the c^2 parameterizations found in the literature are expressible.
struct KernelConfig {
    double c = 1.0;

    double c_squared() const { return c * c; }
    void validate() const;  // throws InvalidArgumentError unless c > 0
};

// Symmetric N x N Gram matrix with unit diagonal, entries in (0, 1].
struct KernelMatrix {
    Eigen::MatrixXd values;
};

// k(x, z) = exp(-c^2 ||x - z||^2). Always in (0, 1].
double rbf(const Eigen::Ref<const Eigen::VectorXd>& x,
           const Eigen::Ref<const Eigen::VectorXd>& z,
           const KernelConfig& cfg);

// Pairwise kernel matrix over the rows of X. Only the upper triangle is
// evaluated and mirrored, so the result is exactly symmetric; the diagonal
// is exactly 1.
KernelMatrix gram(const Eigen::Ref<const Eigen::MatrixXd>& X,
                  const KernelConfig& cfg);

// M x N matrix with entry (m, i) = k(Xtest.row(m), Xtrain.row(i)).
Eigen::MatrixXd cross_gram(const Eigen::Ref<const Eigen::MatrixXd>& Xtest,
                           const Eigen::Ref<const Eigen::MatrixXd>& Xtrain,
                           const KernelConfig& cfg);

}  // namespace epsvr
