#include "epsvr/lssvr.hpp"

#include "epsvr/errors.hpp"
#include "lu_check.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace epsvr {

void LssvrConfig::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgumentError("gamma must be a positive finite value");
    }
    kernel.validate();
}

Eigen::VectorXd LssvrModel::theta() const {
    Eigen::VectorXd t(alpha.size() + 1);
    t[0] = b;
    t.tail(alpha.size()) = alpha;
    return t;
}

Eigen::MatrixXd saddle_matrix(const Eigen::Ref<const Eigen::MatrixXd>& omega,
                              double gamma) {
    const Eigen::Index n = omega.rows();
    Eigen::MatrixXd psi(n + 1, n + 1);
    psi(0, 0) = 0.0;
    psi.row(0).tail(n).setOnes();
    psi.col(0).tail(n).setOnes();
    psi.bottomRightCorner(n, n) = omega;
    psi.bottomRightCorner(n, n).diagonal().array() += 1.0 / gamma;
    return psi;
}

SaddleSystem build_system(const Dataset& ds, const LssvrConfig& cfg) {
    cfg.validate();
    const KernelMatrix omega = gram(ds.inputs, cfg.kernel);
    Eigen::VectorXd rhs(ds.n() + 1);
    rhs[0] = 0.0;
    rhs.tail(ds.n()) = ds.targets;
    return SaddleSystem{saddle_matrix(omega.values, cfg.gamma), std::move(rhs)};
}

LssvrModel fit(const Dataset& ds, const LssvrConfig& cfg) {
    const SaddleSystem sys = build_system(ds, cfg);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.psi);
    detail::ensure_invertible(lu, "saddle system");
    const Eigen::VectorXd theta = lu.solve(sys.rhs);
    LssvrModel model;
    model.b = theta[0];
    model.alpha = theta.tail(ds.n());
    model.train_inputs = ds.inputs;
    model.config = cfg;
    return model;
}

double predict(const LssvrModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != m.train_inputs.cols()) {
        throw InvalidArgumentError("predict: input dimension does not match the model");
    }
    double acc = m.b;
    for (Eigen::Index i = 0; i < m.train_inputs.rows(); ++i) {
        acc += m.alpha[i] * rbf(x, m.train_inputs.row(i).transpose(), m.config.kernel);
    }
    return acc;
}

Eigen::VectorXd predict_batch(const LssvrModel& m,
                              const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const Eigen::MatrixXd k = cross_gram(X, m.train_inputs, m.config.kernel);
    return (k * m.alpha).array() + m.b;
}

LssvrModel fit_rbf_ls(const Dataset& ds, const LssvrConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = ds.n();
    const KernelMatrix omega = gram(ds.inputs, cfg.kernel);
    Eigen::MatrixXd psi(n, n + 1);
    psi.col(0).setOnes();
    psi.rightCols(n) = omega.values;

    // Rank-revealing factorization yields the minimum-norm least-squares
    // solution; the normal-equations form of the same problem is singular by
    // construction (N x (N+1) design).
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(psi);
    const Eigen::VectorXd theta = cod.solve(ds.targets);

    LssvrModel model;
    model.b = theta[0];
    model.alpha = theta.tail(n);
    model.train_inputs = ds.inputs;
    model.config = cfg;
    return model;
}

}  // namespace epsvr
