#include "epsvr/bayes.hpp"

#include "epsvr/errors.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace epsvr {

void EpsLssvrConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw InvalidArgumentError("epsilon must be a finite value >= 0");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgumentError("gamma must be a positive finite value");
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw InvalidArgumentError("sigma2 must be a positive finite value");
    }
    kernel.validate();
}

namespace {

Eigen::MatrixXd network_design(const Eigen::MatrixXd& omega) {
    const Eigen::Index n = omega.rows();
    Eigen::MatrixXd phi(n, n + 1);
    phi.col(0).setOnes();
    phi.rightCols(n) = omega;
    return phi;
}

}  // namespace

PriorSpec build_prior(const Dataset& ds, const EpsLssvrConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = ds.n();
    const KernelMatrix omega = gram(ds.inputs, cfg.kernel);
    const double ginv = 1.0 / cfg.gamma;

    Eigen::MatrixXd precision(n + 1, n + 1);
    precision(0, 0) = cfg.epsilon;
    precision.row(0).tail(n).setConstant(ginv);
    precision.col(0).tail(n).setConstant(ginv);
    precision.bottomRightCorner(n, n) =
        Eigen::MatrixXd::Constant(n, n, 1.0) + 2.0 * ginv * omega.values;
    precision.bottomRightCorner(n, n).diagonal().array() += ginv * ginv;

    Eigen::VectorXd shift(n + 1);
    shift[0] = 0.0;
    shift.tail(n) = ginv * ds.targets;
    return PriorSpec{std::move(precision), std::move(shift)};
}

Eigen::MatrixXd prior_precision_structural(const Dataset& ds,
                                           const EpsLssvrConfig& cfg) {
    cfg.validate();
    const KernelMatrix omega = gram(ds.inputs, cfg.kernel);
    const Eigen::MatrixXd psi = saddle_matrix(omega.values, cfg.gamma);
    const Eigen::MatrixXd phi = network_design(omega.values);
    Eigen::MatrixXd precision = psi.transpose() * psi - phi.transpose() * phi;
    precision(0, 0) += cfg.epsilon;
    return precision;
}

GaussianPosterior::GaussianPosterior(Eigen::VectorXd mean, Eigen::MatrixXd precision,
                                     Eigen::LLT<Eigen::MatrixXd> chol)
    : mean_(std::move(mean)),
      precision_(std::move(precision)),
      chol_(std::move(chol)),
      cov_mutex_(std::make_unique<std::mutex>()) {}

const Eigen::MatrixXd& GaussianPosterior::covariance() const {
    std::lock_guard lock(*cov_mutex_);
    if (!cov_) {
        const Eigen::Index n = precision_.rows();
        Eigen::MatrixXd cov = chol_.solve(Eigen::MatrixXd::Identity(n, n));
        cov = ((cov + cov.transpose()) / 2.0).eval();  // exact symmetry
        cov_ = std::move(cov);
    }
    return *cov_;
}

GaussianPosterior posterior(const Dataset& ds, const EpsLssvrConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = ds.n();
    const KernelMatrix omega = gram(ds.inputs, cfg.kernel);
    const Eigen::MatrixXd psi = saddle_matrix(omega.values, cfg.gamma);

    Eigen::MatrixXd lambda = psi.transpose() * psi;
    Eigen::VectorXd rhs(n + 1);
    if (cfg.sigma2 == 1.0) {
        Eigen::VectorXd zy(n + 1);
        zy[0] = 0.0;
        zy.tail(n) = ds.targets;
        rhs = psi.transpose() * zy;
    } else {
        // Non-unit noise scales the likelihood precision only; the prior
        // shift gamma^-1 (0, y) is unchanged.
        const Eigen::MatrixXd phi = network_design(omega.values);
        lambda += (1.0 / cfg.sigma2 - 1.0) * (phi.transpose() * phi);
        rhs = (phi.transpose() * ds.targets) / cfg.sigma2;
        rhs.tail(n) += ds.targets / cfg.gamma;
    }
    lambda(0, 0) += cfg.epsilon;

    Eigen::LLT<Eigen::MatrixXd> chol(lambda);
    if (chol.info() != Eigen::Success) {
        throw SingularSystemError("posterior precision is not positive definite",
                                  std::numeric_limits<double>::infinity());
    }
    Eigen::VectorXd mean = chol.solve(rhs);
    return GaussianPosterior(std::move(mean), std::move(lambda), std::move(chol));
}

Eigen::MatrixXd posterior_covariance_sm(const Dataset& ds,
                                        const EpsLssvrConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = ds.n();
    const KernelMatrix omega = gram(ds.inputs, cfg.kernel);
    const Eigen::MatrixXd psi = saddle_matrix(omega.values, cfg.gamma);

    Eigen::MatrixXd base = psi.transpose() * psi;
    if (cfg.sigma2 != 1.0) {
        const Eigen::MatrixXd phi = network_design(omega.values);
        base += (1.0 / cfg.sigma2 - 1.0) * (phi.transpose() * phi);
    }
    const Eigen::LLT<Eigen::MatrixXd> chol(base);
    if (chol.info() != Eigen::Success) {
        throw SingularSystemError("epsilon-free precision is not positive definite",
                                  std::numeric_limits<double>::infinity());
    }
    Eigen::MatrixXd inv = chol.solve(Eigen::MatrixXd::Identity(n + 1, n + 1));
    inv = ((inv + inv.transpose()) / 2.0).eval();
    if (cfg.epsilon == 0.0) {
        return inv;  // the rank-one update vanishes identically
    }
    const Eigen::VectorXd w = inv.col(0);
    const double q = inv(0, 0);
    const double scale = cfg.epsilon / (1.0 + cfg.epsilon * q);
    return inv - scale * (w * w.transpose());
}

Eigen::VectorXd map_estimate(const GaussianPosterior& post) {
    return post.mean();  // mean and mode coincide for a Gaussian
}

Eigen::VectorXd design_row(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                           const KernelConfig& cfg) {
    const Eigen::Index n = train_inputs.rows();
    if (x.size() != train_inputs.cols()) {
        throw InvalidArgumentError("design_row: input dimension mismatch");
    }
    Eigen::VectorXd phi(n + 1);
    phi[0] = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        phi[i + 1] = rbf(x, train_inputs.row(i).transpose(), cfg);
    }
    return phi;
}

Eigen::MatrixXd design_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                              const KernelConfig& cfg) {
    Eigen::MatrixXd phi(X.rows(), train_inputs.rows() + 1);
    phi.col(0).setOnes();
    phi.rightCols(train_inputs.rows()) = cross_gram(X, train_inputs, cfg);
    return phi;
}

PredictiveMoments predictive(const GaussianPosterior& post,
                             const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                             const KernelConfig& cfg) {
    const Eigen::Index n = train_inputs.rows();
    if (post.size() != n + 1) {
        throw InvalidArgumentError("predictive: posterior size does not match training set");
    }
    const Eigen::VectorXd phi = design_row(x, train_inputs, cfg);
    const Eigen::MatrixXd& cov = post.covariance();

    PredictiveMoments out;
    out.mean = phi.dot(post.mean());
    out.variance_full = phi.dot(cov * phi);
    const auto phi_alpha = phi.tail(n);
    out.variance_paper = phi_alpha.dot(cov.bottomRightCorner(n, n) * phi_alpha);
    return out;
}

PredictiveBatch predictive_batch(const GaussianPosterior& post,
                                 const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                                 const KernelConfig& cfg) {
    const Eigen::Index n = train_inputs.rows();
    if (post.size() != n + 1) {
        throw InvalidArgumentError("predictive: posterior size does not match training set");
    }
    const Eigen::MatrixXd phi = design_matrix(X, train_inputs, cfg);
    const Eigen::MatrixXd& cov = post.covariance();

    PredictiveBatch out;
    out.mean = phi * post.mean();
    out.variance_full = (phi * cov).cwiseProduct(phi).rowwise().sum();
    const auto k = phi.rightCols(n);
    out.variance_paper =
        (k * cov.bottomRightCorner(n, n)).cwiseProduct(k).rowwise().sum();
    return out;
}

}  // namespace epsvr
