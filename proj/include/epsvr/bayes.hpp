#pragma once

#include "epsvr/lssvr.hpp"

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <optional>

namespace epsvr {

// Bayesian RBF network over the dual parameters (b, alpha), using all N
// training points as centers. epsilon is the precision of the Gaussian
// prior on the bias; epsilon = 0 is the improper flat-bias limit and is
// fully supported because nothing here ever inverts the prior precision.
//
// sigma2 is the observation-noise variance. The value 1 reproduces the
// conjugate posterior whose precision is Psi^T Psi + eps s1 s1^T; other
// values scale the likelihood precision to sigma^-2 Phi^T Phi and are an
// extension beyond that identity.
struct EpsLssvrConfig {
    double epsilon = 1e-4;  // >= 0
    double gamma = 1.0;     // > 0
    KernelConfig kernel;
    double sigma2 = 1.0;    // > 0

    void validate() const;
    LssvrConfig lssvr_config() const { return {gamma, kernel}; }
};

// Natural-parameter form of the prior: the (N+1) x (N+1) precision matrix
//
//   [[eps,          gamma^-1 1^T                      ],
//    [gamma^-1 1,   1 1^T + 2 gamma^-1 Omega + gamma^-2 I]]
//
// and the shift vector gamma^-1 (0, y) = precision * mean. The precision
// may be indefinite for small eps (an improper prior); downstream code
// works entirely in natural parameters, where the posterior precision is
// SPD whenever the saddle matrix is invertible.
struct PriorSpec {
    Eigen::MatrixXd precision;
    Eigen::VectorXd shift;
};

// Gaussian posterior over (b, alpha). Immutable after construction; the
// covariance is materialized lazily on first request (a mean-only workflow
// costs a single SPD solve) and cached thread-safely afterwards.
class GaussianPosterior {
public:
    GaussianPosterior(Eigen::VectorXd mean, Eigen::MatrixXd precision,
                      Eigen::LLT<Eigen::MatrixXd> chol);

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& precision() const { return precision_; }
    // Sigma* = precision^-1, symmetrized. Computed once, then cached.
    const Eigen::MatrixXd& covariance() const;

    Eigen::Index size() const { return mean_.size(); }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd precision_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    mutable std::unique_ptr<std::mutex> cov_mutex_;
    mutable std::optional<Eigen::MatrixXd> cov_;
};

struct PredictiveMoments {
    double mean = 0.0;
    double variance_full = 0.0;   // phi^T Sigma* phi, the full quadratic form
    double variance_paper = 0.0;  // alpha-block form only, ignores bias rows/columns
};

struct PredictiveBatch {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance_full;
    Eigen::VectorXd variance_paper;
};

// Explicit block assembly of the prior above.
PriorSpec build_prior(const Dataset& ds, const EpsLssvrConfig& cfg);

// Same precision assembled through the structural identity
// Psi^T Psi + eps s1 s1^T - Phi^T Phi; kept as a second code path so the
// two assemblies can be checked against each other.
Eigen::MatrixXd prior_precision_structural(const Dataset& ds,
                                           const EpsLssvrConfig& cfg);

// Conjugate posterior. The precision Psi^T Psi + eps s1 s1^T is factored
// with a Cholesky decomposition and the mean solves
// precision * mean = Psi^T (0, y). Throws SingularSystemError when the
// factorization fails.
GaussianPosterior posterior(const Dataset& ds, const EpsLssvrConfig& cfg);

// Posterior covariance through the rank-one update route:
//
//   Sigma* = B - eps / (1 + eps q) * B s1 s1^T B,   B = (Psi^T Psi)^-1,
//   q = B(0, 0).
//
// Independent of the direct inversion in GaussianPosterior::covariance();
// exists for cross-validation of the two paths. At eps = 0 it returns B
// exactly.
Eigen::MatrixXd posterior_covariance_sm(const Dataset& ds,
                                        const EpsLssvrConfig& cfg);

// The posterior mode; identical to the mean for a Gaussian.
Eigen::VectorXd map_estimate(const GaussianPosterior& post);

// phi(x) = (1, k(x, x_1), ..., k(x, x_N))
Eigen::VectorXd design_row(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                           const KernelConfig& cfg);

// [1 K] with K the cross-Gram matrix of X against the training inputs.
Eigen::MatrixXd design_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                              const KernelConfig& cfg);

// Predictive mean phi^T mu* and both variance conventions:
// variance_full = phi^T Sigma* phi (default for credible intervals) and
// variance_paper = k^T Sigma*_aa k over the alpha block only.
PredictiveMoments predictive(const GaussianPosterior& post,
                             const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                             const KernelConfig& cfg);

PredictiveBatch predictive_batch(const GaussianPosterior& post,
                                 const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::MatrixXd>& train_inputs,
                                 const KernelConfig& cfg);

}  // namespace epsvr
