#pragma once

#include "epsvr/data.hpp"
#include "epsvr/kernel.hpp"

#include <Eigen/Dense>

namespace epsvr {

struct LssvrConfig {
    double gamma = 1.0;  // regularization parameter, > 0
    KernelConfig kernel;

    void validate() const;
};

// Bordered KKT matrix [[0, 1^T], [1, Omega + gamma^-1 I]] with right-hand
// side (0, y).
struct SaddleSystem {
    Eigen::MatrixXd psi;  // (N+1) x (N+1)
    Eigen::VectorXd rhs;  // (N+1)
};

// Fitted dual parameters (b, alpha) plus the retained training inputs.
struct LssvrModel {
    double b = 0.0;
    Eigen::VectorXd alpha;
    Eigen::MatrixXd train_inputs;
    LssvrConfig config;

    // Stacked parameter vector (b, alpha).
    Eigen::VectorXd theta() const;
};

// (N+1) x (N+1) saddle matrix for a given Gram matrix.
Eigen::MatrixXd saddle_matrix(const Eigen::Ref<const Eigen::MatrixXd>& omega,
                              double gamma);

SaddleSystem build_system(const Dataset& ds, const LssvrConfig& cfg);

// Solves the saddle system with a pivoted LU factorization. Throws
// SingularSystemError (with a condition estimate) if the system is singular
// to working precision; the inverse is never formed explicitly.
LssvrModel fit(const Dataset& ds, const LssvrConfig& cfg);

// f(x) = sum_i alpha_i k(x, x_i) + b
double predict(const LssvrModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);

// Row-wise prediction over an M x D matrix of inputs.
Eigen::VectorXd predict_batch(const LssvrModel& m,
                              const Eigen::Ref<const Eigen::MatrixXd>& X);

// Minimum-norm least-squares fit of [1 Omega] (b, alpha) = y. The design
// matrix is N x (N+1), so its normal equations are always singular; the
// pseudoinverse solution is the unique well-posed reading. gamma plays no
// role here but is retained in the returned model's config.
LssvrModel fit_rbf_ls(const Dataset& ds, const LssvrConfig& cfg);

}  // namespace epsvr
