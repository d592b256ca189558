#include "epsvr/equivalence.hpp"

#include "epsvr/errors.hpp"
#include "lu_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace epsvr {

namespace {

Eigen::VectorXd unit_first(Eigen::Index size) {
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(size);
    s1[0] = 1.0;
    return s1;
}

}  // namespace

Eigen::VectorXd gap_closed_form(const Dataset& ds, const LssvrConfig& cfg,
                                double epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw InvalidArgumentError("epsilon must be a finite value >= 0");
    }
    const SaddleSystem sys = build_system(ds, cfg);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.psi);
    detail::ensure_invertible(lu, "saddle system");
    const Eigen::VectorXd theta = lu.solve(sys.rhs);
    const double b_ls = theta[0];

    // w = (Psi^T Psi)^-1 s1 through two triangular solves of the one
    // factorization; q = w[0] is the leading entry of the inverse.
    const Eigen::VectorXd s1 = unit_first(sys.psi.rows());
    const Eigen::VectorXd w = lu.solve(lu.transpose().solve(s1));
    const double q = w[0];

    return (epsilon * b_ls / (1.0 + epsilon * q)) * w;
}

Eigen::VectorXd gap_direct(const Dataset& ds, const LssvrConfig& cfg,
                           double epsilon) {
    const Eigen::VectorXd theta_ls = fit(ds, cfg).theta();
    EpsLssvrConfig bayes_cfg;
    bayes_cfg.epsilon = epsilon;
    bayes_cfg.gamma = cfg.gamma;
    bayes_cfg.kernel = cfg.kernel;
    bayes_cfg.sigma2 = 1.0;
    return theta_ls - posterior(ds, bayes_cfg).mean();
}

double arse(const Eigen::Ref<const Eigen::VectorXd>& a,
            const Eigen::Ref<const Eigen::VectorXd>& b) {
    if (a.size() != b.size()) {
        throw InvalidArgumentError("arse: vectors have different lengths");
    }
    if (a.size() < 1) {
        throw InvalidArgumentError("arse: need at least one element");
    }
    return (a - b).cwiseAbs().mean();
}

std::vector<double> default_sweep_exponents() {
    std::vector<double> exps;
    for (int i = 0; i <= 10; ++i) {
        exps.push_back(0.5 * static_cast<double>(i));
    }
    return exps;
}

GapSweepReport sweep(const Dataset& ds, const LssvrConfig& cfg,
                     std::vector<double> exponents,
                     const std::optional<Eigen::MatrixXd>& eval_inputs,
                     bool include_zero) {
    if (exponents.empty()) {
        throw InvalidArgumentError("sweep: exponent grid is empty");
    }
    for (const double t : exponents) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw InvalidArgumentError("sweep: exponents must be finite and >= 0");
        }
    }
    std::sort(exponents.begin(), exponents.end());
    if (std::adjacent_find(exponents.begin(), exponents.end()) != exponents.end()) {
        throw InvalidArgumentError("sweep: duplicate exponent in grid");
    }

    const SaddleSystem sys = build_system(ds, cfg);
    const Eigen::Index m = sys.psi.rows();

    // LU route: theta_LS and the closed-form ingredients.
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.psi);
    detail::ensure_invertible(lu, "sweep saddle system");
    const Eigen::VectorXd theta_ls = lu.solve(sys.rhs);
    const Eigen::VectorXd s1 = unit_first(m);
    const Eigen::VectorXd w = lu.solve(lu.transpose().solve(s1));
    const double q = w[0];
    const double b_ls = theta_ls[0];

    // Cholesky route: posterior means via the rank-one update of the
    // epsilon-free solve, factored once.
    const Eigen::MatrixXd ptp = sys.psi.transpose() * sys.psi;
    const Eigen::LLT<Eigen::MatrixXd> chol(ptp);
    if (chol.info() != Eigen::Success) {
        throw SingularSystemError("sweep: normal matrix is not positive definite",
                                  std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd mu0 = chol.solve(sys.psi.transpose() * sys.rhs);
    const Eigen::VectorXd v = chol.solve(s1);
    const double q_chol = v[0];

    const Eigen::MatrixXd& eval = eval_inputs ? *eval_inputs : ds.inputs;
    if (eval.cols() != ds.dim()) {
        throw InvalidArgumentError("sweep: evaluation inputs have wrong dimension");
    }
    const Eigen::MatrixXd phi_eval = design_matrix(eval, ds.inputs, cfg.kernel);
    const Eigen::VectorXd pred_ls = phi_eval * theta_ls;

    GapSweepReport report;
    report.exponents = exponents;
    report.includes_zero = include_zero;
    report.records.reserve(exponents.size() + (include_zero ? 1 : 0));

    const auto make_record = [&](double eps) {
        GapReport rec;
        rec.epsilon = eps;
        rec.gap_closed_form = (eps * b_ls / (1.0 + eps * q)) * w;
        const Eigen::VectorXd mu = mu0 - (eps * mu0[0] / (1.0 + eps * q_chol)) * v;
        rec.gap_direct = theta_ls - mu;
        rec.gap_norm = rec.gap_direct.norm();
        rec.arse = arse(phi_eval * mu, pred_ls);
        return rec;
    };

    for (const double t : exponents) {
        report.records.push_back(make_record(std::pow(10.0, -t)));
    }
    if (include_zero) {
        report.records.push_back(make_record(0.0));
    }
    return report;
}

KktDiagnostics kkt_check(const LssvrModel& model,
                         const Eigen::Ref<const Eigen::VectorXd>& targets) {
    if (targets.size() != model.alpha.size()) {
        throw InvalidArgumentError("kkt_check: target length does not match the model");
    }
    const Eigen::VectorXd fitted = predict_batch(model, model.train_inputs);
    const Eigen::VectorXd errors = targets - fitted;

    KktDiagnostics diag;
    diag.alpha_sum_abs = std::abs(model.alpha.sum());
    diag.stationarity_gap =
        (model.alpha - model.config.gamma * errors).cwiseAbs().maxCoeff();

    const KernelMatrix omega = gram(model.train_inputs, model.config.kernel);
    const Eigen::MatrixXd psi = saddle_matrix(omega.values, model.config.gamma);
    Eigen::VectorXd rhs(targets.size() + 1);
    rhs[0] = 0.0;
    rhs.tail(targets.size()) = targets;
    diag.residual_norm = (psi * model.theta() - rhs).norm();
    return diag;
}

}  // namespace epsvr
