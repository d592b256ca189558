#pragma once

#include "epsvr/bayes.hpp"
#include "epsvr/lssvr.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace epsvr {

// Per-epsilon comparison of the dual estimate theta_LS against the
// posterior mean mu*.
struct GapReport {
    double epsilon = 0.0;
    Eigen::VectorXd gap_closed_form;  // eps b_LS / (1 + eps q) * col_1((Psi^T Psi)^-1)
    Eigen::VectorXd gap_direct;       // theta_LS - mu*, two separate solves
    double gap_norm = 0.0;            // ||gap_direct||_2
    double arse = 0.0;                // mean |prediction difference| on the eval inputs
};

struct GapSweepReport {
    std::vector<double> exponents;   // -log10(eps) grid, ascending
    bool includes_zero = false;      // trailing eps = 0 record appended
    std::vector<GapReport> records;  // sorted by strictly decreasing eps
};

struct KktDiagnostics {
    double alpha_sum_abs = 0.0;      // |sum_i alpha_i|
    double stationarity_gap = 0.0;   // max_i |alpha_i - gamma (y_i - f(x_i))|
    double residual_norm = 0.0;      // ||Psi theta - (0, y)||_2
};

// Exact expression for theta_LS - mu*: with q = [(Psi^T Psi)^-1]_11 and
// b_LS the fitted bias, the gap equals
// (eps b_LS / (1 + eps q)) * first column of (Psi^T Psi)^-1. A single LU
// factorization of Psi provides every ingredient.
Eigen::VectorXd gap_closed_form(const Dataset& ds, const LssvrConfig& cfg,
                                double epsilon);

// theta_LS - mu* from two independent factorizations (LU saddle solve for
// theta_LS, SPD solve for mu*).
Eigen::VectorXd gap_direct(const Dataset& ds, const LssvrConfig& cfg,
                           double epsilon);

// Mean absolute difference (1/M) sum |a_i - b_i|. The historical name is a
// misnomer kept for traceability; the formula is exactly this.
double arse(const Eigen::Ref<const Eigen::VectorXd>& a,
            const Eigen::Ref<const Eigen::VectorXd>& b);

// 11 log-spaced points: -log10(eps) = 0, 0.5, ..., 5.
std::vector<double> default_sweep_exponents();

// Evaluates eps = 10^-t for every exponent t, producing one GapReport per
// point. The saddle factorization, theta_LS and the evaluation predictions
// are computed once and shared; only the rank-one epsilon term varies per
// record. eval_inputs defaults to the training inputs. include_zero appends
// a final eps = 0 record.
GapSweepReport sweep(const Dataset& ds, const LssvrConfig& cfg,
                     std::vector<double> exponents,
                     const std::optional<Eigen::MatrixXd>& eval_inputs = {},
                     bool include_zero = false);

// KKT residuals of a fitted model against its training targets.
KktDiagnostics kkt_check(const LssvrModel& model,
                         const Eigen::Ref<const Eigen::VectorXd>& targets);

}  // namespace epsvr
