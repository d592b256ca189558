#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace epsvr {

// Regression training corpus: N x D inputs plus N targets. Invariants
// (finite values, matching row counts, N >= 1, D >= 1) are checked at
// construction.
struct Dataset {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
    std::vector<std::string> feature_names;  // empty or one name per column

    Dataset(Eigen::MatrixXd inputs_, Eigen::VectorXd targets_,
            std::vector<std::string> feature_names_ = {});

    Eigen::Index n() const { return inputs.rows(); }
    Eigen::Index dim() const { return inputs.cols(); }
};

// Target column selected by header name or 0-based index.
using TargetColumn = std::variant<std::string, Eigen::Index>;

// Parses a comma-separated file of finite decimal floats (optional single
// header row, no quoting). All columns are returned; used by load_csv and
// by prediction inputs that carry no target column.
Eigen::MatrixXd load_csv_matrix(const std::filesystem::path& path,
                                bool has_header,
                                std::vector<std::string>* header_out = nullptr);

// Loads a dataset, extracting the target column; remaining columns become
// inputs with row order preserved. Missing values are an error.
Dataset load_csv(const std::filesystem::path& path, const TargetColumn& target,
                 bool has_header = true);

enum class ConstantFeaturePolicy { Reject, PassThrough };

struct StandardizationParams {
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_std;  // entries > 0 (constant features recorded as 1)
    std::optional<double> target_mean;
    std::optional<double> target_std;

    Eigen::MatrixXd apply_inputs(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
    Eigen::MatrixXd invert_inputs(const Eigen::Ref<const Eigen::MatrixXd>& Z) const;
    Eigen::VectorXd apply_targets(const Eigen::Ref<const Eigen::VectorXd>& y) const;
    Eigen::VectorXd invert_targets(const Eigen::Ref<const Eigen::VectorXd>& z) const;
};

// Z-scores ds per feature using statistics fitted on fit_on (sample standard
// deviation, N-1 denominator). fit_on must have at least 2 rows.
std::pair<Dataset, StandardizationParams> standardize(
    const Dataset& ds, const Dataset& fit_on,
    ConstantFeaturePolicy policy = ConstantFeaturePolicy::PassThrough,
    bool with_targets = false);

std::pair<Dataset, StandardizationParams> standardize(
    const Dataset& ds,
    ConstantFeaturePolicy policy = ConstantFeaturePolicy::PassThrough,
    bool with_targets = false);

// Normalized sinc, sin(pi x) / (pi x), with value 1 at x = 0.
double sinc(double x);

// n inputs drawn uniformly from [lo, hi) by a seeded deterministic generator,
// targets given by the normalized sinc. Same seed reproduces bit-identical
// draws.
Dataset gen_sinc(Eigen::Index n, double lo, double hi, std::uint64_t seed);

// m equally spaced points in [lo, hi] inclusive of both endpoints, as an
// m x 1 input matrix. m >= 2.
Eigen::MatrixXd grid(double lo, double hi, Eigen::Index m);

}  // namespace epsvr
