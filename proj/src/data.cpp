#include "epsvr/data.hpp"

#include "epsvr/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace epsvr {

Dataset::Dataset(Eigen::MatrixXd inputs_, Eigen::VectorXd targets_,
                 std::vector<std::string> feature_names_)
    : inputs(std::move(inputs_)),
      targets(std::move(targets_)),
      feature_names(std::move(feature_names_)) {
    if (inputs.rows() < 1 || inputs.cols() < 1) {
        throw InvalidArgumentError("dataset: need N >= 1 rows and D >= 1 features");
    }
    if (inputs.rows() != targets.size()) {
        throw InvalidArgumentError("dataset: input row count does not match target length");
    }
    if (!inputs.allFinite() || !targets.allFinite()) {
        throw InvalidArgumentError("dataset: non-finite value in inputs or targets");
    }
    if (!feature_names.empty() &&
        static_cast<Eigen::Index>(feature_names.size()) != inputs.cols()) {
        throw InvalidArgumentError("dataset: feature name count does not match D");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
    const auto location = [&] {
        std::ostringstream os;
        os << "row " << row << ", column " << col + 1;
        return os.str();
    };
    if (cell.empty()) {
        throw IoError("csv: missing value at " + location());
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw IoError("csv: cell '" + std::string(cell) + "' at " + location() +
                      " is not a decimal number");
    }
    if (!std::isfinite(value)) {
        throw IoError("csv: non-finite value at " + location());
    }
    return value;
}

}  // namespace

Eigen::MatrixXd load_csv_matrix(const std::filesystem::path& path, bool has_header,
                                std::vector<std::string>* header_out) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t n_cols = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_commas(line);
        if (line_no == 1 && has_header) {
            if (header_out != nullptr) {
                header_out->clear();
                for (const auto& c : cells) {
                    header_out->emplace_back(c);
                }
            }
            n_cols = cells.size();
            continue;
        }
        if (n_cols == 0) {
            n_cols = cells.size();
        } else if (cells.size() != n_cols) {
            std::ostringstream os;
            os << "csv: row " << line_no << " has " << cells.size()
               << " cells, expected " << n_cols;
            throw IoError(os.str());
        }
        std::vector<double> parsed(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            parsed[c] = parse_cell(cells[c], line_no, c);
        }
        rows.push_back(std::move(parsed));
    }
    if (in.bad()) {
        throw IoError("read failure on '" + path.string() + "'");
    }
    if (rows.empty()) {
        throw IoError("csv: '" + path.string() + "' contains no data rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(n_cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

Dataset load_csv(const std::filesystem::path& path, const TargetColumn& target,
                 bool has_header) {
    std::vector<std::string> header;
    const Eigen::MatrixXd all = load_csv_matrix(path, has_header, &header);
    const Eigen::Index n_cols = all.cols();

    Eigen::Index target_idx = -1;
    if (std::holds_alternative<std::string>(target)) {
        const auto& name = std::get<std::string>(target);
        if (!has_header) {
            throw InvalidArgumentError("target column '" + name +
                                       "' requested by name but file has no header");
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                target_idx = static_cast<Eigen::Index>(i);
                break;
            }
        }
        if (target_idx < 0) {
            throw InvalidArgumentError("target column '" + name + "' not found in header");
        }
    } else {
        target_idx = std::get<Eigen::Index>(target);
        if (target_idx < 0 || target_idx >= n_cols) {
            std::ostringstream os;
            os << "target column index " << target_idx << " out of range [0, "
               << n_cols - 1 << "]";
            throw InvalidArgumentError(os.str());
        }
    }
    if (n_cols < 2) {
        throw InvalidArgumentError("csv: need at least one feature column besides the target");
    }

    Eigen::MatrixXd inputs(all.rows(), n_cols - 1);
    std::vector<std::string> names;
    Eigen::Index out = 0;
    for (Eigen::Index c = 0; c < n_cols; ++c) {
        if (c == target_idx) {
            continue;
        }
        inputs.col(out) = all.col(c);
        if (!header.empty()) {
            names.push_back(header[static_cast<std::size_t>(c)]);
        }
        ++out;
    }
    return Dataset(std::move(inputs), all.col(target_idx), std::move(names));
}

Eigen::MatrixXd StandardizationParams::apply_inputs(
    const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (X.cols() != feature_mean.size()) {
        throw InvalidArgumentError("standardize: dimension mismatch");
    }
    return (X.rowwise() - feature_mean.transpose()).array().rowwise() /
           feature_std.transpose().array();
}

Eigen::MatrixXd StandardizationParams::invert_inputs(
    const Eigen::Ref<const Eigen::MatrixXd>& Z) const {
    if (Z.cols() != feature_mean.size()) {
        throw InvalidArgumentError("standardize: dimension mismatch");
    }
    return (Z.array().rowwise() * feature_std.transpose().array()).matrix().rowwise() +
           feature_mean.transpose();
}

Eigen::VectorXd StandardizationParams::apply_targets(
    const Eigen::Ref<const Eigen::VectorXd>& y) const {
    if (!target_mean || !target_std) {
        throw InvalidArgumentError("standardize: no target statistics recorded");
    }
    return (y.array() - *target_mean) / *target_std;
}

Eigen::VectorXd StandardizationParams::invert_targets(
    const Eigen::Ref<const Eigen::VectorXd>& z) const {
    if (!target_mean || !target_std) {
        throw InvalidArgumentError("standardize: no target statistics recorded");
    }
    return z.array() * *target_std + *target_mean;
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& ds,
                                                      const Dataset& fit_on,
                                                      ConstantFeaturePolicy policy,
                                                      bool with_targets) {
    if (fit_on.n() < 2) {
        throw InvalidArgumentError("standardize: need at least 2 rows to fit statistics");
    }
    if (ds.dim() != fit_on.dim()) {
        throw InvalidArgumentError("standardize: dimension mismatch between datasets");
    }
    const Eigen::Index d = fit_on.dim();
    const double denom = static_cast<double>(fit_on.n() - 1);

    StandardizationParams params;
    params.feature_mean = fit_on.inputs.colwise().mean();
    params.feature_std = Eigen::VectorXd(d);
    for (Eigen::Index c = 0; c < d; ++c) {
        const double var =
            (fit_on.inputs.col(c).array() - params.feature_mean[c]).square().sum() / denom;
        const double sd = std::sqrt(var);
        if (sd > 0.0) {
            params.feature_std[c] = sd;
        } else if (policy == ConstantFeaturePolicy::Reject) {
            std::ostringstream os;
            os << "standardize: feature " << c << " is constant";
            throw InvalidArgumentError(os.str());
        } else {
            params.feature_std[c] = 1.0;  // pass constant features through unchanged
        }
    }

    Eigen::VectorXd targets = ds.targets;
    if (with_targets) {
        const double mean = fit_on.targets.mean();
        const double var = (fit_on.targets.array() - mean).square().sum() / denom;
        const double sd = std::sqrt(var);
        params.target_mean = mean;
        params.target_std = sd > 0.0 ? sd : 1.0;
        targets = params.apply_targets(ds.targets);
    }

    return {Dataset(params.apply_inputs(ds.inputs), std::move(targets), ds.feature_names),
            std::move(params)};
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& ds,
                                                      ConstantFeaturePolicy policy,
                                                      bool with_targets) {
    return standardize(ds, ds, policy, with_targets);
}

double sinc(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

namespace {

// mt19937_64 output mapped to [0, 1) with full 53-bit resolution; avoids
// the implementation-defined std::uniform_real_distribution.
double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

Dataset gen_sinc(Eigen::Index n, double lo, double hi, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidArgumentError("gen_sinc: need n >= 1");
    }
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidArgumentError("gen_sinc: need finite lo < hi");
    }
    std::mt19937_64 eng(seed);
    Eigen::MatrixXd inputs(n, 1);
    Eigen::VectorXd targets(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * uniform01(eng);
        inputs(i, 0) = x;
        targets[i] = sinc(x);
    }
    return Dataset(std::move(inputs), std::move(targets), {"x"});
}

Eigen::MatrixXd grid(double lo, double hi, Eigen::Index m) {
    if (m < 2) {
        throw InvalidArgumentError("grid: need m >= 2 points");
    }
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidArgumentError("grid: need finite lo < hi");
    }
    Eigen::MatrixXd points(m, 1);
    const double step = (hi - lo) / static_cast<double>(m - 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        points(i, 0) = lo + static_cast<double>(i) * step;
    }
    points(m - 1, 0) = hi;  // endpoint exact regardless of rounding
    return points;
}

}  // namespace epsvr
