#pragma once

#include "epsvr/bayes.hpp"
#include "epsvr/equivalence.hpp"
#include "epsvr/lssvr.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace epsvr {

// {"gamma", "c", "b", "alpha", "train_inputs"}; doubles are stored natively
// so a parse of the dump restores every value exactly.
nlohmann::json model_to_json(const LssvrModel& model);
LssvrModel model_from_json(const nlohmann::json& j);

// Posterior file contents. covariance and train_inputs are optional in the
// schema; both are required to form predictions from the file alone.
struct PosteriorRecord {
    EpsLssvrConfig config;
    Eigen::VectorXd mean;
    std::optional<Eigen::MatrixXd> covariance;
    std::optional<Eigen::MatrixXd> train_inputs;
};

nlohmann::json posterior_to_json(const PosteriorRecord& rec);
PosteriorRecord posterior_from_json(const nlohmann::json& j);

// CSV with header neg_log10_eps,gap_norm,arse, one row per record,
// 17-significant-digit floats.
std::string sweep_to_csv(const GapSweepReport& report);

// Full report: grid specification plus every GapReport including the gap
// vectors.
nlohmann::json sweep_to_json(const GapSweepReport& report);

// %.17g rendering used by every CSV writer.
std::string format_g17(double v);

// Writes to <path>.tmp then renames, so readers never observe a partial
// file. Throws IoError on failure.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string read_text(const std::filesystem::path& path);

}  // namespace epsvr
