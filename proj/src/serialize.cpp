#include "epsvr/serialize.hpp"

#include "epsvr/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace epsvr {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        rows[static_cast<std::size_t>(r)].assign(m.row(r).begin(), m.row(r).end());
    }
    return rows;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array()) {
        throw IoError(std::string("json: '") + field + "' must be an array");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& x : j) {
        if (!x.is_number()) {
            throw IoError(std::string("json: '") + field + "' must contain numbers");
        }
        v[i++] = x.get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.empty()) {
        throw IoError(std::string("json: '") + field + "' must be a nonempty array of rows");
    }
    const auto cols = j.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()),
                      static_cast<Eigen::Index>(cols));
    Eigen::Index r = 0;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols) {
            throw IoError(std::string("json: ragged rows in '") + field + "'");
        }
        Eigen::Index c = 0;
        for (const auto& x : row) {
            if (!x.is_number()) {
                throw IoError(std::string("json: '") + field + "' must contain numbers");
            }
            m(r, c++) = x.get<double>();
        }
        ++r;
    }
    return m;
}

const nlohmann::json& require(const nlohmann::json& j, const char* field) {
    const auto it = j.find(field);
    if (it == j.end()) {
        throw IoError(std::string("json: missing field '") + field + "'");
    }
    return *it;
}

double require_number(const nlohmann::json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_number()) {
        throw IoError(std::string("json: field '") + field + "' must be a number");
    }
    return v.get<double>();
}

}  // namespace

nlohmann::json model_to_json(const LssvrModel& model) {
    nlohmann::json j;
    j["gamma"] = model.config.gamma;
    j["c"] = model.config.kernel.c;
    j["b"] = model.b;
    j["alpha"] = to_vector(model.alpha);
    j["train_inputs"] = to_rows(model.train_inputs);
    return j;
}

LssvrModel model_from_json(const nlohmann::json& j) {
    LssvrModel model;
    model.config.gamma = require_number(j, "gamma");
    model.config.kernel.c = require_number(j, "c");
    model.b = require_number(j, "b");
    model.alpha = vector_from_json(require(j, "alpha"), "alpha");
    model.train_inputs = matrix_from_json(require(j, "train_inputs"), "train_inputs");
    if (model.train_inputs.rows() != model.alpha.size()) {
        throw IoError("json: alpha length does not match train_inputs rows");
    }
    model.config.validate();
    return model;
}

nlohmann::json posterior_to_json(const PosteriorRecord& rec) {
    nlohmann::json j;
    j["epsilon"] = rec.config.epsilon;
    j["gamma"] = rec.config.gamma;
    j["c"] = rec.config.kernel.c;
    j["sigma2"] = rec.config.sigma2;
    j["mean"] = to_vector(rec.mean);
    if (rec.covariance) {
        j["covariance"] = to_rows(*rec.covariance);
    }
    if (rec.train_inputs) {
        j["train_inputs"] = to_rows(*rec.train_inputs);
    }
    return j;
}

PosteriorRecord posterior_from_json(const nlohmann::json& j) {
    PosteriorRecord rec;
    rec.config.epsilon = require_number(j, "epsilon");
    rec.config.gamma = require_number(j, "gamma");
    rec.config.kernel.c = require_number(j, "c");
    rec.config.sigma2 = require_number(j, "sigma2");
    rec.mean = vector_from_json(require(j, "mean"), "mean");
    if (j.contains("covariance")) {
        rec.covariance = matrix_from_json(j.at("covariance"), "covariance");
        if (rec.covariance->rows() != rec.mean.size() ||
            rec.covariance->cols() != rec.mean.size()) {
            throw IoError("json: covariance shape does not match mean length");
        }
    }
    if (j.contains("train_inputs")) {
        rec.train_inputs = matrix_from_json(j.at("train_inputs"), "train_inputs");
        if (rec.train_inputs->rows() + 1 != rec.mean.size()) {
            throw IoError("json: train_inputs rows do not match mean length");
        }
    }
    rec.config.validate();
    return rec;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sweep_to_csv(const GapSweepReport& report) {
    std::ostringstream os;
    os << "neg_log10_eps,gap_norm,arse\n";
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const auto& rec = report.records[i];
        // grid exponents are exact; the trailing eps = 0 record maps to inf
        const double neg_log10 = i < report.exponents.size()
                                     ? report.exponents[i]
                                     : -std::log10(rec.epsilon);
        os << format_g17(neg_log10) << ',' << format_g17(rec.gap_norm) << ','
           << format_g17(rec.arse) << '\n';
    }
    return os.str();
}

nlohmann::json sweep_to_json(const GapSweepReport& report) {
    nlohmann::json j;
    j["exponents"] = report.exponents;
    j["includes_zero"] = report.includes_zero;
    auto& records = j["records"];
    records = nlohmann::json::array();
    for (const auto& rec : report.records) {
        nlohmann::json r;
        r["epsilon"] = rec.epsilon;
        r["gap_closed_form"] = to_vector(rec.gap_closed_form);
        r["gap_direct"] = to_vector(rec.gap_direct);
        r["gap_norm"] = rec.gap_norm;
        r["arse"] = rec.arse;
        records.push_back(std::move(r));
    }
    return j;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write failure on '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                      "': " + ec.message());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failure on '" + path.string() + "'");
    }
    return os.str();
}

}  // namespace epsvr
