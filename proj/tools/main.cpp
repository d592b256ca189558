#include "epsvr/bayes.hpp"
#include "epsvr/data.hpp"
#include "epsvr/equivalence.hpp"
#include "epsvr/errors.hpp"
#include "epsvr/kernel.hpp"
#include "epsvr/lssvr.hpp"
#include "epsvr/serialize.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitInvalidArgument = 3;
constexpr int kExitNumerical = 4;

using epsvr::format_g17;

// One dataset source per invocation: a CSV file or the seeded sinc generator.
struct InputFlags {
    std::string data_path;
    std::vector<double> sinc_args;  // N LO HI
    std::string target;
    bool no_header = false;
    std::uint64_t seed = 0;
};

struct KernelFlags {
    double c = 0.0;
    double c2 = 0.0;
    bool c_set = false;
    bool c2_set = false;

    epsvr::KernelConfig resolve() const {
        epsvr::KernelConfig cfg;
        if (c2_set) {
            if (!(c2 > 0.0)) {
                throw epsvr::InvalidArgumentError("c2 must be positive");
            }
            cfg.c = std::sqrt(c2);
        } else if (c_set) {
            cfg.c = c;
        } else {
            cfg.c = 1.0;
        }
        cfg.validate();
        return cfg;
    }
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& k) {
    auto* c_opt = cmd->add_option("--c", k.c, "RBF width parameter c");
    auto* c2_opt = cmd->add_option("--c2", k.c2, "RBF width as c^2");
    c_opt->excludes(c2_opt);
    c2_opt->excludes(c_opt);
    cmd->callback([&k, c_opt, c2_opt] {
        k.c_set = c_opt->count() > 0;
        k.c2_set = c2_opt->count() > 0;
    });
}

void add_input_flags(CLI::App* cmd, InputFlags& in) {
    auto* data_opt = cmd->add_option("--data", in.data_path, "CSV dataset path");
    auto* sinc_opt =
        cmd->add_option("--sinc", in.sinc_args, "generate N sinc points in [LO, HI)")
            ->expected(3);
    data_opt->excludes(sinc_opt);
    sinc_opt->excludes(data_opt);
    cmd->add_option("--target", in.target, "target column name or 0-based index");
    cmd->add_flag("--no-header", in.no_header, "CSV has no header row");
    cmd->add_option("--seed", in.seed, "generator seed")->capture_default_str();
}

epsvr::TargetColumn parse_target(const std::string& s) {
    long long idx = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
    if (ec == std::errc{} && ptr == s.data() + s.size()) {
        return static_cast<Eigen::Index>(idx);
    }
    return s;
}

epsvr::Dataset resolve_input(const InputFlags& in) {
    const bool have_data = !in.data_path.empty();
    const bool have_sinc = !in.sinc_args.empty();
    if (have_data == have_sinc) {
        throw epsvr::InvalidArgumentError(
            "exactly one input source required: --data PATH or --sinc N LO HI");
    }
    if (have_sinc) {
        const double n_raw = in.sinc_args[0];
        const auto n = static_cast<Eigen::Index>(std::llround(n_raw));
        if (n < 1 || static_cast<double>(n) != n_raw) {
            throw epsvr::InvalidArgumentError("--sinc N must be a positive integer");
        }
        return epsvr::gen_sinc(n, in.sinc_args[1], in.sinc_args[2], in.seed);
    }
    if (in.target.empty()) {
        throw epsvr::InvalidArgumentError("--target is required with --data");
    }
    return epsvr::load_csv(in.data_path, parse_target(in.target), !in.no_header);
}

std::string predictions_csv(const Eigen::VectorXd& preds) {
    std::ostringstream os;
    os << "prediction\n";
    for (Eigen::Index i = 0; i < preds.size(); ++i) {
        os << format_g17(preds[i]) << '\n';
    }
    return os.str();
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        epsvr::write_text_atomic(out_path, content);
    }
}

int run_fit(const InputFlags& in, const KernelFlags& kernel, double gamma,
            const std::string& out_path) {
    epsvr::LssvrConfig cfg{gamma, kernel.resolve()};
    cfg.validate();
    const epsvr::Dataset ds = resolve_input(in);
    const epsvr::LssvrModel model = epsvr::fit(ds, cfg);
    epsvr::write_text_atomic(out_path, epsvr::model_to_json(model).dump(2) + "\n");

    const epsvr::KktDiagnostics kkt = epsvr::kkt_check(model, ds.targets);
    std::cout << "b=" << format_g17(model.b)
              << " alpha_norm=" << format_g17(model.alpha.norm())
              << " kkt_alpha_sum=" << format_g17(kkt.alpha_sum_abs)
              << " kkt_stationarity=" << format_g17(kkt.stationarity_gap)
              << " kkt_residual=" << format_g17(kkt.residual_norm) << '\n';
    std::cout << "wrote " << out_path << '\n';
    return kExitOk;
}

int run_posterior(const InputFlags& in, const KernelFlags& kernel, double gamma,
                  double epsilon, double sigma2, bool no_covariance,
                  bool no_train_inputs, const std::string& out_path) {
    epsvr::EpsLssvrConfig cfg;
    cfg.epsilon = epsilon;
    cfg.gamma = gamma;
    cfg.kernel = kernel.resolve();
    cfg.sigma2 = sigma2;
    cfg.validate();
    const epsvr::Dataset ds = resolve_input(in);
    const epsvr::GaussianPosterior post = epsvr::posterior(ds, cfg);

    epsvr::PosteriorRecord rec;
    rec.config = cfg;
    rec.mean = post.mean();
    if (!no_covariance) {
        rec.covariance = post.covariance();
    }
    if (!no_train_inputs) {
        rec.train_inputs = ds.inputs;
    }
    epsvr::write_text_atomic(out_path, epsvr::posterior_to_json(rec).dump(2) + "\n");

    std::cout << "bias_mean=" << format_g17(post.mean()[0])
              << " mean_norm=" << format_g17(post.mean().norm()) << '\n';
    std::cout << "wrote " << out_path << '\n';
    return kExitOk;
}

int run_gap_sweep(const InputFlags& in, const KernelFlags& kernel, double gamma,
                  std::vector<double> exponents, bool include_zero,
                  const std::string& eval_path, const std::string& format,
                  std::string out_path) {
    epsvr::LssvrConfig cfg{gamma, kernel.resolve()};
    cfg.validate();
    const epsvr::Dataset ds = resolve_input(in);

    std::optional<Eigen::MatrixXd> eval_inputs;
    if (!eval_path.empty()) {
        eval_inputs = epsvr::load_csv_matrix(eval_path, !in.no_header);
    }
    const epsvr::GapSweepReport report =
        epsvr::sweep(ds, cfg, std::move(exponents), eval_inputs, include_zero);

    if (out_path.empty()) {
        out_path = format == "json" ? "sweep.json" : "sweep.csv";
    }
    if (format == "json") {
        epsvr::write_text_atomic(out_path, epsvr::sweep_to_json(report).dump(2) + "\n");
    } else {
        epsvr::write_text_atomic(out_path, epsvr::sweep_to_csv(report));
    }
    std::cout << "final_gap_norm=" << format_g17(report.records.back().gap_norm) << '\n';
    std::cout << "wrote " << out_path << '\n';
    return kExitOk;
}

int run_predict(const std::string& model_path, const std::string& posterior_path,
                const std::string& inputs_path, bool no_header,
                const std::string& out_path) {
    if (model_path.empty() == posterior_path.empty()) {
        throw epsvr::InvalidArgumentError(
            "exactly one of --model or --posterior is required");
    }
    if (inputs_path.empty()) {
        throw epsvr::InvalidArgumentError("--data with prediction input rows is required");
    }
    const Eigen::MatrixXd inputs = epsvr::load_csv_matrix(inputs_path, !no_header);

    if (!model_path.empty()) {
        const auto model = epsvr::model_from_json(
            nlohmann::json::parse(epsvr::read_text(model_path)));
        if (inputs.cols() != model.train_inputs.cols()) {
            std::ostringstream os;
            os << "input rows have " << inputs.cols() << " columns, model expects "
               << model.train_inputs.cols();
            throw epsvr::InvalidArgumentError(os.str());
        }
        emit(out_path, predictions_csv(epsvr::predict_batch(model, inputs)));
        return kExitOk;
    }

    const auto rec = epsvr::posterior_from_json(
        nlohmann::json::parse(epsvr::read_text(posterior_path)));
    if (!rec.covariance || !rec.train_inputs) {
        throw epsvr::InvalidArgumentError(
            "posterior file must carry covariance and train_inputs to form predictions");
    }
    if (inputs.cols() != rec.train_inputs->cols()) {
        std::ostringstream os;
        os << "input rows have " << inputs.cols() << " columns, posterior expects "
           << rec.train_inputs->cols();
        throw epsvr::InvalidArgumentError(os.str());
    }
    const Eigen::Index n = rec.train_inputs->rows();
    const Eigen::MatrixXd phi =
        epsvr::design_matrix(inputs, *rec.train_inputs, rec.config.kernel);
    const Eigen::VectorXd mean = phi * rec.mean;
    const Eigen::MatrixXd& cov = *rec.covariance;
    const Eigen::VectorXd var_full =
        (phi * cov).cwiseProduct(phi).rowwise().sum();
    const auto k = phi.rightCols(n);
    const Eigen::VectorXd var_paper =
        (k * cov.bottomRightCorner(n, n)).cwiseProduct(k).rowwise().sum();

    std::ostringstream os;
    os << "mean,var_full,var_paper\n";
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
        os << format_g17(mean[i]) << ',' << format_g17(var_full[i]) << ','
           << format_g17(var_paper[i]) << '\n';
    }
    emit(out_path, os.str());
    return kExitOk;
}

int run_sinc_demo(Eigen::Index n, Eigen::Index grid_points, std::uint64_t seed,
                  const KernelFlags& kernel, double gamma, double epsilon,
                  double sigma2, const std::string& out_path) {
    epsvr::EpsLssvrConfig cfg;
    cfg.epsilon = epsilon;
    cfg.gamma = gamma;
    cfg.kernel = kernel.resolve();
    cfg.sigma2 = sigma2;
    cfg.validate();

    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double three_pi = 3.0 * std::numbers::pi;
    const epsvr::Dataset ds = epsvr::gen_sinc(n, -two_pi, two_pi, seed);
    const epsvr::GaussianPosterior post = epsvr::posterior(ds, cfg);
    const Eigen::MatrixXd eval = epsvr::grid(-three_pi, three_pi, grid_points);
    const epsvr::PredictiveBatch pred =
        epsvr::predictive_batch(post, eval, ds.inputs, cfg.kernel);

    std::ostringstream os;
    os << "x,true,mean,var_full,var_paper\n";
    for (Eigen::Index i = 0; i < eval.rows(); ++i) {
        os << format_g17(eval(i, 0)) << ',' << format_g17(epsvr::sinc(eval(i, 0)))
           << ',' << format_g17(pred.mean[i]) << ','
           << format_g17(pred.variance_full[i]) << ','
           << format_g17(pred.variance_paper[i]) << '\n';
    }
    epsvr::write_text_atomic(out_path, os.str());
    std::cout << "wrote " << out_path << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LS-SVR and Bayesian eps-LS-SVR regression toolkit"};
    app.require_subcommand(1);

    InputFlags fit_in, post_in, sweep_in;
    KernelFlags fit_kernel, post_kernel, sweep_kernel, demo_kernel;
    double fit_gamma = 1.0, post_gamma = 1.0, sweep_gamma = 1.0, demo_gamma = 1.0;
    std::string fit_out = "model.json";
    std::string post_out = "posterior.json";
    double post_epsilon = 1e-4, post_sigma2 = 1.0;
    bool post_no_cov = false, post_no_inputs = false;

    auto* fit_cmd = app.add_subcommand("fit", "fit an LS-SVR model and write it as JSON");
    add_input_flags(fit_cmd, fit_in);
    add_kernel_flags(fit_cmd, fit_kernel);
    fit_cmd->add_option("--gamma", fit_gamma, "regularization parameter")->capture_default_str();
    fit_cmd->add_option("--out", fit_out, "output model path")->capture_default_str();

    auto* post_cmd =
        app.add_subcommand("posterior", "compute the eps-LS-SVR posterior and write it as JSON");
    add_input_flags(post_cmd, post_in);
    add_kernel_flags(post_cmd, post_kernel);
    post_cmd->add_option("--gamma", post_gamma, "regularization parameter")->capture_default_str();
    post_cmd->add_option("--epsilon", post_epsilon, "bias prior precision")->capture_default_str();
    post_cmd->add_option("--sigma2", post_sigma2, "observation noise variance")->capture_default_str();
    post_cmd->add_flag("--no-covariance", post_no_cov, "omit the covariance matrix");
    post_cmd->add_flag("--no-train-inputs", post_no_inputs, "omit the training inputs");
    post_cmd->add_option("--out", post_out, "output posterior path")->capture_default_str();

    std::vector<double> sweep_exponents = epsvr::default_sweep_exponents();
    bool sweep_include_zero = false;
    std::string sweep_eval_path, sweep_format = "csv", sweep_out;
    auto* sweep_cmd = app.add_subcommand(
        "gap-sweep", "sweep epsilon and report parameter gaps and prediction ARSE");
    add_input_flags(sweep_cmd, sweep_in);
    add_kernel_flags(sweep_cmd, sweep_kernel);
    sweep_cmd->add_option("--gamma", sweep_gamma, "regularization parameter")->capture_default_str();
    sweep_cmd->add_option("--exponents", sweep_exponents,
                          "-log10(eps) grid points (default 0 0.5 ... 5)")
        ->expected(-1);
    sweep_cmd->add_flag("--include-zero", sweep_include_zero,
                        "append a final eps = 0 record");
    sweep_cmd->add_option("--eval-data", sweep_eval_path,
                          "CSV of evaluation inputs (default: training inputs)");
    sweep_cmd->add_option("--format", sweep_format, "output format")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_cmd->add_option("--out", sweep_out, "output path (default sweep.csv|sweep.json)");

    std::string pred_model, pred_posterior, pred_inputs, pred_out;
    bool pred_no_header = false;
    auto* pred_cmd =
        app.add_subcommand("predict", "predict from a saved model or posterior file");
    pred_cmd->add_option("--model", pred_model, "model JSON path");
    pred_cmd->add_option("--posterior", pred_posterior, "posterior JSON path");
    pred_cmd->add_option("--data", pred_inputs, "CSV of prediction input rows");
    pred_cmd->add_flag("--no-header", pred_no_header, "input CSV has no header row");
    pred_cmd->add_option("--out", pred_out, "output path (default stdout)");

    Eigen::Index demo_n = 1200, demo_grid = 601;
    std::uint64_t demo_seed = 0;
    double demo_epsilon = 1e-4, demo_sigma2 = 1.0;
    std::string demo_out = "sinc_demo.csv";
    auto* demo_cmd = app.add_subcommand(
        "sinc-demo", "fit the sinc function and tabulate predictive mean and variances");
    add_kernel_flags(demo_cmd, demo_kernel);
    demo_cmd->add_option("--n", demo_n, "training points on [-2pi, 2pi)")->capture_default_str();
    demo_cmd->add_option("--grid-points", demo_grid, "evaluation grid size on [-3pi, 3pi]")
        ->capture_default_str();
    demo_cmd->add_option("--seed", demo_seed, "generator seed")->capture_default_str();
    demo_cmd->add_option("--gamma", demo_gamma, "regularization parameter")->capture_default_str();
    demo_cmd->add_option("--epsilon", demo_epsilon, "bias prior precision")->capture_default_str();
    demo_cmd->add_option("--sigma2", demo_sigma2, "observation noise variance")->capture_default_str();
    demo_cmd->add_option("--out", demo_out, "output CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error[invalid-argument]: " << e.what() << '\n';
        return kExitInvalidArgument;
    }

    try {
        if (fit_cmd->parsed()) {
            return run_fit(fit_in, fit_kernel, fit_gamma, fit_out);
        }
        if (post_cmd->parsed()) {
            return run_posterior(post_in, post_kernel, post_gamma, post_epsilon,
                                 post_sigma2, post_no_cov, post_no_inputs, post_out);
        }
        if (sweep_cmd->parsed()) {
            return run_gap_sweep(sweep_in, sweep_kernel, sweep_gamma, sweep_exponents,
                                 sweep_include_zero, sweep_eval_path, sweep_format,
                                 sweep_out);
        }
        if (pred_cmd->parsed()) {
            return run_predict(pred_model, pred_posterior, pred_inputs, pred_no_header,
                               pred_out);
        }
        if (demo_cmd->parsed()) {
            return run_sinc_demo(demo_n, demo_grid, demo_seed, demo_kernel, demo_gamma,
                                 demo_epsilon, demo_sigma2, demo_out);
        }
        std::cerr << "error[invalid-argument]: no subcommand given\n";
        return kExitInvalidArgument;
    } catch (const epsvr::InvalidArgumentError& e) {
        std::cerr << "error[invalid-argument]: " << e.what() << '\n';
        return kExitInvalidArgument;
    } catch (const epsvr::SingularSystemError& e) {
        std::cerr << "error[numerical]: " << e.what()
                  << " (condition estimate " << format_g17(e.condition_estimate())
                  << ")\n";
        return kExitNumerical;
    } catch (const epsvr::IoError& e) {
        std::cerr << "error[io]: " << e.what() << '\n';
        return kExitIo;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error[io]: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
}
