#include "epsvr/serialize.hpp"

#include "test_support.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

using testutil::run_cli;
using testutil::scratch_dir;
using testutil::slurp;
using testutil::spit;

namespace {

std::filesystem::path write_training_csv() {
    const auto path = scratch_dir() / "train.csv";
    std::ostringstream os;
    os << "x1,x2,y\n";
    std::mt19937_64 eng(81);
    for (int i = 0; i < 25; ++i) {
        const double a = testutil::uniform(eng, -1.0, 1.0);
        const double b = testutil::uniform(eng, -1.0, 1.0);
        os << a << ',' << b << ',' << 1.0 + std::sin(a + 0.5 * b) << '\n';
    }
    spit(path, os.str());
    return path;
}

}  // namespace

TEST_CASE("fit writes a model and reports diagnostics") {
    const auto data = write_training_csv();
    const auto out = scratch_dir() / "cli_model.json";
    const auto r = run_cli("fit --data " + data.string() + " --target y --gamma 0.5 --c2 1 --out " +
                           out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("b=") != std::string::npos);
    CHECK(r.out.find("kkt_residual=") != std::string::npos);

    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("gamma").get<double>() == 0.5);
    CHECK(j.at("c").get<double>() == 1.0);
    CHECK(j.at("alpha").size() == 25);
}

TEST_CASE("fit error categories and exit codes") {
    const auto r_io = run_cli("fit --data /nonexistent/file.csv --target y --gamma 1 --out " +
                              (scratch_dir() / "never.json").string());
    CHECK(r_io.exit_code == 2);
    CHECK(r_io.err.find("error[io]") != std::string::npos);

    const auto data = write_training_csv();
    const auto r_arg = run_cli("fit --data " + data.string() +
                               " --target y --gamma 0 --out " +
                               (scratch_dir() / "never.json").string());
    CHECK(r_arg.exit_code == 3);
    CHECK(r_arg.err.find("error[invalid-argument]") != std::string::npos);

    const auto r_flag = run_cli("fit --data " + data.string() + " --target y --c 1 --c2 1");
    CHECK(r_flag.exit_code == 3);

    const auto r_none = run_cli("fit --gamma 1");
    CHECK(r_none.exit_code == 3);
}

TEST_CASE("gap-sweep default grid emits 11 csv rows") {
    const auto data = write_training_csv();
    const auto out = scratch_dir() / "cli_sweep.csv";
    const auto r = run_cli("gap-sweep --data " + data.string() +
                           " --target y --gamma 0.5 --c2 1 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("final_gap_norm=") != std::string::npos);

    const std::string csv = slurp(out);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "neg_log10_eps,gap_norm,arse");
    int rows = 0;
    double prev_gap = std::numeric_limits<double>::infinity();
    double prev_arse = std::numeric_limits<double>::infinity();
    while (std::getline(lines, line)) {
        ++rows;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double gap = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        const double arse_value = std::stod(line.substr(c2 + 1));
        CHECK(gap < prev_gap);
        CHECK(arse_value < prev_arse);
        prev_gap = gap;
        prev_arse = arse_value;
    }
    CHECK(rows == 11);
}

TEST_CASE("gap-sweep single exponent and json format") {
    const auto data = write_training_csv();
    const auto out = scratch_dir() / "cli_sweep_single.csv";
    const auto r = run_cli("gap-sweep --data " + data.string() +
                           " --target y --exponents 0 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(slurp(out));
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        ++count;
    }
    CHECK(count == 2);  // header + one row

    const auto jout = scratch_dir() / "cli_sweep.json";
    const auto rj = run_cli("gap-sweep --data " + data.string() +
                            " --target y --format json --out " + jout.string());
    REQUIRE(rj.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(jout));
    CHECK(j.at("records").size() == 11);
}

TEST_CASE("gap-sweep on a constant-target dataset still decays monotonically") {
    const auto data = scratch_dir() / "constant.csv";
    std::ostringstream os;
    os << "x,y\n";
    std::mt19937_64 eng(82);
    for (int i = 0; i < 15; ++i) {
        os << testutil::uniform(eng, -1.0, 1.0) << ",2.5\n";
    }
    spit(data, os.str());

    const auto out = scratch_dir() / "constant_sweep.csv";
    const auto r = run_cli("gap-sweep --data " + data.string() +
                           " --target y --gamma 0.5 --c2 1 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(slurp(out));
    std::string line;
    std::getline(lines, line);
    double prev_arse = std::numeric_limits<double>::infinity();
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto c2 = line.rfind(',');
        const double arse_value = std::stod(line.substr(c2 + 1));
        CHECK(arse_value < prev_arse);  // b_LS = 2.5 keeps the gap alive at every eps
        prev_arse = arse_value;
        ++rows;
    }
    CHECK(rows == 11);
}

TEST_CASE("predict from a saved two-point model") {
    const auto data = scratch_dir() / "two_point.csv";
    spit(data, "x,y\n0,0\n1,1\n");
    const auto model_path = scratch_dir() / "two_point_model.json";
    const auto r_fit = run_cli("fit --data " + data.string() +
                               " --target y --gamma 1 --c 1 --out " + model_path.string());
    REQUIRE(r_fit.exit_code == 0);

    const auto probe = scratch_dir() / "probe.csv";
    spit(probe, "x\n0.5\n");
    const auto r = run_cli("predict --model " + model_path.string() + " --data " +
                           probe.string());
    REQUIRE(r.exit_code == 0);
    std::istringstream out(r.out);
    std::string header, value;
    std::getline(out, header);
    std::getline(out, value);
    CHECK(header == "prediction");
    CHECK(std::stod(value) == doctest::Approx(0.5).epsilon(1e-12));

    const auto wrong = scratch_dir() / "wrong_d.csv";
    spit(wrong, "a,b\n0.5,0.5\n");
    const auto r_bad = run_cli("predict --model " + model_path.string() + " --data " +
                               wrong.string());
    CHECK(r_bad.exit_code == 3);
}

TEST_CASE("predict from a posterior file has three output columns") {
    const auto data = write_training_csv();
    const auto post_path = scratch_dir() / "cli_posterior.json";
    const auto r_post = run_cli("posterior --data " + data.string() +
                                " --target y --gamma 1 --epsilon 1e-4 --out " +
                                post_path.string());
    REQUIRE(r_post.exit_code == 0);
    CHECK(r_post.out.find("bias_mean=") != std::string::npos);

    const auto probe = scratch_dir() / "probe2.csv";
    spit(probe, "x1,x2\n0.1,0.2\n-0.4,0.3\n");
    const auto r = run_cli("predict --posterior " + post_path.string() + " --data " +
                           probe.string());
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "mean,var_full,var_paper");
    int rows = 0;
    while (std::getline(lines, line)) {
        if (!line.empty()) {
            CHECK(std::count(line.begin(), line.end(), ',') == 2);
            ++rows;
        }
    }
    CHECK(rows == 2);

    // a posterior without covariance cannot predict
    const auto lean_path = scratch_dir() / "cli_posterior_lean.json";
    const auto r_lean = run_cli("posterior --data " + data.string() +
                                " --target y --no-covariance --out " + lean_path.string());
    REQUIRE(r_lean.exit_code == 0);
    const auto r_fail = run_cli("predict --posterior " + lean_path.string() + " --data " +
                                probe.string());
    CHECK(r_fail.exit_code == 3);
}

TEST_CASE("sinc-demo is deterministic and well-formed") {
    const auto out1 = scratch_dir() / "demo1.csv";
    const auto out2 = scratch_dir() / "demo2.csv";
    const std::string flags = "sinc-demo --n 120 --grid-points 61 --seed 1 --out ";
    REQUIRE(run_cli(flags + out1.string()).exit_code == 0);
    REQUIRE(run_cli(flags + out2.string()).exit_code == 0);
    const std::string a = slurp(out1);
    CHECK(a == slurp(out2));

    std::istringstream lines(a);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,true,mean,var_full,var_paper");
    int rows = 0;
    while (std::getline(lines, line)) {
        if (!line.empty()) {
            ++rows;
        }
    }
    CHECK(rows == 61);
}

TEST_CASE("every command is byte-reproducible under a fixed seed") {
    const auto data = write_training_csv();
    const auto run_twice = [&](const std::string& args, const std::string& stem) {
        const auto o1 = scratch_dir() / (stem + "_a");
        const auto o2 = scratch_dir() / (stem + "_b");
        REQUIRE(run_cli(args + " --out " + o1.string()).exit_code == 0);
        REQUIRE(run_cli(args + " --out " + o2.string()).exit_code == 0);
        CHECK(slurp(o1) == slurp(o2));
    };
    run_twice("fit --sinc 80 -3 3 --seed 9 --gamma 1 --c 1", "repro_fit");
    run_twice("posterior --data " + data.string() + " --target y --epsilon 1e-3",
              "repro_post");
    run_twice("gap-sweep --data " + data.string() + " --target y --gamma 0.5 --c2 1",
              "repro_sweep");
}
