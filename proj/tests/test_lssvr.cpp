#include "epsvr/lssvr.hpp"

#include "epsvr/equivalence.hpp"
#include "epsvr/errors.hpp"
#include "test_support.hpp"

#include "doctest.h"

#include <cmath>

using epsvr::Dataset;
using epsvr::KernelConfig;
using epsvr::LssvrConfig;

namespace {

Dataset two_point_problem() {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 1.0;
    Eigen::VectorXd y(2);
    y << 0.0, 1.0;
    return Dataset(std::move(x), std::move(y));
}

const LssvrConfig kUnitConfig{1.0, KernelConfig{1.0}};

}  // namespace

TEST_CASE("build_system assembles the bordered saddle matrix") {
    const auto sys = epsvr::build_system(two_point_problem(), kUnitConfig);
    const double e = std::exp(-1.0);
    Eigen::MatrixXd expected(3, 3);
    expected << 0.0, 1.0, 1.0, 1.0, 2.0, e, 1.0, e, 2.0;
    CHECK((sys.psi - expected).cwiseAbs().maxCoeff() <= 1e-15);
    Eigen::VectorXd rhs(3);
    rhs << 0.0, 0.0, 1.0;
    CHECK(sys.rhs == rhs);
}

TEST_CASE("build_system single point") {
    Eigen::MatrixXd x(1, 1);
    x << 0.7;
    Eigen::VectorXd y(1);
    y << 4.0;
    const auto sys = epsvr::build_system(Dataset(x, y), LssvrConfig{2.0, KernelConfig{1.0}});
    Eigen::MatrixXd expected(2, 2);
    expected << 0.0, 1.0, 1.0, 1.5;
    CHECK(sys.psi == expected);
}

TEST_CASE("build_system matches an elementwise assembly oracle") {
    std::mt19937_64 eng(21);
    const Dataset ds = testutil::random_problem(eng, 6, 2);
    const LssvrConfig cfg{0.7, KernelConfig{1.2}};
    const auto sys = epsvr::build_system(ds, cfg);

    const Eigen::Index n = ds.n();
    REQUIRE(sys.psi.rows() == n + 1);
    CHECK(sys.psi(0, 0) == 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(sys.psi(0, i + 1) == 1.0);
        CHECK(sys.psi(i + 1, 0) == 1.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double expected =
                epsvr::rbf(ds.inputs.row(i).transpose(), ds.inputs.row(j).transpose(),
                           cfg.kernel) +
                (i == j ? 1.0 / cfg.gamma : 0.0);
            CHECK(sys.psi(i + 1, j + 1) == doctest::Approx(expected).epsilon(1e-15));
        }
    }
}

TEST_CASE("fit reproduces the hand-solved two-point problem") {
    const auto model = epsvr::fit(two_point_problem(), kUnitConfig);
    const double alpha1 = -1.0 / (2.0 * (2.0 - std::exp(-1.0)));
    CHECK(model.b == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(model.alpha[0] == doctest::Approx(alpha1).epsilon(1e-12));
    CHECK(model.alpha[1] == doctest::Approx(-alpha1).epsilon(1e-12));
    CHECK(model.alpha[0] == doctest::Approx(-0.3063494).epsilon(1e-6));

    Eigen::VectorXd mid(1);
    mid << 0.5;
    CHECK(epsvr::predict(model, mid) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("constant targets give b = k and zero weights") {
    std::mt19937_64 eng(22);
    Eigen::MatrixXd x = testutil::random_matrix(eng, 8, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(8, 3.25);
    const auto model = epsvr::fit(Dataset(x, y), LssvrConfig{2.0, KernelConfig{0.9}});
    CHECK(model.b == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(model.alpha.cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::VectorXd anywhere(2);
    anywhere << 9.0, -4.0;
    CHECK(epsvr::predict(model, anywhere) == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("fit matches a dense full-pivot solve oracle") {
    std::mt19937_64 eng(23);
    const Dataset ds = testutil::random_problem(eng, 10, 3);
    const LssvrConfig cfg{1.4, KernelConfig{1.0}};
    const auto model = epsvr::fit(ds, cfg);

    const auto sys = epsvr::build_system(ds, cfg);
    const Eigen::VectorXd expected = Eigen::FullPivLU<Eigen::MatrixXd>(sys.psi).solve(sys.rhs);
    CHECK((model.theta() - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("predict far from the data returns the bias") {
    const auto model = epsvr::fit(two_point_problem(), kUnitConfig);
    Eigen::VectorXd far(1);
    far << 40.0;  // c^2 d^2 >= 40 for both centers
    CHECK(epsvr::predict(model, far) == doctest::Approx(model.b).epsilon(1e-6));

    Eigen::VectorXd wrong(2);
    wrong.setZero();
    CHECK_THROWS_AS(epsvr::predict(model, wrong), epsvr::InvalidArgumentError);
}

TEST_CASE("pointwise and batch predict agree") {
    std::mt19937_64 eng(24);
    const Dataset ds = testutil::random_problem(eng, 12, 2);
    const auto model = epsvr::fit(ds, LssvrConfig{0.5, KernelConfig{1.0}});
    const Eigen::MatrixXd probes = testutil::random_matrix(eng, 7, 2, -2.0, 2.0);
    const Eigen::VectorXd batch = epsvr::predict_batch(model, probes);
    for (Eigen::Index i = 0; i < probes.rows(); ++i) {
        CHECK(batch[i] ==
              doctest::Approx(epsvr::predict(model, probes.row(i).transpose()))
                  .epsilon(1e-13));
    }
}

TEST_CASE("KKT invariants hold after fit") {
    std::mt19937_64 eng(25);
    for (int trial = 0; trial < 8; ++trial) {
        const auto n = static_cast<Eigen::Index>(3 + eng() % 15);
        const auto d = static_cast<Eigen::Index>(1 + eng() % 4);
        const Dataset ds = testutil::random_problem(eng, n, d);
        const LssvrConfig cfg{testutil::uniform(eng, 0.1, 10.0), KernelConfig{1.0}};
        const auto model = epsvr::fit(ds, cfg);

        CHECK(std::abs(model.alpha.sum()) <=
              1e-8 * std::max(1.0, model.alpha.lpNorm<1>()));

        const auto sys = epsvr::build_system(ds, cfg);
        CHECK((sys.psi * model.theta() - sys.rhs).norm() <= 1e-8 * ds.targets.norm());

        // stationarity: alpha_i = gamma * (y_i - f(x_i))
        const Eigen::VectorXd fitted = epsvr::predict_batch(model, ds.inputs);
        const Eigen::VectorXd expected_alpha = cfg.gamma * (ds.targets - fitted);
        CHECK((model.alpha - expected_alpha).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("interpolation limit at large gamma") {
    std::mt19937_64 eng(26);
    const Dataset ds = testutil::random_problem(eng, 15, 2, 0.0);
    const auto model = epsvr::fit(ds, LssvrConfig{1e8, KernelConfig{1.0}});
    const Eigen::VectorXd fitted = epsvr::predict_batch(model, ds.inputs);
    const double scale = ds.targets.cwiseAbs().maxCoeff();
    CHECK((fitted - ds.targets).cwiseAbs().maxCoeff() <= 1e-4 * scale);
}

TEST_CASE("saddle solve agrees with the normal-equations route") {
    std::mt19937_64 eng(27);
    const Dataset ds = testutil::random_problem(eng, 12, 2);
    const LssvrConfig cfg{1.0, KernelConfig{1.0}};
    const auto sys = epsvr::build_system(ds, cfg);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.psi);
    REQUIRE(lu.rcond() > 1e-8);  // well-conditioned problem only

    const auto model = epsvr::fit(ds, cfg);
    const Eigen::MatrixXd ptp = sys.psi.transpose() * sys.psi;
    const Eigen::VectorXd normal_theta =
        Eigen::LLT<Eigen::MatrixXd>(ptp).solve(sys.psi.transpose() * sys.rhs);
    CHECK((model.theta() - normal_theta).norm() <= 1e-7 * normal_theta.norm());
}

TEST_CASE("exactly duplicated inputs with huge gamma raise a singular-system error") {
    Eigen::MatrixXd x(3, 1);
    x << 1.0, 1.0, 2.0;  // two identical rows
    Eigen::VectorXd y(3);
    y << 1.0, 2.0, 3.0;
    // gamma^-1 underflows against the unit diagonal, leaving identical rows
    CHECK_THROWS_AS(epsvr::fit(Dataset(x, y), LssvrConfig{1e300, KernelConfig{1.0}}),
                    epsvr::SingularSystemError);
}

TEST_CASE("duplicated inputs with moderate gamma remain solvable") {
    Eigen::MatrixXd x(3, 1);
    x << 1.0, 1.0, 2.0;
    Eigen::VectorXd y(3);
    y << 1.0, 2.0, 3.0;
    const auto model = epsvr::fit(Dataset(x, y), LssvrConfig{10.0, KernelConfig{1.0}});
    CHECK(std::isfinite(model.b));
}

TEST_CASE("fit_rbf_ls minimum-norm behavior") {
    std::mt19937_64 eng(28);

    SUBCASE("zero targets give the zero solution") {
        Eigen::MatrixXd x = testutil::random_matrix(eng, 5, 2);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(5);
        const auto model = epsvr::fit_rbf_ls(Dataset(x, y), kUnitConfig);
        CHECK(std::abs(model.b) <= 1e-14);
        CHECK(model.alpha.cwiseAbs().maxCoeff() <= 1e-14);
    }

    SUBCASE("single point splits the target between bias and weight") {
        Eigen::MatrixXd x(1, 1);
        x << 0.2;
        Eigen::VectorXd y(1);
        y << 3.0;
        const auto model = epsvr::fit_rbf_ls(Dataset(x, y), kUnitConfig);
        CHECK(model.b == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(model.alpha[0] == doctest::Approx(1.5).epsilon(1e-12));
    }

    SUBCASE("residual and norm match an SVD oracle") {
        const Dataset ds = testutil::random_problem(eng, 8, 2);
        const auto model = epsvr::fit_rbf_ls(ds, kUnitConfig);

        const Eigen::MatrixXd omega = epsvr::gram(ds.inputs, kUnitConfig.kernel).values;
        Eigen::MatrixXd psi(8, 9);
        psi.col(0).setOnes();
        psi.rightCols(8) = omega;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd oracle = svd.solve(ds.targets);

        const double res_model = (psi * model.theta() - ds.targets).norm();
        const double res_oracle = (psi * oracle - ds.targets).norm();
        CHECK(std::abs(res_model - res_oracle) <= 1e-9);
        // minimum-norm solutions coincide
        CHECK((model.theta() - oracle).norm() <= 1e-8 * std::max(1.0, oracle.norm()));
    }
}
