#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "idiff/analysis.hpp"
#include "idiff/error.hpp"

using namespace idiff;

namespace {

EstimateCurve curve_with(std::vector<double> grid, std::vector<double> values) {
    EstimateCurve c;
    c.eval_points = std::move(grid);
    c.values = std::move(values);
    c.denominators.assign(c.values.size(), 1.0);
    c.h = 0.1;
    c.n_used = 10;
    return c;
}

double zero(double) { return 0.0; }

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("maae arithmetic") {
    const std::vector<double> grid{0.0, 1.0, 2.0};
    auto truth = [](double x) { return 2.0 * x; };

    std::vector<EstimateCurve> exact{curve_with(grid, {0.0, 2.0, 4.0}), curve_with(grid, {0.0, 2.0, 4.0})};
    CHECK(maae(exact, truth).maae == 0.0);

    std::vector<EstimateCurve> one{curve_with(grid, {0.1, 1.7, 4.2})};
    CHECK(maae(one, truth).maae == doctest::Approx(0.3).epsilon(1e-12));

    std::vector<EstimateCurve> two{curve_with(grid, {0.2, 0.0, 0.0}), curve_with(grid, {0.0, 0.0, -0.4})};
    const auto report = maae(two, zero);
    CHECK(report.maae == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(report.per_replication_max_err == std::vector<double>{0.2, 0.4});
    CHECK(report.nan_count == 0);
}

TEST_CASE("maae rejects NaN and mismatched grids") {
    const std::vector<double> grid{0.0, 1.0};
    std::vector<EstimateCurve> bad{curve_with(grid, {0.0, 0.0}), curve_with(grid, {0.0, std::nan("")})};
    try {
        maae(bad, zero);
        FAIL("expected InvalidEstimateError");
    } catch (const InvalidEstimateError& e) {
        CHECK(e.replication() == 1);
        CHECK(e.point() == 1);
    }
    std::vector<EstimateCurve> mixed{curve_with(grid, {0.0, 0.0}), curve_with({0.0, 2.0}, {0.0, 0.0})};
    CHECK_THROWS_AS(maae(mixed, zero), ArgumentError);
    CHECK_THROWS_AS(maae(std::vector<EstimateCurve>{}, zero), ArgumentError);
}

TEST_CASE("maae is permutation invariant and monotone") {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::vector<double> grid{0.0, 0.5, 1.0, 1.5};
    std::vector<EstimateCurve> curves;
    for (int k = 0; k < 30; ++k) {
        curves.push_back(curve_with(grid, {noise(gen), noise(gen), noise(gen), noise(gen)}));
    }
    const double base = maae(curves, zero).maae;
    CHECK(base >= 0.0);
    auto reversed = curves;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(maae(reversed, zero).maae == doctest::Approx(base).epsilon(1e-14));
    auto worse = curves;
    worse[7].values[2] = 100.0;
    CHECK(maae(worse, zero).maae >= base);
}

TEST_CASE("evaluation grid") {
    CHECK(eval_grid(0.0, 1.0, 3) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(eval_grid(-2.79, -2.7, 2) == std::vector<double>{-2.79, -2.7});
    const auto g = eval_grid(0.078, 0.09, 50);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == 0.078);
    CHECK(g.back() == 0.09);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] - g[i - 1] == doctest::Approx(0.012 / 49.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(eval_grid(1.0, 1.0, 5), ArgumentError);
    CHECK_THROWS_AS(eval_grid(0.0, 1.0, 1), ArgumentError);
}

TEST_CASE("remark rate") {
    // ((ln 1000)^3 / 1000)^(2/5) at 40 digits: 0.64151133157716629514...
    CHECK(rate_remark2(1000) == doctest::Approx(0.6415113315771663).epsilon(1e-14));
    CHECK(rate_remark2(3) > 0.0);
    CHECK(rate_remark2(9000) < rate_remark2(1000));
    const std::size_t grid[] = {1000, 3000, 5000, 7000, 9000};
    for (std::size_t i = 1; i < 5; ++i) CHECK(rate_remark2(grid[i]) < rate_remark2(grid[i - 1]));
    for (std::size_t n = 21; n < 3000; ++n) CHECK(rate_remark2(n + 1) < rate_remark2(n));
    CHECK_THROWS_AS(rate_remark2(1), ArgumentError);
}

TEST_CASE("diffusion rate") {
    RateParams p;
    p.q = 38.0;
    const double log_n = std::log(500.0);
    CHECK(rate_diffusion(0.0, 1.0, 500, p) ==
          doctest::Approx(std::sqrt(log_n * log_n * log_n / 500.0) + 1.0).epsilon(1e-14));

    // Terms at (0.008, 0.12, 9000, q = 38), evaluated at 40 digits:
    // 0.0084469655754359, 0.8360006328859230, 0.0144.
    const double expected = 0.0084469655754359287 + 0.83600063288592303 + 0.0144;
    CHECK(rate_diffusion(0.008, 0.12, 9000, p) == doctest::Approx(expected).epsilon(1e-13));

    // Doubling h multiplies the smoothing term by 4.
    const double h = 0.1;
    const double base = rate_diffusion(0.0, h, 1000000, p) - std::sqrt(std::pow(std::log(1e6), 3) / (1e6 * h));
    const double doubled =
        rate_diffusion(0.0, 2 * h, 1000000, p) - std::sqrt(std::pow(std::log(1e6), 3) / (1e6 * 2 * h));
    CHECK(doubled / base == doctest::Approx(4.0).epsilon(1e-9));

    CHECK_THROWS_AS(rate_diffusion(0.01, 0.0, 100, p), ArgumentError);
    p.theta = 1.5;
    CHECK_THROWS_AS(rate_diffusion(0.01, 0.1, 100, p), ArgumentError);
}

TEST_CASE("drift rate") {
    RateParams p;
    p.q = 38.0;
    p.theta_bar = 0.9;
    // 40-digit evaluation at (0.004, 0.3046, T = 20).
    CHECK(rate_drift(0.004, 0.3046, 20.0, p) == doctest::Approx(0.97994810770776998).epsilon(1e-13));

    p.q = 998.0;
    const double delta = 0.01;
    const double without_delta = rate_drift(0.0, 0.2, 50.0, p);
    CHECK(rate_drift(delta, 0.2, 50.0, p) - without_delta == doctest::Approx(std::pow(delta, 0.499)).epsilon(1e-12));
    CHECK(without_delta - std::sqrt(std::log(50.0) / (std::pow(50.0, p.theta_bar) * 0.2)) ==
          doctest::Approx(0.04).epsilon(1e-12));

    CHECK_THROWS_AS(rate_drift(0.01, 0.2, 1.0, p), ArgumentError);
    CHECK_THROWS_AS(rate_drift(0.01, 0.2, 0.5, p), ArgumentError);
}

TEST_CASE("beta admissibility conditions") {
    RateParams p;
    p.theta = 0.4;
    p.kappa_exp = 0.4;
    p.q = 38.0;
    p.theta_bar = 0.5;
    p.kappa_bar = 0.5;
    // max((2 + 1.2) / 0.2, (2 + 1/40) / 0.2) = max(16, 10.125)
    CHECK(diffusion_beta_bound(p) == doctest::Approx(16.0).epsilon(1e-14));
    p.beta_mix = 17.0;
    CHECK(check_beta_conditions(p).diffusion_ok);
    p.beta_mix = 15.9;
    CHECK_FALSE(check_beta_conditions(p).diffusion_ok);

    p.beta_mix = 0.1;
    const auto both = check_beta_conditions(p);
    CHECK_FALSE(both.diffusion_ok);
    CHECK_FALSE(both.drift_ok);

    RateParams near_one;
    near_one.q = 1e4;
    near_one.theta_bar = 0.999;
    near_one.kappa_bar = 1.0;
    near_one.beta_mix = 1000.0;
    CHECK(drift_beta_bound(near_one) > 1000.0);
    CHECK_FALSE(check_beta_conditions(near_one).drift_ok);

    RateParams broken;
    broken.theta = 0.7;
    broken.kappa_exp = 0.4;
    CHECK_THROWS_AS(check_beta_conditions(broken), ConditionNotApplicable);
    RateParams broken_drift;
    broken_drift.q = 4.0;
    broken_drift.theta_bar = 0.6;
    CHECK_THROWS_AS(drift_beta_bound(broken_drift), ConditionNotApplicable);
}

TEST_CASE("moment checks") {
    const SdeModel ou = make_ou_model(0.5, -2.75, 0.43);

    SUBCASE("drift vanishes at the mean") {
        const auto r = moment_check_drift(ou, -2.75, 0.004, 10, 20000, 1);
        CHECK(r.target == 0.0);
        CHECK(r.replications == 20000);
        CHECK(moment_bound_holds(r));
    }
    SUBCASE("drift target off the mean") {
        const auto r = moment_check_drift(ou, -2.79, 0.008, 10, 20000, 2);
        CHECK(r.target == doctest::Approx(0.02).epsilon(1e-12));
        CHECK(moment_bound_holds(r));
    }
    SUBCASE("cir drift target at theta") {
        const SdeModel cir = make_cir_model(0.85837, 0.085711, 0.15660);
        CHECK(moment_check_drift(cir, 0.085711, 0.004, 10, 1000, 3).target == 0.0);
    }
    SUBCASE("degenerate diffusion") {
        const double delta = 0.004;
        const SdeModel still = make_model("still", [](double x) { return 0.5 * (-2.75 - x); },
                                          [](double) { return 0.0; }, -INFINITY, INFINITY);
        const auto r = moment_check_diffusion(still, 0.0, delta, 10, 200, 4);
        CHECK(r.target == 0.0);
        const double b = 0.5 * 2.75;
        CHECK(std::abs(r.mc_estimate) <= 2.0 * b * b * delta);
    }
    SUBCASE("stderr shrinks like one over root reps") {
        const auto small = moment_check_diffusion(ou, -2.75, 0.004, 5, 4000, 5);
        const auto large = moment_check_diffusion(ou, -2.75, 0.004, 5, 8000, 6);
        const double ratio = small.mc_stderr / large.mc_stderr;
        CHECK(ratio > std::sqrt(2.0) / 1.2);
        CHECK(ratio < std::sqrt(2.0) * 1.2);
        CHECK(small.target == doctest::Approx(2.0 / 3.0 * 0.1849).epsilon(1e-12));
    }
    SUBCASE("replication count floor") {
        CHECK_THROWS_AS(moment_check_diffusion(ou, 0.0, 0.004, 10, 99, 1), ArgumentError);
    }
}

TEST_CASE("moment checks are independent of the thread count") {
    const SdeModel cir = make_cir_model(0.85837, 0.085711, 0.15660);
    const auto one = moment_check_diffusion(cir, 0.09, 0.008, 4, 3000, 77, 1);
    const auto four = moment_check_diffusion(cir, 0.09, 0.008, 4, 3000, 77, 4);
    CHECK(one.mc_estimate == four.mc_estimate);
    CHECK(one.mc_stderr == four.mc_stderr);
}

TEST_CASE("rate fit") {
    const std::vector<double> rate{0.1, 0.2, 0.35, 0.5};
    std::vector<double> doubled;
    for (double r : rate) doubled.push_back(2.0 * r);
    const auto fit = rate_fit(doubled, rate);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::abs(fit.intercept) < 1e-14);
    CHECK(fit.correlation == doctest::Approx(1.0).epsilon(1e-13));

    const auto flat = rate_fit(std::vector<double>{3.0, 3.0, 3.0, 3.0}, rate);
    CHECK(flat.slope == 0.0);
    CHECK(flat.correlation == 0.0);

    CHECK_THROWS_AS(rate_fit(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}), ArgumentError);
    CHECK_THROWS_AS(rate_fit(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0, 1.0, 1.0}),
                    ArgumentError);
}

TEST_CASE("rate fit on the published CIR column agrees with a QR least-squares oracle") {
    // Direct-observation errors (x 1e-3) for delta = 0.008, h = 0.12.
    const std::vector<double> published{0.4022, 0.272, 0.2331, 0.2126, 0.2016};
    std::vector<double> rates;
    for (std::size_t n : {1000, 3000, 5000, 7000, 9000}) rates.push_back(rate_remark2(n));
    const auto fit = rate_fit(published, rates);
    CHECK(fit.correlation > 0.98);

    Eigen::MatrixXd design(5, 2);
    Eigen::VectorXd target(5);
    for (int i = 0; i < 5; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = rates[i];
        target(i) = published[i];
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
    CHECK(fit.intercept == doctest::Approx(coef(0)).epsilon(1e-10));
    CHECK(fit.slope == doctest::Approx(coef(1)).epsilon(1e-10));

    const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rates.data(), 5);
    const Eigen::VectorXd rc = r.array() - r.mean();
    const Eigen::VectorXd tc = target.array() - target.mean();
    CHECK(fit.correlation == doctest::Approx(rc.dot(tc) / (rc.norm() * tc.norm())).epsilon(1e-12));
}

}  // TEST_SUITE
