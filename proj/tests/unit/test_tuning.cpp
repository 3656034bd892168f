#include <catch_amalgamated.hpp>

#include <cmath>

#include "robalt/tuning.hpp"

#include "support.hpp"

using namespace robalt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("estimated MSE is squared distance plus variance trace") {
    FitResult f;
    f.params = {1.0, -2.0, 1.5};
    f.covariance = Mat3::diag(2.0, 3.0, 4.0);
    const ModelParams pilot{1.1, -2.2, 1.4};
    CHECK_THAT(estimated_mse(f, pilot, 10.0), WithinRel(0.01 + 0.04 + 0.01 + 0.9, 1e-12));
}

TEST_CASE("default grid") {
    const auto g = default_beta_grid();
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK_THAT(g.back(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("noise-free data settles in one round") {
    const auto plan = testsupport::sim_plan();
    const auto pi = cell_probabilities(testsupport::sim_theta(), plan);
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
    for (double p : pi) {
        counts.push_back(std::llround(p * 1e9));
        total += counts.back();
    }
    const auto r = select_beta(plan, IntervalData::from_counts(counts), {});
    CHECK(r.pilot_converged);
    CHECK(r.rounds == 1);
    CHECK_THAT(r.theta_opt.a1, WithinAbs(-0.05, 1e-6));
}

TEST_CASE("selection is idempotent and thread count does not matter") {
    const auto plan = testsupport::solar_plan();
    const auto data = testsupport::solar_data();
    TuningConfig cfg;
    const auto first = select_beta(plan, data, cfg);
    CHECK(first.pilot_converged);
    cfg.pilot = first.theta_opt;
    const auto again = select_beta(plan, data, cfg);
    CHECK(again.beta_opt == first.beta_opt);
    CHECK(again.theta_opt.a0 == first.theta_opt.a0);
    CHECK(again.rounds == 1);

    TuningConfig par;
    par.threads = 4;
    const auto p = select_beta(plan, data, par);
    CHECK(p.beta_opt == first.beta_opt);
    CHECK(p.theta_opt.eta == first.theta_opt.eta);
    REQUIRE(p.mse_curve.size() == first.mse_curve.size());
    for (std::size_t i = 0; i < p.mse_curve.size(); ++i) CHECK(p.mse_curve[i].mse == first.mse_curve[i].mse);
}

TEST_CASE("ties go to the smaller beta and failed fits are skipped") {
    FitResult f;
    f.params = {1.0, -1.0, 1.0};
    f.covariance = Mat3::identity();
    f.converged = true;
    TuningConfig cfg;
    cfg.beta_grid = {0.0, 0.5, 1.0};
    auto r = select_beta_from_fits({f, f, f}, cfg, 10.0);
    CHECK(r.beta_opt == 0.0);

    FitResult worse = f;
    worse.covariance = Mat3::diag(5.0, 5.0, 5.0);
    r = select_beta_from_fits({std::nullopt, worse, f}, cfg, 10.0);
    CHECK(r.beta_opt == 1.0);
    CHECK_FALSE(r.mse_curve[0].used);
    CHECK(std::isnan(r.mse_curve[0].mse));
    CHECK_FALSE(r.warnings.empty());
    CHECK_THROWS_AS(select_beta_from_fits({std::nullopt, std::nullopt, std::nullopt}, cfg, 10.0), EstimationError);
    CHECK_THROWS_AS(select_beta_from_fits({f}, cfg, 10.0), std::invalid_argument);
}
