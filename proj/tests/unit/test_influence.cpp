#include <catch_amalgamated.hpp>

#include <cmath>

#include "robalt/influence.hpp"

#include "fixtures/estimation_reference.inc"
#include "support.hpp"

using namespace robalt;
using Catch::Matchers::WithinAbs;

TEST_CASE("influence vectors match the reference") {
    const auto plan = testsupport::solar_plan();
    const ModelParams th{1.8, -2.4, 1.5};
    for (const auto& ref : kSolarInfluence) {
        const Vec3 v = if_mdpde(th, plan, ref.beta, static_cast<std::size_t>(ref.cell));
        for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(v[i], WithinAbs(ref.value[i], 1e-8 * std::max(1.0, std::abs(ref.value[i]))));
    }
}

TEST_CASE("influence averages to zero under the model") {
    const auto plan = testsupport::sim_plan();
    const auto th = testsupport::sim_theta();
    const auto pi = cell_probabilities(th, plan);
    for (double beta : {0.0, 0.5, 1.0}) {
        Vec3 s{0, 0, 0};
        for (std::size_t j = 1; j <= plan.num_cells(); ++j) s = s + pi[j - 1] * if_mdpde(th, plan, beta, j);
        CHECK(norm(s) < 1e-9);
    }
}

TEST_CASE("influence equals the derivative of the refitted estimate") {
    const auto plan = testsupport::sim_plan();
    const auto th = testsupport::sim_theta();
    const auto pi = cell_probabilities(th, plan);
    const double eps = 1e-4;
    for (double beta : {0.0, 0.5}) {
        for (std::size_t cell : {std::size_t{2}, std::size_t{9}}) {
            std::vector<double> p = pi;
            for (std::size_t j = 0; j < p.size(); ++j) p[j] = (1 - eps) * pi[j] + (j + 1 == cell ? eps : 0.0);
            FitConfig cfg;
            cfg.beta = beta;
            cfg.initial = th;
            const auto f = fit_proportions(plan, p, 200, cfg);
            const Vec3 fd = (1.0 / eps) * (f.params.as_vector() - th.as_vector());
            const Vec3 v = if_mdpde(th, plan, beta, cell);
            CHECK(norm(fd - v) <= 0.02 * norm(v));
        }
    }
}

TEST_CASE("Wald influence at the null") {
    const auto plan = testsupport::sim_plan();
    const auto th = testsupport::sim_theta();
    const auto con = linear_constraint({0, 1, 0}, th.a1);
    for (std::size_t cell : {std::size_t{1}, std::size_t{5}, std::size_t{14}}) {
        CHECK_THAT(if_wald_first_order(th, plan, 0.4, con, cell, 200.0), WithinAbs(0.0, 1e-12));
        const auto rep = influence_report(th, plan, 0.4, con, cell, 200.0);
        const auto cov = sandwich_covariance(th, plan, 0.4).covariance;
        const double m1 = rep.if_vector[1];
        CHECK_THAT(rep.if_wald_second_order, WithinAbs(2 * 200.0 * m1 * m1 / cov(1, 1), 1e-9 * rep.if_wald_second_order + 1e-12));
        CHECK(rep.if_wald_second_order >= 0.0);
        CHECK(rep.cell == cell);
    }
    CHECK_THROWS(if_mdpde(th, plan, 0.4, 0));
    CHECK_THROWS(if_mdpde(th, plan, 0.4, 15));
}

TEST_CASE("leverage probes: bounded for positive beta, growing at beta zero") {
    const auto plan = testsupport::sim_plan();
    const auto th = testsupport::sim_theta();
    const std::vector<double> grid{50, 100, 500, 1000, 1e4};
    for (double beta : {0.2, 0.6, 1.0}) {
        const auto pts = leverage_probe(th, plan, beta, ProbeMode::inspection_time, grid);
        REQUIRE(pts.size() == grid.size());
        // settles on a finite value once the last interval holds all remaining mass
        CHECK_THAT(pts[3].norm, WithinAbs(pts[2].norm, 1e-6 * pts[2].norm));
        CHECK_THAT(pts[4].norm, WithinAbs(pts[2].norm, 1e-6 * pts[2].norm));
    }
    const auto mle = leverage_probe(th, plan, 0.0, ProbeMode::inspection_time, grid);
    for (std::size_t i = 1; i < mle.size(); ++i) CHECK(mle[i].norm > 2 * mle[i - 1].norm);

    const std::vector<double> xs{45, 60, 100, 200, 500};
    const auto mle_x = leverage_probe(th, plan, 0.0, ProbeMode::stress_level, xs);
    for (std::size_t i = 1; i < mle_x.size(); ++i) CHECK(mle_x[i].norm > mle_x[i - 1].norm);
    for (double beta : {0.2, 0.6}) {
        const auto rob_x = leverage_probe(th, plan, beta, ProbeMode::stress_level, xs);
        CHECK_THAT(rob_x[4].norm, WithinAbs(rob_x[3].norm, 1e-6 * rob_x[3].norm));
    }
}
