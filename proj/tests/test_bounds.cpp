#include <catch_amalgamated.hpp>

#include <cmath>

#include "mpising/bounds.hpp"
#include "mpising/errors.hpp"
#include "mpising/magchain.hpp"
#include "mpising/oracle.hpp"
#include "mpising/partition.hpp"
#include "mpising/spectral.hpp"
#include "mpising/stats.hpp"

using namespace mpising;
using Catch::Approx;

TEST_CASE("default zeta and start") {
    const auto spec = PartitionSpec::uniform(2, 64, 1.0);
    const auto sd = perron(spec);
    CHECK(default_zeta(sd, 1.0) == Approx(0.5));
    CHECK(default_zeta(perron(spec.with_beta(0.0)), 0.0) == Approx(0.5));
    CHECK(default_zeta(perron(spec.with_beta(1.9)), 1.9) == Approx(1.5 * (1 - 1.9 / 2) / (1.9 * 1.9)));
    const auto u = scaled_start(spec, 0.5);
    CHECK(u == std::vector<int>{24, 24});
    for (int x : scaled_start(spec, 1e-6)) CHECK(x > 16);
}

TEST_CASE("lower bound never exceeds the exact distance") {
    const auto spec = PartitionSpec::uniform(2, 128, 1.0);
    const auto sd = perron(spec);
    const MagChain chain(spec);
    const std::vector<double> gammas{0.5, 1, 2, 3, 4};
    for (double zeta : {0.2, 0.5, 0.9}) {
        const auto rows = lower_bound_sweep(chain, sd, gammas, zeta);
        REQUIRE(rows.size() == gammas.size());
        for (const auto& r : rows) {
            INFO("gamma " << r.gamma << " zeta " << zeta);
            CHECK(r.e_stat == Approx(0.0).margin(1e-14));
            CHECK(r.tv_lower >= 0.0);
            CHECK(r.tv_lower <= r.tv_exact + 1e-12);
            CHECK(r.t_star >= 0);
            const auto single = lower_bound_at(chain, sd, r.gamma, zeta);
            CHECK(single.tv_exact == Approx(r.tv_exact).margin(1e-14));
        }
        for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].tv_lower >= rows[k - 1].tv_lower - 1e-12);
    }
    CHECK_THROWS_AS(lower_bound_at(chain, sd, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(lower_bound_at(chain, sd, 1.0, 1.5), ValidationError);
}

TEST_CASE("conductance of two sites") {
    for (double beta : {0.0, 0.7, 2.0}) {
        const auto spec = PartitionSpec::uniform(2, 2, beta);
        const auto res = conductance_cut(MagChain(spec));
        const double expected = beta == 0.0 ? 0.5 : (1 - std::tanh(beta / 2)) / 2;
        CHECK(res.phi_A == Approx(expected).margin(1e-15));
        CHECK(FullChain(spec).conductance() == Approx(expected).margin(1e-15));
        CHECK(res.tmix_lower == Approx(1.0 / (4 * expected)));
    }
}

TEST_CASE("conductance mass bounds and low-temperature decay") {
    std::vector<double> ns, logs;
    for (int n : {16, 32, 64}) {
        const auto res = conductance_cut(MagChain(PartitionSpec::uniform(2, n, 3.0)));
        CHECK(res.mu_A <= 0.5);
        CHECK(res.mu_B > 0.0);
        ns.push_back(n);
        logs.push_back(std::log(1 / res.phi_A));
    }
    const auto fit = linear_fit(ns, logs);
    CHECK(fit.slope > 0.0);
    CHECK(fit.r2 > 0.99);
    const auto unequal = conductance_cut(MagChain(PartitionSpec::make(parse_proportions("1/4,3/4"), 20, 1.0)));
    CHECK(unequal.mu_A <= 0.5);
}

TEST_CASE("free energy profile") {
    const std::vector<double> p{0.25, 0.75};
    const std::vector<double> v{0.3, 0.1};
    const std::vector<double> grid{0.0, 0.2, -0.4, 1.0};
    const auto samples = f_profile(p, 1.4, v, grid);
    CHECK(samples[0].f == Approx(std::log(2.0)).margin(1e-15));
    CHECK(samples[0].df == Approx(0.0).margin(1e-15));
    CHECK(samples[0].d2f == Approx(f_second_at_zero(p, 1.4, v)).margin(1e-12));
    const double h = 1e-5;
    for (double g : {0.2, -0.4, 1.0}) {
        const std::vector<double> pts{g - h, g + h};
        const auto s = f_profile(p, 1.4, v, pts);
        const auto mid = f_profile(p, 1.4, v, std::vector<double>{g});
        CHECK((s[1].df - s[0].df) / (2 * h) == Approx(mid[0].d2f).margin(1e-6));
        CHECK((s[1].f - s[0].f) / (2 * h) == Approx(mid[0].df).margin(1e-6));
    }
    CHECK_THROWS_AS(f_profile(p, 1.0, v, std::vector<double>{2.0}), ValidationError);
}

TEST_CASE("second derivative root recovers the critical beta") {
    std::vector<double> grid;
    for (double b = 0.05; b <= 20.0; b += 0.05) grid.push_back(b);
    for (const char* text : {"1/2,1/2", "1/4,3/4", "1/4,1/4,1/2", "1/6,1/3,1/2", "1/10,1/5,3/10,2/5"}) {
        const auto spec = PartitionSpec::make(parse_proportions(text), 60, 1.0);
        const auto sd = perron(spec);
        const double root = critical_beta_scan(spec.p(), sd.a, grid);
        INFO(text);
        CHECK(std::abs(root - sd.beta_cr.value()) <= 1e-8);
        CHECK(f_second_at_zero(spec.p(), sd.beta_cr.value(), sd.a) == Approx(0.0).margin(1e-9));
        CHECK(f_second_at_zero(spec.p(), sd.beta_cr.value() + 0.5, sd.a) > 0.0);
        CHECK(f_second_at_zero(spec.p(), sd.beta_cr.value() - 0.5, sd.a) < 0.0);
    }
    CHECK(std::abs(critical_beta_scan(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}, grid) - 2.0) <= 1e-8);
    const std::vector<double> low{0.1, 0.5, 1.0};
    CHECK_THROWS_AS(critical_beta_scan(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}, low), ConvergenceError);
}

TEST_CASE("wilson interval and linear fit") {
    const auto ci = wilson_interval(0, 100);
    CHECK(ci.lo == 0.0);
    CHECK(ci.hi == Approx(0.037).margin(1e-3));
    const auto mid = wilson_interval(50, 100);
    CHECK(mid.lo + mid.hi == Approx(1.0));
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto fit = linear_fit(x, y);
    CHECK(fit.slope == Approx(2.0));
    CHECK(fit.intercept == Approx(1.0));
    CHECK(fit.r2 == Approx(1.0));
}
