#include <catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "mpising/coordchain.hpp"
#include "mpising/coupling.hpp"
#include "mpising/errors.hpp"
#include "mpising/partition.hpp"
#include "mpising/spectral.hpp"
#include "support.hpp"

using namespace mpising;
using Catch::Approx;

namespace {

/// Exact Glauber kernel row of cfg over outcomes: index v = flip site v,
/// index n = hold.
std::vector<double> glauber_row(const SpinConfig& cfg, const PartitionSpec& spec, const FieldTable& table) {
    std::vector<double> row(static_cast<std::size_t>(spec.n() + 1), 0.0);
    double hold = 1.0;
    for (int v = 0; v < spec.n(); ++v) {
        const Site s = spec.locate(v);
        const int f = cfg.field_numerator(s.part);
        const double flip = (cfg.spin(s) > 0 ? table.r_minus(f) : table.r_plus(f)) / spec.n();
        row[v] = flip;
        hold -= flip;
    }
    row[spec.n()] = hold;
    return row;
}

int outcome(const SpinConfig& before, const SpinConfig& after, const PartitionSpec& spec) {
    int changed = spec.n();
    for (int v = 0; v < spec.n(); ++v) {
        if (before.spin(spec.locate(v)) != after.spin(spec.locate(v))) {
            REQUIRE(changed == spec.n());
            changed = v;
        }
    }
    return changed;
}

/// chi-squared goodness of fit over cells with positive expected mass.
bool fits(const std::vector<long>& counts, const std::vector<double>& probs, long total) {
    double chi2 = 0.0;
    int cells = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] <= 0.0) {
            if (counts[k] != 0) return false;
            continue;
        }
        const double e = probs[k] * total;
        chi2 += (counts[k] - e) * (counts[k] - e) / e;
        ++cells;
    }
    if (cells < 2) return true;
    const boost::math::chi_squared dist(cells - 1);
    return chi2 < boost::math::quantile(dist, 1 - 1e-4);
}

/// Runs `step` from a fresh copy of (sigma, sigma') for `samples` streams and
/// checks both one-step marginals against the Glauber kernel.
void check_marginals(const PartitionSpec& spec, const SpinConfig& sigma, const SpinConfig& sigma_prime,
                     const std::function<void(CoupledChains&)>& step, long samples = 100000) {
    const FieldTable table(spec.beta(), spec.n());
    std::vector<long> c1(static_cast<std::size_t>(spec.n() + 1), 0);
    std::vector<long> c2(c1.size(), 0);
    for (long k = 0; k < samples; ++k) {
        CoupledChains c(spec, sigma, sigma_prime, 2024, static_cast<std::uint64_t>(k));
        step(c);
        ++c1[outcome(sigma, c.sigma(), spec)];
        ++c2[outcome(sigma_prime, c.sigma_prime(), spec)];
    }
    CHECK(fits(c1, glauber_row(sigma, spec, table), samples));
    CHECK(fits(c2, glauber_row(sigma_prime, spec, table), samples));
}

}  // namespace

TEST_CASE("cutoff time") {
    CHECK(cutoff_time(64, 0.5) == static_cast<long>(std::ceil(64 * std::log(64.0))));
    CHECK_THROWS_AS(cutoff_time(64, 0.0), ValidationError);
    CHECK_THROWS_AS(cutoff_time(64, -0.5), ValidationError);
}

TEST_CASE("modified matching examples") {
    const auto spec = PartitionSpec::make(parse_proportions("1/4,3/4"), 16, 1.0);
    const auto plus = SpinConfig::all_plus(spec);
    const auto minus = SpinConfig::all_minus(spec);
    const auto id = modified_matching(plus, minus);
    for (int i = 0; i < 2; ++i)
        for (int v = 0; v < spec.size(i); ++v) CHECK(id.f[i][v] == v);

    std::mt19937_64 gen(1);
    const auto a = testing_support::random_config(gen, spec);
    const auto same = modified_matching(a, a);
    for (int i = 0; i < 2; ++i)
        for (int v = 0; v < spec.size(i); ++v) CHECK(same.f[i][v] == v);
}

TEST_CASE("modified matching is a spin-respecting bijection (property)") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = testing_support::random_spec(gen, 1 + static_cast<int>(gen() % 3), 30 + static_cast<int>(gen() % 150), 1.0);
        const auto a = testing_support::random_config(gen, spec);
        auto b = testing_support::random_config(gen, spec);
        if (trial % 4 == 0) {
            // equal magnetizations: shuffle a's spins within each partition
            auto spins = a.to_spins();
            for (int i = 0; i < spec.m(); ++i)
                std::shuffle(spins.begin() + spec.offset(i), spins.begin() + spec.offset(i) + spec.size(i), gen);
            b = SpinConfig::from_spins(spec, spins);
        }
        const auto pair = modified_matching(a, b);
        for (int i = 0; i < spec.m(); ++i) {
            std::set<int> image(pair.f[i].begin(), pair.f[i].end());
            REQUIRE(image.size() == static_cast<std::size_t>(spec.size(i)));
            REQUIRE(*image.begin() == 0);
            REQUIRE(*image.rbegin() == spec.size(i) - 1);
            int agree_plus = 0;
            for (int v = 0; v < spec.size(i); ++v) {
                REQUIRE(matched_site(a, b, i, v) == pair.f[i][v]);
                if (a.spin(i, v) > 0 && b.spin(i, pair.f[i][v]) > 0) ++agree_plus;
            }
            REQUIRE(agree_plus == std::min(a.plus_count(i), b.plus_count(i)));
            if (a.plus_count(i) == b.plus_count(i))
                for (int v = 0; v < spec.size(i); ++v) REQUIRE(a.spin(i, v) == b.spin(i, pair.f[i][v]));
        }
    }
}

TEST_CASE("modified monotone update") {
    const auto spec = PartitionSpec::uniform(2, 20, 1.5);
    const FieldTable table(spec.beta(), spec.n());
    const std::vector<int> u1{3, 4}, u2{8, 9};
    const auto sigma = SpinConfig::with_counts(spec, u1);
    const auto sigma_prime = SpinConfig::with_counts(spec, u2);
    const Site site{0, 5};
    const int image = matched_site(sigma, sigma_prime, 0, 5);
    const double f = sigma.field_numerator(0) / 20.0;
    const double fp = sigma_prime.field_numerator(0) / 20.0;
    const double expected = 0.5 * std::abs(std::tanh(1.5 * f) - std::tanh(1.5 * fp));
    REQUIRE(expected > 0.01);

    StreamRng rng(5, 0);
    const long trials = 200000;
    long discord = 0;
    for (long k = 0; k < trials; ++k) {
        auto a = sigma;
        auto b = sigma_prime;
        modified_monotone_update(a, b, site, image, table, rng.uniform());
        discord += a.spin(site) != b.spin(0, image);
        REQUIRE((a.spin(site) <= b.spin(0, image)));  // smaller field never gets the larger spin
    }
    const double p = static_cast<double>(discord) / trials;
    CHECK(std::abs(p - expected) <= 4 * std::sqrt(expected * (1 - expected) / trials));

    // equal fields: identical outcomes; a coalesced pair stays coalesced
    auto a = sigma;
    auto b = sigma;
    MatchedPair pair = modified_matching(a, b);
    for (int k = 0; k < 2000; ++k) modified_monotone_step(pair, spec, table, draw_update(rng, spec.n()));
    CHECK(pair.sigma == pair.sigma_prime);
}

TEST_CASE("R drift identity and Theta-state lower bound") {
    std::mt19937_64 gen(44);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = uni(20, 400);
        const int N = uni(4, n);
        const int tu = uni(0, N);
        const int tv = N - tu;
        const int U = uni(0, tu);
        const int V = uni(0, tv);
        const int r_lo = std::max(-U, -V);
        const int r_hi = std::min(tu - U, tv - V);
        const int R = uni(r_lo, r_hi);
        const double rp = unit(gen);
        const double a = r_down_rate(U, V, R, tu, tv, n, rp);
        const double b = r_up_rate(U, V, R, tu, tv, n, rp);
        INFO(U << " " << V << " " << R << " " << tu << " " << tv << " " << n);
        REQUIRE(std::abs((b - a) + static_cast<double>(R) / n) <= 1e-14);
        REQUIRE(a >= 0.0);
        REQUIRE(b >= 0.0);
    }
    int theta_states = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto p = testing_support::random_proportions(gen, 2 + uni(0, 2));
        const int n = testing_support::compatible_n(p, 320);
        const int i = uni(0, static_cast<int>(p.size()) - 1);
        const int N = static_cast<int>(n * p[i].value() + 0.5);
        const int tu = uni((N + 3) / 4, 3 * N / 4);
        const int tv = N - tu;
        const int q = (N + 15) / 16;
        if (tu - 2 * q < 0 || tv - 2 * q < 0) continue;
        const int U = uni(q, tu - q);
        const int V = uni(q, tv - q);
        const int r_lo = std::max(q - U, q - V);
        const int r_hi = std::min(tu - q - U, tv - q - V);
        if (r_lo > r_hi) continue;
        const int R = uni(r_lo, r_hi);
        const double b = r_up_rate(U, V, R, tu, tv, n, unit(gen));
        const double p1 = p.front().value();
        REQUIRE(b >= p1 / 352);
        ++theta_states;
    }
    CHECK(theta_states > 500);
}

TEST_CASE("coupling marginals follow Glauber dynamics") {
    const auto spec = PartitionSpec::make(parse_proportions("1/5,4/5"), 10, 1.3);
    const std::vector<int> lo{0, 2}, hi{2, 7};
    const auto low = SpinConfig::with_counts(spec, lo);
    const auto high = SpinConfig::with_counts(spec, hi);
    SECTION("monotone") { check_marginals(spec, low, high, [](CoupledChains& c) { c.monotone_step(); }); }
    SECTION("split, with partitions on both sides") {
        const std::vector<int> near{1, 2};
        check_marginals(spec, low, SpinConfig::with_counts(spec, near), [](CoupledChains& c) { c.split_step(); });
    }
    SECTION("matched") {
        std::mt19937_64 gen(3);
        const auto a = testing_support::random_config(gen, spec);
        const auto b = testing_support::random_config(gen, spec);
        check_marginals(spec, a, b, [](CoupledChains& c) {
            c.freeze_matching();
            c.matched_step();
        });
    }
    SECTION("post-magnetization") {
        const auto reference = CoordRef::balanced(spec).configuration(spec);
        // same counts, different placement; partition 0 has R = 0, partition 1 not
        std::vector<int> s1{1, -1, 1, -1, 1, 1, -1, -1, 1, 1};
        std::vector<int> s2{1, -1, -1, 1, 1, -1, 1, 1, 1, -1};
        const auto a = SpinConfig::from_spins(spec, s1);
        const auto b = SpinConfig::from_spins(spec, s2);
        REQUIRE(a.plus_counts() == b.plus_counts());
        check_marginals(spec, a, b, [&](CoupledChains& c) { c.post_mag_step(reference); });
    }
}

TEST_CASE("phase-two distance is a supermartingale") {
    const auto spec = PartitionSpec::make(parse_proportions("1/4,3/4"), 64, 1.0);
    const auto sd = perron(spec);
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = testing_support::random_config(gen, spec);
        const auto b = testing_support::random_config(gen, spec);
        auto ytot = [&](const SpinConfig& x, const SpinConfig& y) {
            double s = 0.0;
            for (int i = 0; i < 2; ++i) s += sd.a[i] * std::abs(x.plus_count(i) - y.plus_count(i));
            return s;
        };
        const double y0 = ytot(a, b);
        const long samples = 40000;
        double sum = 0.0, sum2 = 0.0;
        for (long k = 0; k < samples; ++k) {
            CoupledChains c(spec, a, b, 31, static_cast<std::uint64_t>(k));
            c.split_step();
            const double y = ytot(c.sigma(), c.sigma_prime());
            sum += y;
            sum2 += y * y;
        }
        const double mean = sum / samples;
        const double se = std::sqrt(std::max(0.0, sum2 / samples - mean * mean) / samples);
        CHECK(mean <= sd.g * y0 + 4 * se);
    }
}

TEST_CASE("coupling runs") {
    const auto spec = PartitionSpec::uniform(2, 64, 1.0);
    const auto sd = perron(spec);
    const auto ref = CoordRef::balanced(spec).configuration(spec);
    const auto plus = SpinConfig::all_plus(spec);

    const auto same = mag_coupling_run(plus, plus, spec, sd, 1000, 1);
    CHECK(same.tau_mag == 0L);
    const auto zero = post_mag_coupling_run(ref, ref, ref, spec, 1000, 1);
    for (const auto& t : zero.tau_i_c) CHECK(t == 0L);
    CHECK(zero.tau_tot == 0L);
    CHECK_THROWS_AS(post_mag_coupling_run(ref, plus, ref, spec, 10, 1), ValidationError);

    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = testing_support::random_config(gen, spec);
        auto spins = a.to_spins();
        for (int i = 0; i < 2; ++i)
            std::shuffle(spins.begin() + spec.offset(i), spins.begin() + spec.offset(i) + spec.size(i), gen);
        const auto b = SpinConfig::from_spins(spec, spins);
        // the runner asserts S_t = S'_t and frozen pairs at every step
        const auto rec = post_mag_coupling_run(a, b, ref, spec, 200000, trial);
        REQUIRE(rec.tau_tot.has_value());
        long last = 0;
        for (const auto& t : rec.tau_i_c) last = std::max(last, *t);
        REQUIRE(*rec.tau_tot == last);
    }

    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto rec = full_coupling_run(ref, plus, ref, spec, sd, 100000, 77, s);
        REQUIRE(rec.t_n == cutoff_time(64, sd.upsilon));
        REQUIRE(rec.tau_mag.has_value());
        REQUIRE(rec.tau_tot.has_value());
        REQUIRE(*rec.tau_mag <= *rec.tau_tot);
        if (rec.tau_phase2) REQUIRE(*rec.tau_phase2 >= rec.t_n);
        const auto again = full_coupling_run(ref, plus, ref, spec, sd, 100000, 77, s);
        REQUIRE(again.tau_tot == rec.tau_tot);
    }

    const auto censored = full_coupling_run(ref, plus, ref, spec, sd, 10, 77, 0);
    CHECK(censored.censored());
}

TEST_CASE("tail curve") {
    const std::vector<std::optional<long>> taus{5L, 10L, std::nullopt, 0L};
    const std::vector<long> grid{0, 5, 10, 20};
    const auto tail = tail_curve(taus, grid, 20);
    CHECK(tail[0].p_tail == 0.75);
    CHECK(tail[1].p_tail == 0.5);
    CHECK(tail[2].p_tail == 0.25);
    CHECK(tail[3].p_tail == 0.25);
    CHECK(tail[3].ci.lo <= 0.25);
    CHECK(tail[3].ci.hi >= 0.25);
    CHECK_THROWS_AS(tail_curve(taus, std::vector<long>{30}, 20), ValidationError);
}

TEST_CASE("upper bound curve is deterministic across thread counts") {
    const auto spec = PartitionSpec::uniform(2, 32, 1.0);
    const auto sd = perron(spec);
    const long tn = cutoff_time(32, sd.upsilon);
    const std::vector<long> grid{tn / 2, tn, tn + 10 * 32, 100000};
    const auto r1 = upper_bound_curve(spec, sd, grid, 200, 5, 100000, 1);
    const auto r4 = upper_bound_curve(spec, sd, grid, 200, 5, 100000, 4);
    for (std::size_t k = 0; k < r1.records.size(); ++k) REQUIRE(r1.records[k].tau_tot == r4.records[k].tau_tot);
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(r1.tail[k].p_tail <= r1.tail[k - 1].p_tail);
    CHECK(r1.tail.back().p_tail == 0.0);
    CHECK(r1.tail.front().p_tail > 0.5);
}
