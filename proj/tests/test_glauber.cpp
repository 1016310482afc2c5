#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "mpising/glauber.hpp"
#include "mpising/magchain.hpp"
#include "mpising/partition.hpp"
#include "mpising/spectral.hpp"
#include "support.hpp"

using namespace mpising;

TEST_CASE("heat-bath threshold rule") {
    const FieldTable t(1.0, 10);
    const double r = t.r_plus(4);
    CHECK(heat_bath_spin(t, 4, r - 1e-12) == 1);
    CHECK(heat_bath_spin(t, 4, r) == -1);
    CHECK(heat_bath_spin(t, 4, 0.0) == 1);
    const FieldTable zero(0.0, 10);
    CHECK(heat_bath_spin(zero, 7, 0.49) == 1);
    CHECK(heat_bath_spin(zero, 7, 0.5) == -1);
}

TEST_CASE("glauber step touches only the chosen site") {
    const auto spec = PartitionSpec::make(parse_proportions("1/2,1/2"), 8, 1.0);
    const FieldTable table(spec.beta(), spec.n());
    auto c = SpinConfig::all_plus(spec);
    glauber_step(c, spec, table, {5, 0.999999});
    CHECK(c.spin(1, 1) == -1);
    CHECK(c.plus_counts() == std::vector<int>{4, 3});
    glauber_step(c, spec, table, {5, 0.0});
    CHECK(c == SpinConfig::all_plus(spec));
}

TEST_CASE("grand coupling preserves order (property)") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto spec = testing_support::random_spec(gen, 1 + static_cast<int>(gen() % 3), 40, 3.0 * unit(gen));
        const FieldTable table(spec.beta(), spec.n());
        auto lo = testing_support::random_config(gen, spec);
        auto hi = lo;
        for (int v = 0; v < spec.n(); ++v)
            if (gen() % 3 == 0) hi.set_spin(spec.locate(v), 1);
        std::vector<SpinConfig> pair{lo, hi};
        for (int step = 0; step < 2000; ++step) {
            grand_coupling_step(pair, spec, table, {static_cast<int>(gen() % spec.n()), unit(gen)});
            REQUIRE(dominated_by(pair[0], pair[1]));
        }
    }
}

TEST_CASE("hamming profile and weighted distance") {
    const auto spec = PartitionSpec::make(parse_proportions("1/4,3/4"), 8, 1.0);
    const auto a = SpinConfig::all_plus(spec);
    const std::vector<int> u{1, 3};
    const auto b = SpinConfig::with_counts(spec, u);
    const auto prof = hamming_profile(a, b);
    CHECK(prof == std::vector<int>{1, 3});
    const std::vector<double> w{0.5, 0.25};
    CHECK(weighted_distance(prof, w) == Catch::Approx(1.25));
}

TEST_CASE("replicas are deterministic and thread-independent") {
    const auto spec = PartitionSpec::make(parse_proportions("1/4,3/4"), 40, 1.0);
    const auto sd = perron(spec);
    const auto plus = SpinConfig::all_plus(spec);
    const auto minus = SpinConfig::all_minus(spec);
    ReplicaOptions o;
    o.t_max = 500;
    o.replicas = 8;
    o.seed = 99;
    o.stride = 50;
    o.threads = 1;
    const auto r1 = run_replicas(spec, plus, &minus, sd.a, o);
    o.threads = 4;
    const auto r2 = run_replicas(spec, plus, &minus, sd.a, o);
    std::ostringstream s1, s2;
    write_trajectory_csv(s1, r1);
    write_trajectory_csv(s2, r2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().rfind("replica,t,S_1,S_2,dist_w", 0) == 0);
    CHECK(r1.rows.size() == 8u * 11u);
    o.seed = 100;
    std::ostringstream s3;
    write_trajectory_csv(s3, run_replicas(spec, plus, &minus, sd.a, o));
    CHECK(s3.str() != s1.str());

    o.work_cap = 1000;
    CHECK_THROWS(run_replicas(spec, plus, nullptr, sd.a, o));
}

TEST_CASE("beta = 0 mean magnetization decays geometrically") {
    const auto spec = PartitionSpec::uniform(2, 100, 0.0);
    ReplicaOptions o;
    o.t_max = 100;
    o.replicas = 4000;
    o.seed = 1;
    o.stride = 100;
    const auto run = run_replicas(spec, SpinConfig::all_plus(spec), nullptr, {}, o);
    double sum = 0.0, sum2 = 0.0;
    int count = 0;
    for (const auto& row : run.rows) {
        if (row.t != 100) continue;
        const double s = row.s[0] + row.s[1];
        sum += s;
        sum2 += s * s;
        ++count;
    }
    REQUIRE(count == 4000);
    const double mean = sum / count;
    const double se = std::sqrt((sum2 / count - mean * mean) / count);
    const double expected = std::pow(1.0 - 1.0 / 100, 100);
    CHECK(std::abs(mean - expected) <= 4 * se);
}

TEST_CASE("paired distance contracts at rate g") {
    const auto spec = PartitionSpec::make(parse_proportions("1/4,3/4"), 80, 1.0);
    const auto sd = perron(spec);
    const auto plus = SpinConfig::all_plus(spec);
    const auto minus = SpinConfig::all_minus(spec);
    ReplicaOptions o;
    o.t_max = 200;
    o.replicas = 2000;
    o.seed = 4;
    o.stride = 200;
    const auto run = run_replicas(spec, plus, &minus, sd.a, o);
    double d0 = 0.0, sum = 0.0, sum2 = 0.0;
    int count = 0;
    for (const auto& row : run.rows) {
        if (row.t == 0) d0 = row.dist_w;
        if (row.t != 200) continue;
        sum += row.dist_w;
        sum2 += row.dist_w * row.dist_w;
        ++count;
    }
    const double mean = sum / count;
    const double se = std::sqrt((sum2 / count - mean * mean) / count);
    CHECK(d0 == Catch::Approx(20 * sd.a[0] + 60 * sd.a[1]));
    CHECK(mean <= std::pow(sd.g, 200) * d0 + 4 * se);
}

TEST_CASE("one-step conditional mean matches the drift") {
    const auto spec = PartitionSpec::make(parse_proportions("1/4,3/4"), 40, 1.5);
    const MagChain chain(spec);
    const FieldTable table(spec.beta(), spec.n());
    const std::vector<int> u{7, 12};
    const auto start = SpinConfig::with_counts(spec, u);
    const auto drift = chain.drift(u);
    StreamRng rng(12, 0);
    const int trials = 400000;
    std::vector<double> sum(2, 0.0), sum2(2, 0.0);
    for (int k = 0; k < trials; ++k) {
        auto c = start;
        glauber_step(c, spec, table, draw_update(rng, spec.n()));
        for (int i = 0; i < 2; ++i) {
            const double d = c.magnetization(i) - start.magnetization(i);
            sum[i] += d;
            sum2[i] += d * d;
        }
    }
    for (int i = 0; i < 2; ++i) {
        const double mean = sum[i] / trials;
        const double se = std::sqrt((sum2[i] / trials - mean * mean) / trials);
        CHECK(std::abs(mean - drift[i]) <= 4 * se);
    }
}

TEST_CASE("long run samples the lumped stationary law") {
    const auto spec = PartitionSpec::make(parse_proportions("1/5,4/5"), 10, 1.0);
    const MagChain chain(spec);
    const auto pi = chain.stationary();
    const FieldTable table(spec.beta(), spec.n());
    auto c = SpinConfig::all_plus(spec);
    StreamRng rng(77, 0);
    const int samples = 100000;
    const int thin = 100;
    DistVector hist(pi.size(), 0.0);
    for (int t = 0; t < 1000; ++t) glauber_step(c, spec, table, draw_update(rng, spec.n()));
    for (int s = 0; s < samples; ++s) {
        for (int t = 0; t < thin; ++t) glauber_step(c, spec, table, draw_update(rng, spec.n()));
        hist[chain.space().index(c.plus_counts())] += 1.0 / samples;
    }
    const double tv = total_variation(hist, pi);
    INFO("tv = " << tv);
    CHECK(tv <= 3.0 / std::sqrt(static_cast<double>(samples)));
}
