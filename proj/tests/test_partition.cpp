#include <catch_amalgamated.hpp>

#include <random>

#include "mpising/errors.hpp"
#include "mpising/partition.hpp"
#include "support.hpp"

using namespace mpising;

TEST_CASE("rational parsing and normalization") {
    CHECK(Rational::parse("2/4") == Rational(1, 2));
    CHECK(Rational::parse(" 0.25 ") == Rational(1, 4));
    CHECK(Rational::parse("1") == Rational(1, 1));
    CHECK(Rational::parse("3/12").str() == "1/4");
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 4) < Rational(1, 3));
    CHECK_THROWS_AS(Rational::parse("1/0"), ValidationError);
    CHECK_THROWS_AS(Rational::parse("x"), ValidationError);
    CHECK_THROWS_AS(Rational::parse(""), ValidationError);
}

TEST_CASE("spec validation names the violated invariant") {
    auto message = [](auto&& fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK_THAT(message([] { PartitionSpec::make(parse_proportions("1/3,1/2"), 6, 1.0); }),
               Catch::Matchers::ContainsSubstring("sum to 1"));
    CHECK_THAT(message([] { PartitionSpec::make(parse_proportions("3/4,1/4"), 8, 1.0); }),
               Catch::Matchers::ContainsSubstring("sorted"));
    CHECK_THAT(message([] { PartitionSpec::make(parse_proportions("1/4,3/4"), 6, 1.0); }),
               Catch::Matchers::ContainsSubstring("n*p_i"));
    CHECK_THAT(message([] { PartitionSpec::make(parse_proportions("1/2,1/2"), 4, -1.0); }),
               Catch::Matchers::ContainsSubstring("beta"));
    CHECK_THAT(message([] { PartitionSpec::make(parse_proportions("0,1"), 4, 1.0); }),
               Catch::Matchers::ContainsSubstring("> 0"));
    CHECK_THAT(message([] { PartitionSpec::make(parse_proportions("1/2,1/2"), 0, 1.0); }),
               Catch::Matchers::ContainsSubstring("n must"));
}

TEST_CASE("sizes, offsets and site addressing") {
    const auto spec = PartitionSpec::make(parse_proportions("1/4,1/4,1/2"), 8, 2.0);
    CHECK(spec.sizes() == std::vector<int>{2, 2, 4});
    CHECK(spec.offset(2) == 4);
    CHECK(spec.locate(5).part == 2);
    CHECK(spec.locate(5).local == 1);
    CHECK(spec.with_n(16).size(2) == 8);
    CHECK(spec.with_beta(0.5).beta() == 0.5);
    CHECK_THROWS_AS(spec.with_n(6), ValidationError);
}

TEST_CASE("locate and global are inverse (property)") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(gen() % 4);
        const auto spec = testing_support::random_spec(gen, m, 10, 1.0);
        int total = 0;
        for (int i = 0; i < spec.m(); ++i) total += spec.size(i);
        REQUIRE(total == spec.n());
        for (int v = 0; v < spec.n(); ++v) {
            const Site s = spec.locate(v);
            REQUIRE(s.local >= 0);
            REQUIRE(s.local < spec.size(s.part));
            REQUIRE(spec.global(s) == v);
        }
    }
}
