#pragma once

// Hand-rolled generators for property tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "mpising/partition.hpp"
#include "mpising/spin_config.hpp"

namespace testing_support {

using mpising::PartitionSpec;
using mpising::Rational;

/// Sorted proportions w_i / sum(w) with integer weights in [1, max_weight].
inline std::vector<Rational> random_proportions(std::mt19937_64& gen, int m, int max_weight = 6) {
    std::uniform_int_distribution<int> w(1, max_weight);
    std::vector<int> weights(static_cast<std::size_t>(m));
    for (auto& x : weights) x = w(gen);
    std::sort(weights.begin(), weights.end());
    const int total = std::accumulate(weights.begin(), weights.end(), 0);
    std::vector<Rational> p;
    for (int x : weights) p.emplace_back(x, total);
    return p;
}

/// Smallest n >= min_n with every n p_i integral.
inline int compatible_n(const std::vector<Rational>& p, int min_n) {
    std::int64_t l = 1;
    for (const auto& r : p) l = std::lcm(l, r.den());
    const auto k = (min_n + l - 1) / l;
    return static_cast<int>(std::max<std::int64_t>(1, k) * l);
}

inline PartitionSpec random_spec(std::mt19937_64& gen, int m, int min_n, double beta) {
    auto p = random_proportions(gen, m);
    const int n = compatible_n(p, min_n);
    return PartitionSpec::make(p, n, beta);
}

inline std::vector<int> random_spins(std::mt19937_64& gen, int n) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (auto& x : s) x = (gen() & 1) ? 1 : -1;
    return s;
}

inline mpising::SpinConfig random_config(std::mt19937_64& gen, const PartitionSpec& spec) {
    return mpising::SpinConfig::from_spins(spec, random_spins(gen, spec.n()));
}

/// Uniform plus counts u_i in [0, n p_i].
inline std::vector<int> random_counts(std::mt19937_64& gen, const PartitionSpec& spec) {
    std::vector<int> u;
    for (int i = 0; i < spec.m(); ++i) u.push_back(std::uniform_int_distribution<int>(0, spec.size(i))(gen));
    return u;
}

}  // namespace testing_support
