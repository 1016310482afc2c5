#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mpising {

/// Exact non-negative rational, always stored in lowest terms.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den);

    static Rational parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend Rational operator+(Rational a, Rational b);
    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// A vertex of the graph, addressed by partition and position inside it.
struct Site {
    int part = 0;
    int local = 0;
};

/// Complete multipartite graph K_{np_1,...,np_m} together with the inverse
/// temperature. Proportions are exact, sum to one, are sorted non-decreasing,
/// and every n*p_i is a positive integer.
class PartitionSpec {
public:
    /// Validates every invariant; throws ValidationError naming the first
    /// violated one.
    static PartitionSpec make(std::vector<Rational> p, int n, double beta);

    /// Equal proportions 1/m.
    static PartitionSpec uniform(int m, int n, double beta);

    int m() const { return static_cast<int>(p_.size()); }
    int n() const { return n_; }
    double beta() const { return beta_; }

    const std::vector<Rational>& proportions() const { return p_; }
    const std::vector<double>& p() const { return p_double_; }
    double p(int part) const { return p_double_[part]; }

    /// |J_i| = n * p_i.
    int size(int part) const { return sizes_[part]; }
    const std::vector<int>& sizes() const { return sizes_; }

    /// Global index of the first site of partition `part`.
    int offset(int part) const { return offsets_[part]; }
    Site locate(int site) const;
    int global(Site s) const { return offsets_[s.part] + s.local; }

    PartitionSpec with_n(int n) const { return make(p_, n, beta_); }
    PartitionSpec with_beta(double beta) const { return make(p_, n_, beta); }

    std::string describe() const;

private:
    PartitionSpec() = default;

    std::vector<Rational> p_;
    std::vector<double> p_double_;
    std::vector<int> sizes_;
    std::vector<int> offsets_;
    int n_ = 0;
    double beta_ = 0.0;
};

/// Parses "1/4,3/4" or "0.25,0.75" style lists.
std::vector<Rational> parse_proportions(std::string_view text);

}  // namespace mpising
