#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mpising/partition.hpp"

namespace mpising {

/// Heat-bath rates r_+(x) = (1 + tanh(beta x))/2 tabulated on the field grid
/// x = k/n, k in [-n, n]. Every module that needs r_+ goes through this table
/// so that equal fields always produce bit-identical thresholds.
class FieldTable {
public:
    FieldTable(double beta, int n);

    /// r_+ at field k/n.
    double r_plus(int numerator) const { return plus_[static_cast<std::size_t>(numerator + n_)]; }
    /// r_- at field k/n.
    double r_minus(int numerator) const { return minus_[static_cast<std::size_t>(numerator + n_)]; }

    int n() const { return n_; }
    double beta() const { return beta_; }

private:
    double beta_;
    int n_;
    std::vector<double> plus_;
    std::vector<double> minus_;
};

/// Full +-1 configuration, one bit per site (set = +1), 64 sites per word per
/// partition, with cached plus counts so fields are O(m).
class SpinConfig {
public:
    static SpinConfig all_plus(const PartitionSpec& spec);
    static SpinConfig all_minus(const PartitionSpec& spec);
    /// The first counts[i] sites of each partition are +1, the rest -1.
    static SpinConfig with_counts(const PartitionSpec& spec, std::span<const int> counts);
    /// Global-site-indexed spins, each +1 or -1.
    static SpinConfig from_spins(const PartitionSpec& spec, std::span<const int> spins);

    int m() const { return static_cast<int>(sizes_.size()); }
    int n() const { return n_; }
    int size(int part) const { return sizes_[part]; }

    int spin(int part, int local) const { return (word(part, local) >> (local & 63)) & 1U ? 1 : -1; }
    int spin(Site s) const { return spin(s.part, s.local); }
    void set_spin(int part, int local, int value);
    void set_spin(Site s, int value) { set_spin(s.part, s.local, value); }

    int plus_count(int part) const { return plus_[part]; }
    const std::vector<int>& plus_counts() const { return plus_; }

    /// n * S^(i) = 2 u_i - |J_i|.
    int magnetization_numerator(int part) const { return 2 * plus_[part] - sizes_[part]; }
    double magnetization(int part) const { return static_cast<double>(magnetization_numerator(part)) / n_; }
    std::vector<double> magnetizations() const;

    /// n * sum_{j != part} S^(j), the integer numerator of the mean field felt
    /// by sites of `part`.
    int field_numerator(int part) const { return excess_ - magnetization_numerator(part); }

    /// Number of sites of `part` with the given spin and local index < local.
    int rank(int part, int local, int value) const;
    /// Local index of the k-th (0-based) site of `part` carrying `value`.
    int select(int part, int value, int k) const;

    /// Raw words of one partition; unused high bits of the last word are zero.
    std::span<const std::uint64_t> words(int part) const;
    int word_count(int part) const { return word_begin_[part + 1] - word_begin_[part]; }
    /// Mask of valid bits for word w of `part`.
    std::uint64_t valid_mask(int part, int w) const;

    std::vector<int> to_spins() const;

    friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

private:
    explicit SpinConfig(const PartitionSpec& spec);
    std::uint64_t word(int part, int local) const { return bits_[word_begin_[part] + (local >> 6)]; }

    std::vector<int> sizes_;
    std::vector<int> word_begin_;
    std::vector<std::uint64_t> bits_;
    std::vector<int> plus_;
    int n_ = 0;
    int excess_ = 0;
};

/// sigma <= tau site by site.
bool dominated_by(const SpinConfig& sigma, const SpinConfig& tau);

/// Local index of the k-th set bit across a sequence of words.
int select_in_words(std::span<const std::uint64_t> words, int k);

}  // namespace mpising
