#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mpising/partition.hpp"
#include "mpising/spin_config.hpp"

namespace mpising {

/// Exact probability vector over a lumped state space, indexed by state.
using DistVector = std::vector<double>;

inline constexpr std::size_t kDefaultStateCap = 10'000'000;

/// Mixed-radix linearization of integer vectors x with 0 <= x_d < radix_d.
/// The first coordinate varies slowest.
class MixedRadix {
public:
    /// Throws ResourceError when the product of radices exceeds `cap`.
    MixedRadix(std::vector<int> radices, std::size_t cap);

    std::size_t size() const { return size_; }
    int dims() const { return static_cast<int>(radices_.size()); }
    int radix(int d) const { return radices_[d]; }
    std::size_t stride(int d) const { return strides_[d]; }

    std::size_t index(std::span<const int> x) const;
    void decode(std::size_t idx, std::span<int> out) const;
    std::vector<int> decode(std::size_t idx) const;

private:
    std::vector<int> radices_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

double total_variation(const DistVector& a, const DistVector& b);

/// One lumped coordinate: the number of sites of partition `part` in a class
/// of `capacity` sites. sign = +1 if the class holds +1 spins (increments use
/// r_+), -1 if it holds -1 spins (increments use r_-).
struct Coordinate {
    int part = 0;
    int capacity = 0;
    int sign = 1;
};

struct EvolveLog {
    long renormalizations = 0;
    double max_drift = 0.0;
};

/// Per-partition means and variances of S^(i).
struct Moments {
    std::vector<double> mean;
    std::vector<double> var;
};

/// Glauber dynamics lumped onto class counts. Both the magnetization chain
/// (one class per partition) and the 2m-coordinate chain (two classes per
/// partition) are instances.
///
/// Within a step the field felt by partition i excludes partition i, so it is
/// the same at a state and at any neighbour differing only in partition i.
/// The kernel is therefore applied as a pure gather per destination.
class LumpedChain {
public:
    LumpedChain(const PartitionSpec& spec, std::vector<Coordinate> coords, std::size_t cap = kDefaultStateCap);

    const PartitionSpec& spec() const { return spec_; }
    const MixedRadix& space() const { return space_; }
    const std::vector<Coordinate>& coordinates() const { return coords_; }
    const FieldTable& table() const { return table_; }

    /// n * S^(i) for every partition.
    std::vector<int> magnetization_numerators(std::span<const int> x) const;

    /// Holding entry first, then every move with positive probability.
    std::vector<std::pair<std::vector<int>, double>> transition_probs(std::span<const int> x) const;

    DistVector point_mass(std::span<const int> x) const;
    DistVector step(const DistVector& d) const;
    /// t exact kernel applications. Mass is checked every 1000 steps and
    /// renormalized (and logged) when it has drifted past 1e-12.
    DistVector evolve(DistVector d, long t, EvolveLog* log = nullptr) const;

    /// Normalized stationary law, computed in log space.
    DistVector stationary() const;
    /// ||d P - d||_1.
    double stationarity_residual(const DistVector& d) const;

    /// Exact TV to stationarity at each t of an ascending grid.
    std::vector<std::pair<long, double>> tv_curve(std::span<const int> start, std::span<const long> t_grid) const;
    std::vector<std::pair<long, double>> tv_curve(const DistVector& start, std::span<const long> t_grid) const;

    /// First t <= t_cap with TV(t) <= eps, for every eps (nullopt if not reached).
    std::vector<std::optional<long>> mixing_times(std::span<const int> start, std::span<const double> eps,
                                                  long t_cap) const;

    Moments moments(const DistVector& d) const;
    /// Mean and variance of sum_i c_i S^(i).
    std::pair<double, double> linear_moments(const DistVector& d, std::span<const double> c) const;

    /// Distribution of the per-partition plus counts u_i.
    DistVector project_to_counts(const DistVector& d, const MixedRadix& counts_space) const;

    std::vector<int> plus_counts(std::span<const int> x) const;

private:
    void check_state(std::span<const int> x) const;

    PartitionSpec spec_;
    std::vector<Coordinate> coords_;
    MixedRadix space_;
    FieldTable table_;
};

}  // namespace mpising
