#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mpising/lumped.hpp"
#include "mpising/partition.hpp"

namespace mpising {

/// Brute-force Glauber chain on all 2^n configurations (n <= 14). Spins and
/// fields come from explicit edge lists, independent of the lumped engines.
/// Bit v of a configuration index is set iff global site v is +1.
class FullChain {
public:
    explicit FullChain(const PartitionSpec& spec);

    const PartitionSpec& spec() const { return spec_; }
    std::size_t size() const { return std::size_t{1} << spec_.n(); }

    /// sum over edges {v, w} of sigma(v) sigma(w).
    long edge_energy(std::uint32_t sigma) const;
    /// Exact Gibbs law, proportional to exp((beta / n) * edge_energy).
    DistVector gibbs() const;
    /// The n*2 nonzero kernel entries of one row, unmerged.
    std::vector<std::pair<std::uint32_t, double>> row(std::uint32_t sigma) const;
    DistVector step(const DistVector& d) const;
    std::vector<std::pair<long, double>> tv_curve(std::uint32_t start, std::span<const long> t_grid) const;

    /// Per-partition plus counts.
    std::vector<int> counts(std::uint32_t sigma) const;
    /// Push a full distribution forward onto plus counts.
    DistVector lump(const DistVector& d, const MixedRadix& counts_space) const;
    /// Configuration whose first u_i sites of each partition are +1.
    std::uint32_t representative(std::span<const int> u) const;

    /// Conductance of {sum S > 0}: outgoing stationary flow over its mass.
    double conductance() const;

private:
    PartitionSpec spec_;
    std::vector<std::vector<int>> neighbours_;
    std::vector<int> part_of_;
};

}  // namespace mpising
