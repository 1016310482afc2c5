#pragma once

#include <span>
#include <vector>

#include "mpising/lumped.hpp"

namespace mpising {

/// Exact magnetization chain: the state is the vector u of per-partition
/// plus counts, with S_i = (2 u_i - n p_i) / n.
class MagChain : public LumpedChain {
public:
    explicit MagChain(const PartitionSpec& spec, std::size_t cap = kDefaultStateCap);

    std::vector<int> all_plus() const { return spec().sizes(); }
    std::vector<int> all_minus() const { return std::vector<int>(static_cast<std::size_t>(spec().m()), 0); }
    /// u_i -> n p_i - u_i.
    std::vector<int> mirror(std::span<const int> u) const;

    /// (1/n)(-S_i + p_i tanh(beta sum_{j != i} S_j)).
    std::vector<double> drift(std::span<const int> u) const;
    /// sum_y P(u, y)(S_i(y) - S_i(u)), from the kernel rows.
    std::vector<double> kernel_drift(std::span<const int> u) const;

    struct VariancePoint {
        long t = 0;
        double sum_var = 0.0;
        double n_sum_var = 0.0;
    };
    std::vector<VariancePoint> variance_trajectory(std::span<const int> start, std::span<const long> t_grid) const;
};

/// Proxy for d(t): the max of the exact TV curves from all-plus, all-minus
/// and the mixed extremes that put one partition at each end.
std::vector<std::pair<long, double>> extreme_start_tv(const MagChain& chain, std::span<const long> t_grid);

}  // namespace mpising
