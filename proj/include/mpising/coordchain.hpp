#pragma once

#include <span>
#include <vector>

#include "mpising/lumped.hpp"
#include "mpising/spin_config.hpp"

namespace mpising {

/// Plus/minus counts of a reference configuration, per partition.
struct CoordRef {
    std::vector<int> tilde_u;
    std::vector<int> tilde_v;

    /// tilde_u_i = ceil(n p_i / 2), the most balanced reference.
    static CoordRef balanced(const PartitionSpec& spec);
    static CoordRef all_plus(const PartitionSpec& spec);
    static CoordRef from_config(const SpinConfig& reference);

    /// |S_i| <= p_i / 2 for every i, i.e. min(tilde_u_i, tilde_v_i) >= n p_i / 4.
    bool is_good() const;
    /// The reference configuration itself: first tilde_u_i sites of J_i are +1.
    SpinConfig configuration(const PartitionSpec& spec) const;
};

/// (U_1, V_1, ..., U_m, V_m) of sigma relative to the reference sigma~:
/// U_i counts sites where both are +1, V_i sites where both are -1.
std::vector<int> coord_state_of(const SpinConfig& sigma, const SpinConfig& reference);

/// Exact 2m-coordinate chain relative to a reference configuration.
class CoordChain : public LumpedChain {
public:
    CoordChain(const PartitionSpec& spec, CoordRef ref, std::size_t cap = kDefaultStateCap);

    const CoordRef& ref() const { return ref_; }
    /// The state of the reference configuration itself.
    std::vector<int> reference_state() const;

    /// Exact full-chain TV from the reference start; by lumping this is the
    /// TV of the 2^n-state chain started at sigma~.
    std::vector<std::pair<long, double>> exact_tv_full(std::span<const long> t_grid) const;

private:
    CoordRef ref_;
};

}  // namespace mpising
