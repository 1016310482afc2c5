#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mpising/coordchain.hpp"
#include "mpising/glauber.hpp"
#include "mpising/rng.hpp"
#include "mpising/spectral.hpp"
#include "mpising/spin_config.hpp"
#include "mpising/stats.hpp"

namespace mpising {

/// t_n = ceil(n ln n / (2 upsilon)). Requires upsilon > 0.
long cutoff_time(int n, double upsilon);

/// Image under the modified matching of sigma onto sigma' of local site
/// `local` of partition `part`. Plus sites go to plus sites and minus sites
/// to minus sites in index order; the excess sites of the partition with more
/// of one spin are paired in index order as well.
int matched_site(const SpinConfig& sigma, const SpinConfig& sigma_prime, int part, int local);

/// A pair of configurations with a fixed per-partition bijection f.
struct MatchedPair {
    SpinConfig sigma;
    SpinConfig sigma_prime;
    std::vector<std::vector<int>> f;  ///< f[part][local of sigma] = local of sigma'
};

MatchedPair modified_matching(const SpinConfig& sigma, const SpinConfig& sigma_prime);

/// Site I of sigma and its image of sigma' both use threshold u against
/// their own field. With F <= F' the outcomes are (+,+), (-,+), (-,-) as u
/// crosses r_+(F) and r_+(F'); the mirrored split applies when F > F'.
void modified_monotone_update(SpinConfig& sigma, SpinConfig& sigma_prime, Site site, int image,
                              const FieldTable& table, double u);

/// One modified monotone step with respect to the pair's fixed matching.
void modified_monotone_step(MatchedPair& pair, const PartitionSpec& spec, const FieldTable& table,
                            const UpdateRandomness& rnd);

/// Probabilities that R = U' - U drops (a) or rises (b) in one step of the
/// post-magnetization coupling, for one partition with reference counts
/// (tilde_u, tilde_v), state (U, V), offset R and heat-bath rate r_plus of
/// the common field. Terms with an empty conditioning class are zero.
double r_down_rate(int U, int V, int R, int tilde_u, int tilde_v, int n, double r_plus);
double r_up_rate(int U, int V, int R, int tilde_u, int tilde_v, int n, double r_plus);

/// Two coupled Glauber chains with one RNG stream. Each step method is one
/// time step of the named coupling.
class CoupledChains {
public:
    CoupledChains(const PartitionSpec& spec, SpinConfig sigma, SpinConfig sigma_prime, std::uint64_t seed,
                  std::uint64_t stream);

    const SpinConfig& sigma() const { return sigma_; }
    const SpinConfig& sigma_prime() const { return sigma_prime_; }
    long time() const { return t_; }

    bool magnetizations_equal() const { return sigma_.plus_counts() == sigma_prime_.plus_counts(); }
    /// max_i |u_i - u'_i| <= 1, i.e. max_i Y_i / a_i <= 1.
    bool counts_within_one() const;

    /// Shared (I, U) for both chains.
    void monotone_step();
    /// Partitions with |u_i - u'_i| <= 1 get the modified monotone update
    /// under the current matching; otherwise sigma takes its own step at I and
    /// sigma' updates an independent uniform site of the same partitions.
    void split_step();
    /// Fixes the modified matching of the current pair.
    void freeze_matching();
    /// Modified monotone step with the matching fixed by freeze_matching.
    void matched_step();
    /// Requires equal magnetizations. Partitions where the coordinates
    /// relative to `reference` already agree keep agreeing via a
    /// class-preserving matching; the others move I' uniformly among the
    /// sites of sigma' carrying sigma(I)'s spin and copy sigma's new spin.
    void post_mag_step(const SpinConfig& reference);

    /// R_i = U'_i - U_i relative to `reference`.
    std::vector<int> offsets(const SpinConfig& reference) const;

private:
    PartitionSpec spec_;
    FieldTable table_;
    SpinConfig sigma_;
    SpinConfig sigma_prime_;
    StreamRng rng_;
    std::vector<std::vector<int>> frozen_f_;
    long t_ = 0;
};

struct CouplingRecord {
    long t_n = 0;
    std::optional<long> tau_phase2;            ///< end of the split phase
    std::optional<long> tau_mag;               ///< first time S_t = S'_t
    std::vector<std::optional<long>> tau_i_c;  ///< per-partition coordinate agreement
    std::optional<long> tau_tot;               ///< all coordinates agree
    bool below_critical = true;                ///< false: beta >= beta_cr, schedule has no guarantee

    bool censored() const { return !tau_tot; }
};

/// Three-phase magnetization coupling run up to tau_mag (or t_max).
CouplingRecord mag_coupling_run(const SpinConfig& sigma, const SpinConfig& sigma_prime, const PartitionSpec& spec,
                                const SpectralData& sd, long t_max, std::uint64_t seed, std::uint64_t stream = 0);

/// Post-magnetization coupling from equal magnetizations up to tau_tot.
CouplingRecord post_mag_coupling_run(const SpinConfig& sigma0, const SpinConfig& sigma0_prime,
                                     const SpinConfig& reference, const PartitionSpec& spec, long t_max,
                                     std::uint64_t seed, std::uint64_t stream = 0);

/// Magnetization coupling followed, from tau_mag on, by the
/// post-magnetization coupling relative to `reference`.
CouplingRecord full_coupling_run(const SpinConfig& sigma, const SpinConfig& sigma_prime, const SpinConfig& reference,
                                 const PartitionSpec& spec, const SpectralData& sd, long t_max, std::uint64_t seed,
                                 std::uint64_t stream = 0);

struct TailPoint {
    long t = 0;
    double p_tail = 0.0;
    Interval ci;
};

/// Empirical P(tau > t) over records; censored records count as exceeding
/// any t <= t_max. Throws when some t exceeds t_max.
std::vector<TailPoint> tail_curve(std::span<const std::optional<long>> taus, std::span<const long> t_grid, long t_max);

struct UpperBoundResult {
    std::vector<CouplingRecord> records;
    std::vector<TailPoint> tail;  ///< of tau_tot
};

/// Replica r runs full_coupling_run from (balanced reference, all-plus) on
/// stream r.
UpperBoundResult upper_bound_curve(const PartitionSpec& spec, const SpectralData& sd, std::span<const long> t_grid,
                                   int replicas, std::uint64_t seed, long t_max, unsigned threads = 0);

}  // namespace mpising
