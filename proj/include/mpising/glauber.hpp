#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mpising/partition.hpp"
#include "mpising/rng.hpp"
#include "mpising/spin_config.hpp"

namespace mpising {

/// Site I uniform over V and threshold U uniform on [0, 1), independent.
struct UpdateRandomness {
    int site = 0;
    double u = 0.0;
};

UpdateRandomness draw_update(StreamRng& rng, int n);

/// Heat-bath decision: +1 iff u < r_+(field); ties go to -1.
inline int heat_bath_spin(const FieldTable& table, int field_numerator, double u) {
    return u < table.r_plus(field_numerator) ? 1 : -1;
}

void glauber_step(SpinConfig& cfg, const PartitionSpec& spec, const FieldTable& table, const UpdateRandomness& rnd);

/// Applies the same (I, U) to every configuration.
void grand_coupling_step(std::span<SpinConfig> cfgs, const PartitionSpec& spec, const FieldTable& table,
                         const UpdateRandomness& rnd);

/// dist_i = number of sites of J_i where the configurations differ.
std::vector<int> hamming_profile(const SpinConfig& a, const SpinConfig& b);

/// sum_i w_i dist_i.
double weighted_distance(std::span<const int> profile, std::span<const double> w);

struct ReplicaOptions {
    long t_max = 0;
    int replicas = 1;
    std::uint64_t seed = 0;
    long stride = 1;
    /// Refuse runs with n * t_max * replicas above this.
    double work_cap = 1e12;
    unsigned threads = 0;
};

struct TrajectoryRow {
    int replica = 0;
    long t = 0;
    std::vector<double> s;  ///< magnetizations of the first chain
    double dist_w = 0.0;    ///< sum_i a_i dist_i for paired runs
};

struct ReplicaRun {
    bool paired = false;
    int m = 0;
    std::vector<TrajectoryRow> rows;  ///< replica-major, then time
};

/// Replica r uses StreamRng(seed, r), so its path depends only on (seed, r).
/// With a partner start the two chains follow the grand coupling and rows
/// carry the a-weighted Hamming distance.
ReplicaRun run_replicas(const PartitionSpec& spec, const SpinConfig& start, const SpinConfig* partner,
                        std::span<const double> a, const ReplicaOptions& opts);

/// Columns replica,t,S_1..S_m[,dist_w].
void write_trajectory_csv(std::ostream& os, const ReplicaRun& run);

}  // namespace mpising
