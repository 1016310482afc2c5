#include "mpising/glauber.hpp"

#include <bit>
#include <ostream>
#include <string>

#include "mpising/errors.hpp"
#include "mpising/parallel.hpp"

namespace mpising {

UpdateRandomness draw_update(StreamRng& rng, int n) {
    UpdateRandomness r;
    r.site = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    r.u = rng.uniform();
    return r;
}

void glauber_step(SpinConfig& cfg, const PartitionSpec& spec, const FieldTable& table, const UpdateRandomness& rnd) {
    const Site s = spec.locate(rnd.site);
    cfg.set_spin(s, heat_bath_spin(table, cfg.field_numerator(s.part), rnd.u));
}

void grand_coupling_step(std::span<SpinConfig> cfgs, const PartitionSpec& spec, const FieldTable& table,
                         const UpdateRandomness& rnd) {
    const Site s = spec.locate(rnd.site);
    for (auto& c : cfgs) c.set_spin(s, heat_bath_spin(table, c.field_numerator(s.part), rnd.u));
}

std::vector<int> hamming_profile(const SpinConfig& a, const SpinConfig& b) {
    std::vector<int> out;
    for (int i = 0; i < a.m(); ++i) {
        const auto wa = a.words(i);
        const auto wb = b.words(i);
        int d = 0;
        for (std::size_t w = 0; w < wa.size(); ++w) d += std::popcount(wa[w] ^ wb[w]);
        out.push_back(d);
    }
    return out;
}

double weighted_distance(std::span<const int> profile, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) s += w[i] * profile[i];
    return s;
}

ReplicaRun run_replicas(const PartitionSpec& spec, const SpinConfig& start, const SpinConfig* partner,
                        std::span<const double> a, const ReplicaOptions& opts) {
    if (opts.t_max < 0) throw ValidationError("t_max must be >= 0");
    if (opts.replicas < 1) throw ValidationError("replicas must be >= 1");
    if (opts.stride < 1) throw ValidationError("stride must be >= 1");
    const double work = static_cast<double>(spec.n()) * static_cast<double>(opts.t_max) * opts.replicas;
    if (work > opts.work_cap) {
        throw ResourceError("simulation work n*t_max*replicas = " + std::to_string(work) + " exceeds the cap " +
                            std::to_string(opts.work_cap));
    }
    if (partner && static_cast<int>(a.size()) != spec.m()) throw ValidationError("paired runs need m weights");

    const FieldTable table(spec.beta(), spec.n());
    std::vector<std::vector<TrajectoryRow>> per_replica(static_cast<std::size_t>(opts.replicas));

    parallel_for(
        per_replica.size(),
        [&](std::size_t r) {
            StreamRng rng(opts.seed, r);
            std::vector<SpinConfig> chains{start};
            if (partner) chains.push_back(*partner);
            auto record = [&](long t) {
                TrajectoryRow row;
                row.replica = static_cast<int>(r);
                row.t = t;
                row.s = chains[0].magnetizations();
                if (partner) row.dist_w = weighted_distance(hamming_profile(chains[0], chains[1]), a);
                per_replica[r].push_back(std::move(row));
            };
            record(0);
            for (long t = 1; t <= opts.t_max; ++t) {
                grand_coupling_step(chains, spec, table, draw_update(rng, spec.n()));
                if (t % opts.stride == 0 || t == opts.t_max) record(t);
            }
        },
        opts.threads);

    ReplicaRun run;
    run.paired = partner != nullptr;
    run.m = spec.m();
    for (auto& rows : per_replica) {
        for (auto& row : rows) run.rows.push_back(std::move(row));
    }
    return run;
}

void write_trajectory_csv(std::ostream& os, const ReplicaRun& run) {
    os << "replica,t";
    for (int i = 1; i <= run.m; ++i) os << ",S_" << i;
    if (run.paired) os << ",dist_w";
    os << '\n';
    const auto old_precision = os.precision(17);
    for (const auto& row : run.rows) {
        os << row.replica << ',' << row.t;
        for (double s : row.s) os << ',' << s;
        if (run.paired) os << ',' << row.dist_w;
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace mpising
