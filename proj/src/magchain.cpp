#include "mpising/magchain.hpp"

#include <algorithm>
#include <cmath>

namespace mpising {

namespace {

std::vector<Coordinate> magnetization_coordinates(const PartitionSpec& spec) {
    std::vector<Coordinate> coords;
    for (int i = 0; i < spec.m(); ++i) coords.push_back({i, spec.size(i), 1});
    return coords;
}

}  // namespace

MagChain::MagChain(const PartitionSpec& spec, std::size_t cap)
    : LumpedChain(spec, magnetization_coordinates(spec), cap) {}

std::vector<int> MagChain::mirror(std::span<const int> u) const {
    std::vector<int> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = spec().size(static_cast<int>(i)) - u[i];
    return out;
}

std::vector<double> MagChain::drift(std::span<const int> u) const {
    const int m = spec().m();
    const double n = spec().n();
    const auto e = magnetization_numerators(u);
    int total = 0;
    for (int v : e) total += v;
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double field = (total - e[i]) / n;
        out[i] = (-e[i] / n + spec().p(i) * std::tanh(spec().beta() * field)) / n;
    }
    return out;
}

std::vector<double> MagChain::kernel_drift(std::span<const int> u) const {
    const int m = spec().m();
    const double n = spec().n();
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (const auto& [y, prob] : transition_probs(u)) {
        for (int i = 0; i < m; ++i) out[i] += prob * (2.0 * (y[i] - u[i]) / n);
    }
    return out;
}

std::vector<MagChain::VariancePoint> MagChain::variance_trajectory(std::span<const int> start,
                                                                   std::span<const long> t_grid) const {
    DistVector d = point_mass(start);
    long now = 0;
    std::vector<VariancePoint> out;
    for (long t : t_grid) {
        d = evolve(std::move(d), t - now);
        now = t;
        const Moments mo = moments(d);
        double s = 0.0;
        for (double v : mo.var) s += v;
        out.push_back({t, s, spec().n() * s});
    }
    return out;
}

std::vector<std::pair<long, double>> extreme_start_tv(const MagChain& chain, std::span<const long> t_grid) {
    const int m = chain.spec().m();
    std::vector<std::vector<int>> starts{chain.all_plus()};
    // all-minus mirrors all-plus and gives the same curve; mixed extremes
    // only differ from their mirror in the same way, so keep one of each pair
    for (int mask = 1; mask + 1 < (1 << m) && mask < 64; ++mask) {
        if (mask & 1) continue;
        std::vector<int> u(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) u[i] = (mask >> i) & 1 ? chain.spec().size(i) : 0;
        starts.push_back(std::move(u));
    }
    std::vector<std::pair<long, double>> out;
    for (const auto& s : starts) {
        const auto curve = chain.tv_curve(s, t_grid);
        if (out.empty()) {
            out = curve;
        } else {
            for (std::size_t k = 0; k < curve.size(); ++k) out[k].second = std::max(out[k].second, curve[k].second);
        }
    }
    return out;
}

}  // namespace mpising
