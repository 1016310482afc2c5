#include "mpising/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mpising/errors.hpp"

namespace mpising {

FullChain::FullChain(const PartitionSpec& spec) : spec_(spec) {
    if (spec.n() > 14) throw ValidationError("the brute-force oracle is limited to n <= 14");
    const int n = spec.n();
    neighbours_.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) part_of_.push_back(spec.locate(v).part);
    for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) {
            if (part_of_[v] != part_of_[w]) neighbours_[v].push_back(w);
        }
    }
}

namespace {

int spin_at(std::uint32_t sigma, int v) { return (sigma >> v) & 1U ? 1 : -1; }

}  // namespace

long FullChain::edge_energy(std::uint32_t sigma) const {
    long e = 0;
    for (int v = 0; v < spec_.n(); ++v) {
        for (int w : neighbours_[v]) {
            if (w > v) e += spin_at(sigma, v) * spin_at(sigma, w);
        }
    }
    return e;
}

DistVector FullChain::gibbs() const {
    DistVector w(size());
    const double scale = spec_.beta() / spec_.n();
    double top = -1e300;
    for (std::uint32_t s = 0; s < w.size(); ++s) {
        w[s] = scale * static_cast<double>(edge_energy(s));
        top = std::max(top, w[s]);
    }
    double z = 0.0;
    for (double& v : w) {
        v = std::exp(v - top);
        z += v;
    }
    for (double& v : w) v /= z;
    return w;
}

std::vector<std::pair<std::uint32_t, double>> FullChain::row(std::uint32_t sigma) const {
    const int n = spec_.n();
    std::vector<std::pair<std::uint32_t, double>> out;
    for (int v = 0; v < n; ++v) {
        int field = 0;
        for (int w : neighbours_[v]) field += spin_at(sigma, w);
        const double plus = 0.5 * (1.0 + std::tanh(spec_.beta() * field / n));
        out.emplace_back(sigma | (1U << v), plus / n);
        out.emplace_back(sigma & ~(1U << v), (1.0 - plus) / n);
    }
    return out;
}

DistVector FullChain::step(const DistVector& d) const {
    DistVector out(d.size(), 0.0);
    for (std::uint32_t s = 0; s < d.size(); ++s) {
        if (d[s] == 0.0) continue;
        for (const auto& [y, p] : row(s)) out[y] += d[s] * p;
    }
    return out;
}

std::vector<std::pair<long, double>> FullChain::tv_curve(std::uint32_t start, std::span<const long> t_grid) const {
    const DistVector mu = gibbs();
    DistVector d(size(), 0.0);
    d[start] = 1.0;
    long now = 0;
    std::vector<std::pair<long, double>> out;
    for (long t : t_grid) {
        for (; now < t; ++now) d = step(d);
        out.emplace_back(t, total_variation(d, mu));
    }
    return out;
}

std::vector<int> FullChain::counts(std::uint32_t sigma) const {
    std::vector<int> u(static_cast<std::size_t>(spec_.m()), 0);
    for (int v = 0; v < spec_.n(); ++v) {
        if ((sigma >> v) & 1U) ++u[part_of_[v]];
    }
    return u;
}

DistVector FullChain::lump(const DistVector& d, const MixedRadix& counts_space) const {
    DistVector out(counts_space.size(), 0.0);
    for (std::uint32_t s = 0; s < d.size(); ++s) out[counts_space.index(counts(s))] += d[s];
    return out;
}

std::uint32_t FullChain::representative(std::span<const int> u) const {
    std::uint32_t sigma = 0;
    for (int i = 0; i < spec_.m(); ++i) {
        for (int k = 0; k < u[i]; ++k) sigma |= 1U << (spec_.offset(i) + k);
    }
    return sigma;
}

double FullChain::conductance() const {
    const DistVector mu = gibbs();
    auto in_a = [&](std::uint32_t s) { return 2 * std::popcount(s) - spec_.n() > 0; };
    double flow = 0.0;
    double mass = 0.0;
    for (std::uint32_t s = 0; s < mu.size(); ++s) {
        if (!in_a(s)) continue;
        mass += mu[s];
        for (const auto& [y, p] : row(s)) {
            if (!in_a(y)) flow += mu[s] * p;
        }
    }
    return flow / mass;
}

}  // namespace mpising
