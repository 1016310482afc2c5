#include "mpising/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mpising/errors.hpp"

namespace mpising {

double default_zeta(const SpectralData& sd, double beta) {
    if (beta == 0.0) return 0.5;
    return std::min(1.0, 3.0 * sd.upsilon / (beta * beta)) / 2.0;
}

std::vector<int> scaled_start(const PartitionSpec& spec, double zeta) {
    std::vector<int> u;
    for (int i = 0; i < spec.m(); ++i) {
        const int size = spec.size(i);
        auto k = static_cast<int>(std::llround(size * (1.0 + zeta) / 2.0));
        k = std::min(size, std::max(k, size / 2 + 1));
        u.push_back(k);
    }
    return u;
}

namespace {

void check_zeta(const SpectralData& sd, double beta, double zeta) {
    if (!(sd.upsilon > 0.0)) throw ValidationError("the lower bound needs beta < beta_cr");
    const double bound = beta == 0.0 ? 1.0 : std::min(1.0, 3.0 * sd.upsilon / (beta * beta));
    const bool ok = zeta > 0.0 && (beta == 0.0 ? zeta <= bound : zeta < bound);
    if (!ok) throw ValidationError("zeta must lie in (0, min(1, 3 upsilon / beta^2))");
}

}  // namespace

LowerBoundResult lower_bound_at(const MagChain& chain, const SpectralData& sd, double gamma, double zeta) {
    const double g[] = {gamma};
    return lower_bound_sweep(chain, sd, g, zeta).front();
}

std::vector<LowerBoundResult> lower_bound_sweep(const MagChain& chain, const SpectralData& sd,
                                                std::span<const double> gammas, double zeta) {
    const auto& spec = chain.spec();
    check_zeta(sd, spec.beta(), zeta);
    const double n = spec.n();
    const double t_n = n * std::log(n) / (2.0 * sd.upsilon);

    std::vector<LowerBoundResult> out;
    for (double gamma : gammas) {
        if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
        LowerBoundResult r;
        r.gamma = gamma;
        r.zeta = zeta;
        const double t = std::ceil(t_n - gamma * n / sd.upsilon);
        r.clamped = t < 0.0;
        r.t_star = r.clamped ? 0 : static_cast<long>(t);
        r.start = scaled_start(spec, zeta);
        out.push_back(std::move(r));
    }

    const DistVector pi = chain.stationary();
    const auto [e_stat, var_stat] = chain.linear_moments(pi, sd.a);

    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return out[x].t_star < out[y].t_star; });
    DistVector d = chain.point_mass(out.front().start);
    long now = 0;
    for (std::size_t k : order) {
        auto& r = out[k];
        d = chain.evolve(std::move(d), r.t_star - now);
        now = r.t_star;
        const auto [e_start, var_start] = chain.linear_moments(d, sd.a);
        r.e_start = e_start;
        r.var_start = var_start;
        r.e_stat = e_stat;
        r.var_stat = var_stat;
        const double spread = std::sqrt(std::max(var_start, var_stat));
        r.r = spread > 0.0 ? std::abs(e_start - e_stat) / spread : 0.0;
        r.tv_lower = r.r > 0.0 ? std::clamp(1.0 - 8.0 / (r.r * r.r), 0.0, 1.0) : 0.0;
        r.tv_exact = total_variation(d, pi);
    }
    return out;
}

ConductanceResult conductance_cut(const MagChain& chain) {
    const auto& spec = chain.spec();
    const auto& space = chain.space();
    const DistVector pi = chain.stationary();
    auto excess = [&](std::span<const int> u) {
        int s = 0;
        for (int v : u) s += 2 * v;
        return s - spec.n();
    };
    ConductanceResult r;
    r.n = spec.n();
    r.beta = spec.beta();
    double flow = 0.0;
    for (std::size_t idx = 0; idx < pi.size(); ++idx) {
        const auto u = space.decode(idx);
        const int e = excess(u);
        if (std::abs(e) <= 1) r.mu_B += pi[idx];
        if (e <= 0) continue;
        r.mu_A += pi[idx];
        for (const auto& [y, p] : chain.transition_probs(u)) {
            if (excess(y) <= 0) flow += pi[idx] * p;
        }
    }
    if (r.mu_A > 0.5 + 1e-12) throw std::logic_error("mu(A) exceeds 1/2, flip symmetry violated");
    r.phi_A = flow / r.mu_A;
    r.tmix_lower = 1.0 / (4.0 * r.phi_A);
    return r;
}

namespace {

double interaction_gap(std::span<const double> p, std::span<const double> v) {
    double vp = 0.0;
    double v2p2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        vp += v[i] * p[i];
        v2p2 += v[i] * v[i] * p[i] * p[i];
    }
    return vp * vp - v2p2;
}

}  // namespace

std::vector<FreeEnergySample> f_profile(std::span<const double> p, double beta, std::span<const double> v,
                                        std::span<const double> gamma_grid) {
    if (p.size() != v.size()) throw ValidationError("direction must have m components");
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
        throw ValidationError("direction must be nonzero");
    }
    for (double x : v) {
        if (x < 0.0) throw ValidationError("direction must be non-negative");
    }
    const double q = interaction_gap(p, v);
    std::vector<FreeEnergySample> out;
    for (double gamma : gamma_grid) {
        FreeEnergySample s;
        s.gamma = gamma;
        s.f = 2.0 * beta * gamma * gamma * q;
        s.df = 4.0 * beta * gamma * q;
        s.d2f = 4.0 * beta * q;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double lo = 0.5 - gamma * v[i];
            const double hi = 0.5 + gamma * v[i];
            if (!(lo > 0.0 && hi > 0.0)) throw ValidationError("gamma grid leaves the domain |gamma v_i| < 1/2");
            s.f -= p[i] * (lo * std::log(lo) + hi * std::log(hi));
            s.df -= p[i] * v[i] * (std::log(hi) - std::log(lo));
            s.d2f -= p[i] * v[i] * v[i] * (1.0 / lo + 1.0 / hi);
        }
        out.push_back(s);
    }
    return out;
}

double f_second_at_zero(std::span<const double> p, double beta, std::span<const double> v) {
    double pv2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) pv2 += p[i] * v[i] * v[i];
    return 4.0 * beta * interaction_gap(p, v) - 4.0 * pv2;
}

double critical_beta_scan(std::span<const double> p, std::span<const double> v, std::span<const double> beta_grid) {
    for (std::size_t k = 0; k + 1 < beta_grid.size(); ++k) {
        double lo = beta_grid[k];
        double hi = beta_grid[k + 1];
        const double f_lo = f_second_at_zero(p, lo, v);
        const double f_hi = f_second_at_zero(p, hi, v);
        if (f_lo == 0.0) return lo;
        if ((f_lo < 0.0) == (f_hi < 0.0)) continue;
        const bool rising = f_lo < 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double f_mid = f_second_at_zero(p, mid, v);
            ((f_mid < 0.0) == rising ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    throw ConvergenceError("no sign change of f''(0) on the beta grid");
}

}  // namespace mpising
