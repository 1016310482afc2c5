#include "mpising/lumped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpising/errors.hpp"

namespace mpising {

MixedRadix::MixedRadix(std::vector<int> radices, std::size_t cap) : radices_(std::move(radices)) {
    strides_.assign(radices_.size(), 1);
    long double total = 1.0L;
    for (int r : radices_) {
        if (r < 1) throw ValidationError("mixed radix requires positive radices");
        total *= r;
    }
    if (total > static_cast<long double>(cap)) {
        throw ResourceError("state space of " + std::to_string(static_cast<double>(total)) +
                            " states exceeds the cap of " + std::to_string(cap) +
                            "; reduce n (each partition contributes a factor n*p_i + 1) or raise --mem-cap");
    }
    for (int d = dims() - 1; d >= 0; --d) {
        strides_[d] = size_;
        size_ *= static_cast<std::size_t>(radices_[d]);
    }
}

std::size_t MixedRadix::index(std::span<const int> x) const {
    std::size_t idx = 0;
    for (int d = 0; d < dims(); ++d) idx += static_cast<std::size_t>(x[d]) * strides_[d];
    return idx;
}

void MixedRadix::decode(std::size_t idx, std::span<int> out) const {
    for (int d = 0; d < dims(); ++d) {
        out[d] = static_cast<int>(idx / strides_[d]);
        idx %= strides_[d];
    }
}

std::vector<int> MixedRadix::decode(std::size_t idx) const {
    std::vector<int> x(radices_.size());
    decode(idx, x);
    return x;
}

double total_variation(const DistVector& a, const DistVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

namespace {

std::vector<int> radices_of(const std::vector<Coordinate>& coords) {
    std::vector<int> r;
    for (const auto& c : coords) r.push_back(c.capacity + 1);
    return r;
}

void advance(std::vector<int>& x, const MixedRadix& space) {
    for (int d = space.dims() - 1; d >= 0; --d) {
        if (++x[d] < space.radix(d)) return;
        x[d] = 0;
    }
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

LumpedChain::LumpedChain(const PartitionSpec& spec, std::vector<Coordinate> coords, std::size_t cap)
    : spec_(spec), coords_(std::move(coords)), space_(radices_of(coords_), cap), table_(spec.beta(), spec.n()) {
    std::vector<int> per_part(static_cast<std::size_t>(spec.m()), 0);
    for (const auto& c : coords_) {
        if (c.part < 0 || c.part >= spec.m() || c.capacity < 0 || (c.sign != 1 && c.sign != -1)) {
            throw ValidationError("invalid lumped coordinate");
        }
        per_part[c.part] += c.capacity;
    }
    for (int i = 0; i < spec.m(); ++i) {
        if (per_part[i] != spec.size(i)) throw ValidationError("lumped classes must cover every partition exactly");
    }
}

void LumpedChain::check_state(std::span<const int> x) const {
    if (static_cast<int>(x.size()) != space_.dims()) throw ValidationError("state has the wrong number of coordinates");
    for (int d = 0; d < space_.dims(); ++d) {
        if (x[d] < 0 || x[d] > coords_[d].capacity) throw ValidationError("state coordinate out of range");
    }
}

std::vector<int> LumpedChain::magnetization_numerators(std::span<const int> x) const {
    std::vector<int> e(static_cast<std::size_t>(spec_.m()), 0);
    for (std::size_t c = 0; c < coords_.size(); ++c) {
        e[coords_[c].part] += coords_[c].sign * (2 * x[c] - coords_[c].capacity);
    }
    return e;
}

std::vector<int> LumpedChain::plus_counts(std::span<const int> x) const {
    std::vector<int> u(static_cast<std::size_t>(spec_.m()), 0);
    for (std::size_t c = 0; c < coords_.size(); ++c) {
        u[coords_[c].part] += coords_[c].sign > 0 ? x[c] : coords_[c].capacity - x[c];
    }
    return u;
}

std::vector<std::pair<std::vector<int>, double>> LumpedChain::transition_probs(std::span<const int> x) const {
    check_state(x);
    const auto e = magnetization_numerators(x);
    int total = 0;
    for (int v : e) total += v;
    const double n = spec_.n();

    std::vector<std::pair<std::vector<int>, double>> out;
    out.emplace_back(std::vector<int>(x.begin(), x.end()), 0.0);
    double moving = 0.0;
    for (std::size_t c = 0; c < coords_.size(); ++c) {
        const auto& co = coords_[c];
        const int k = total - e[co.part];
        const double r_inc = co.sign > 0 ? table_.r_plus(k) : table_.r_minus(k);
        const double r_dec = co.sign > 0 ? table_.r_minus(k) : table_.r_plus(k);
        const double up = (co.capacity - x[c]) / n * r_inc;
        const double down = x[c] / n * r_dec;
        if (up > 0.0) {
            std::vector<int> y(x.begin(), x.end());
            ++y[c];
            out.emplace_back(std::move(y), up);
        }
        if (down > 0.0) {
            std::vector<int> y(x.begin(), x.end());
            --y[c];
            out.emplace_back(std::move(y), down);
        }
        moving += up + down;
    }
    out.front().second = 1.0 - moving;
    return out;
}

DistVector LumpedChain::point_mass(std::span<const int> x) const {
    check_state(x);
    DistVector d(space_.size(), 0.0);
    d[space_.index(x)] = 1.0;
    return d;
}

DistVector LumpedChain::step(const DistVector& d) const {
    const int dims = space_.dims();
    const double n = spec_.n();
    DistVector out(d.size(), 0.0);
    std::vector<int> y(static_cast<std::size_t>(dims), 0);
    std::vector<int> e(static_cast<std::size_t>(spec_.m()));

    for (std::size_t idx = 0; idx < d.size(); ++idx, advance(y, space_)) {
        std::fill(e.begin(), e.end(), 0);
        for (int c = 0; c < dims; ++c) e[coords_[c].part] += coords_[c].sign * (2 * y[c] - coords_[c].capacity);
        int total = 0;
        for (int v : e) total += v;

        double moving = 0.0;
        double inflow = 0.0;
        for (int c = 0; c < dims; ++c) {
            const auto& co = coords_[c];
            const int k = total - e[co.part];
            const double r_inc = co.sign > 0 ? table_.r_plus(k) : table_.r_minus(k);
            const double r_dec = co.sign > 0 ? table_.r_minus(k) : table_.r_plus(k);
            moving += (co.capacity - y[c]) / n * r_inc + y[c] / n * r_dec;
            const std::size_t s = space_.stride(c);
            if (y[c] > 0) inflow += d[idx - s] * ((co.capacity - y[c] + 1) / n * r_inc);
            if (y[c] < co.capacity) inflow += d[idx + s] * ((y[c] + 1) / n * r_dec);
        }
        out[idx] = (1.0 - moving) * d[idx] + inflow;
    }
    return out;
}

DistVector LumpedChain::evolve(DistVector d, long t, EvolveLog* log) const {
    if (t < 0) throw ValidationError("evolve requires t >= 0");
    for (long s = 1; s <= t; ++s) {
        d = step(d);
        if (s % 1000 == 0 || s == t) {
            double total = 0.0;
            for (double v : d) total += v;
            const double drift = std::abs(total - 1.0);
            if (log) log->max_drift = std::max(log->max_drift, drift);
            if (drift > 1e-12) {
                for (double& v : d) v /= total;
                if (log) ++log->renormalizations;
            }
        }
    }
    return d;
}

DistVector LumpedChain::stationary() const {
    const int dims = space_.dims();
    const double scale = spec_.beta() / (2.0 * spec_.n());
    DistVector logw(space_.size());
    std::vector<int> x(static_cast<std::size_t>(dims), 0);
    std::vector<long> e(static_cast<std::size_t>(spec_.m()));
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < logw.size(); ++idx, advance(x, space_)) {
        double lw = 0.0;
        std::fill(e.begin(), e.end(), 0);
        for (int c = 0; c < dims; ++c) {
            lw += log_binomial(coords_[c].capacity, x[c]);
            e[coords_[c].part] += coords_[c].sign * (2 * x[c] - coords_[c].capacity);
        }
        long total = 0;
        long squares = 0;
        for (long v : e) {
            total += v;
            squares += v * v;
        }
        // (beta n / 2)((sum S)^2 - sum S_i^2) with S_i = e_i / n
        lw += scale * static_cast<double>(total * total - squares);
        logw[idx] = lw;
        top = std::max(top, lw);
    }
    double z = 0.0;
    for (double v : logw) z += std::exp(v - top);
    const double log_z = top + std::log(z);
    for (double& v : logw) v = std::exp(v - log_z);
    return logw;
}

double LumpedChain::stationarity_residual(const DistVector& d) const {
    const DistVector next = step(d);
    double r = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) r += std::abs(next[i] - d[i]);
    return r;
}

std::vector<std::pair<long, double>> LumpedChain::tv_curve(std::span<const int> start,
                                                           std::span<const long> t_grid) const {
    return tv_curve(point_mass(start), t_grid);
}

std::vector<std::pair<long, double>> LumpedChain::tv_curve(const DistVector& start,
                                                           std::span<const long> t_grid) const {
    const DistVector pi = stationary();
    DistVector d = start;
    long now = 0;
    std::vector<std::pair<long, double>> out;
    for (long t : t_grid) {
        if (t < now) throw ValidationError("t grid must be ascending");
        d = evolve(std::move(d), t - now);
        now = t;
        out.emplace_back(t, total_variation(d, pi));
    }
    return out;
}

std::vector<std::optional<long>> LumpedChain::mixing_times(std::span<const int> start, std::span<const double> eps,
                                                           long t_cap) const {
    const DistVector pi = stationary();
    DistVector d = point_mass(start);
    std::vector<std::optional<long>> out(eps.size());
    std::size_t open = eps.size();
    for (long t = 0; open > 0 && t <= t_cap; ++t) {
        if (t > 0) d = step(d);
        const double tv = total_variation(d, pi);
        for (std::size_t k = 0; k < eps.size(); ++k) {
            if (!out[k] && tv <= eps[k]) {
                out[k] = t;
                --open;
            }
        }
    }
    return out;
}

Moments LumpedChain::moments(const DistVector& d) const {
    const int m = spec_.m();
    const double n = spec_.n();
    Moments mo{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    std::vector<double> second(m, 0.0);
    std::vector<int> x(static_cast<std::size_t>(space_.dims()), 0);
    for (std::size_t idx = 0; idx < d.size(); ++idx, advance(x, space_)) {
        if (d[idx] == 0.0) continue;
        const auto e = magnetization_numerators(x);
        for (int i = 0; i < m; ++i) {
            const double s = e[i] / n;
            mo.mean[i] += d[idx] * s;
            second[i] += d[idx] * s * s;
        }
    }
    for (int i = 0; i < m; ++i) mo.var[i] = std::max(0.0, second[i] - mo.mean[i] * mo.mean[i]);
    return mo;
}

std::pair<double, double> LumpedChain::linear_moments(const DistVector& d, std::span<const double> c) const {
    const double n = spec_.n();
    double mean = 0.0;
    std::vector<int> x(static_cast<std::size_t>(space_.dims()), 0);
    std::vector<double> z(d.size());
    for (std::size_t idx = 0; idx < d.size(); ++idx, advance(x, space_)) {
        const auto e = magnetization_numerators(x);
        double v = 0.0;
        for (int i = 0; i < spec_.m(); ++i) v += c[i] * e[i] / n;
        z[idx] = v;
        mean += d[idx] * v;
    }
    // centred second moment avoids cancellation when the variance is tiny
    double var = 0.0;
    for (std::size_t idx = 0; idx < d.size(); ++idx) var += d[idx] * (z[idx] - mean) * (z[idx] - mean);
    return {mean, var};
}

DistVector LumpedChain::project_to_counts(const DistVector& d, const MixedRadix& counts_space) const {
    DistVector out(counts_space.size(), 0.0);
    std::vector<int> x(static_cast<std::size_t>(space_.dims()), 0);
    for (std::size_t idx = 0; idx < d.size(); ++idx, advance(x, space_)) {
        out[counts_space.index(plus_counts(x))] += d[idx];
    }
    return out;
}

}  // namespace mpising
