#include "mpising/coordchain.hpp"

#include <algorithm>
#include <bit>

#include "mpising/errors.hpp"

namespace mpising {

CoordRef CoordRef::balanced(const PartitionSpec& spec) {
    CoordRef r;
    for (int i = 0; i < spec.m(); ++i) {
        r.tilde_u.push_back((spec.size(i) + 1) / 2);
        r.tilde_v.push_back(spec.size(i) - r.tilde_u.back());
    }
    return r;
}

CoordRef CoordRef::all_plus(const PartitionSpec& spec) {
    return {spec.sizes(), std::vector<int>(static_cast<std::size_t>(spec.m()), 0)};
}

CoordRef CoordRef::from_config(const SpinConfig& reference) {
    CoordRef r;
    for (int i = 0; i < reference.m(); ++i) {
        r.tilde_u.push_back(reference.plus_count(i));
        r.tilde_v.push_back(reference.size(i) - reference.plus_count(i));
    }
    return r;
}

bool CoordRef::is_good() const {
    for (std::size_t i = 0; i < tilde_u.size(); ++i) {
        const int size = tilde_u[i] + tilde_v[i];
        if (4 * std::min(tilde_u[i], tilde_v[i]) < size) return false;
    }
    return true;
}

SpinConfig CoordRef::configuration(const PartitionSpec& spec) const {
    return SpinConfig::with_counts(spec, tilde_u);
}

std::vector<int> coord_state_of(const SpinConfig& sigma, const SpinConfig& reference) {
    std::vector<int> x;
    for (int i = 0; i < sigma.m(); ++i) {
        const auto a = sigma.words(i);
        const auto r = reference.words(i);
        int both_plus = 0;
        int both_minus = 0;
        for (int w = 0; w < static_cast<int>(a.size()); ++w) {
            both_plus += std::popcount(a[w] & r[w]);
            both_minus += std::popcount(~a[w] & ~r[w] & sigma.valid_mask(i, w));
        }
        x.push_back(both_plus);
        x.push_back(both_minus);
    }
    return x;
}

namespace {

std::vector<Coordinate> coordinates_for(const PartitionSpec& spec, const CoordRef& ref) {
    if (static_cast<int>(ref.tilde_u.size()) != spec.m() || static_cast<int>(ref.tilde_v.size()) != spec.m()) {
        throw ValidationError("reference counts must have m entries");
    }
    std::vector<Coordinate> coords;
    for (int i = 0; i < spec.m(); ++i) {
        if (ref.tilde_u[i] < 0 || ref.tilde_v[i] < 0 || ref.tilde_u[i] + ref.tilde_v[i] != spec.size(i)) {
            throw ValidationError("reference counts must satisfy tilde_u_i + tilde_v_i = n p_i");
        }
        coords.push_back({i, ref.tilde_u[i], 1});
        coords.push_back({i, ref.tilde_v[i], -1});
    }
    return coords;
}

}  // namespace

CoordChain::CoordChain(const PartitionSpec& spec, CoordRef ref, std::size_t cap)
    : LumpedChain(spec, coordinates_for(spec, ref), cap), ref_(std::move(ref)) {}

std::vector<int> CoordChain::reference_state() const {
    std::vector<int> x;
    for (std::size_t i = 0; i < ref_.tilde_u.size(); ++i) {
        x.push_back(ref_.tilde_u[i]);
        x.push_back(ref_.tilde_v[i]);
    }
    return x;
}

std::vector<std::pair<long, double>> CoordChain::exact_tv_full(std::span<const long> t_grid) const {
    return tv_curve(reference_state(), t_grid);
}

}  // namespace mpising
