#include "mpising/spin_config.hpp"

#include <bit>
#include <cmath>

#include "mpising/errors.hpp"

namespace mpising {

FieldTable::FieldTable(double beta, int n) : beta_(beta), n_(n) {
    plus_.resize(static_cast<std::size_t>(2 * n + 1));
    minus_.resize(plus_.size());
    for (int k = -n; k <= n; ++k) {
        const double t = std::tanh(beta * (static_cast<double>(k) / n));
        plus_[static_cast<std::size_t>(k + n)] = 0.5 * (1.0 + t);
        minus_[static_cast<std::size_t>(k + n)] = 0.5 * (1.0 - t);
    }
}

SpinConfig::SpinConfig(const PartitionSpec& spec) : sizes_(spec.sizes()), n_(spec.n()) {
    word_begin_.push_back(0);
    for (int s : sizes_) word_begin_.push_back(word_begin_.back() + (s + 63) / 64);
    bits_.assign(static_cast<std::size_t>(word_begin_.back()), 0);
    plus_.assign(sizes_.size(), 0);
    excess_ = -n_;
}

SpinConfig SpinConfig::all_minus(const PartitionSpec& spec) { return SpinConfig(spec); }

SpinConfig SpinConfig::all_plus(const PartitionSpec& spec) { return with_counts(spec, spec.sizes()); }

SpinConfig SpinConfig::with_counts(const PartitionSpec& spec, std::span<const int> counts) {
    if (static_cast<int>(counts.size()) != spec.m()) throw ValidationError("plus counts must have m entries");
    SpinConfig c(spec);
    for (int i = 0; i < spec.m(); ++i) {
        if (counts[i] < 0 || counts[i] > spec.size(i)) throw ValidationError("plus count out of range");
        for (int v = 0; v < counts[i]; ++v) c.set_spin(i, v, 1);
    }
    return c;
}

SpinConfig SpinConfig::from_spins(const PartitionSpec& spec, std::span<const int> spins) {
    if (static_cast<int>(spins.size()) != spec.n()) throw ValidationError("spin vector must have n entries");
    SpinConfig c(spec);
    for (int v = 0; v < spec.n(); ++v) {
        if (spins[v] != 1 && spins[v] != -1) throw ValidationError("spins must be +1 or -1");
        if (spins[v] == 1) c.set_spin(spec.locate(v), 1);
    }
    return c;
}

void SpinConfig::set_spin(int part, int local, int value) {
    auto& w = bits_[static_cast<std::size_t>(word_begin_[part] + (local >> 6))];
    const std::uint64_t bit = std::uint64_t{1} << (local & 63);
    const bool was_plus = (w & bit) != 0;
    if (value > 0 && !was_plus) {
        w |= bit;
        ++plus_[part];
        excess_ += 2;
    } else if (value < 0 && was_plus) {
        w &= ~bit;
        --plus_[part];
        excess_ -= 2;
    }
}

std::vector<double> SpinConfig::magnetizations() const {
    std::vector<double> s(sizes_.size());
    for (int i = 0; i < m(); ++i) s[i] = magnetization(i);
    return s;
}

std::span<const std::uint64_t> SpinConfig::words(int part) const {
    return {bits_.data() + word_begin_[part], static_cast<std::size_t>(word_count(part))};
}

std::uint64_t SpinConfig::valid_mask(int part, int w) const {
    const int remaining = sizes_[part] - 64 * w;
    return remaining >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << remaining) - 1;
}

int SpinConfig::rank(int part, int local, int value) const {
    const auto ws = words(part);
    const int full = local >> 6;
    int plus = 0;
    for (int w = 0; w < full; ++w) plus += std::popcount(ws[w]);
    if (local & 63) plus += std::popcount(ws[full] & ((std::uint64_t{1} << (local & 63)) - 1));
    return value > 0 ? plus : local - plus;
}

int select_in_words(std::span<const std::uint64_t> words, int k) {
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t x = words[w];
        const int c = std::popcount(x);
        if (k < c) {
            for (; k > 0; --k) x &= x - 1;
            return static_cast<int>(64 * w) + std::countr_zero(x);
        }
        k -= c;
    }
    return -1;
}

int SpinConfig::select(int part, int value, int k) const {
    const auto ws = words(part);
    for (int w = 0; w < static_cast<int>(ws.size()); ++w) {
        std::uint64_t x = value > 0 ? ws[w] : (~ws[w] & valid_mask(part, w));
        const int c = std::popcount(x);
        if (k < c) {
            for (; k > 0; --k) x &= x - 1;
            return 64 * w + std::countr_zero(x);
        }
        k -= c;
    }
    throw std::out_of_range("select: fewer sites with the requested spin than k+1");
}

std::vector<int> SpinConfig::to_spins() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < m(); ++i) {
        for (int v = 0; v < sizes_[i]; ++v) out.push_back(spin(i, v));
    }
    return out;
}

bool dominated_by(const SpinConfig& sigma, const SpinConfig& tau) {
    for (int i = 0; i < sigma.m(); ++i) {
        const auto a = sigma.words(i);
        const auto b = tau.words(i);
        for (std::size_t w = 0; w < a.size(); ++w) {
            if (a[w] & ~b[w]) return false;
        }
    }
    return true;
}

}  // namespace mpising
