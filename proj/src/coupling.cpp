#include "mpising/coupling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "mpising/errors.hpp"
#include "mpising/parallel.hpp"

namespace mpising {

long cutoff_time(int n, double upsilon) {
    if (!(upsilon > 0.0)) throw ValidationError("t_n is defined only for beta < beta_cr");
    return static_cast<long>(std::ceil(n * std::log(static_cast<double>(n)) / (2.0 * upsilon)));
}

namespace {

int count_with(const SpinConfig& c, int part, int value) {
    return value > 0 ? c.plus_count(part) : c.size(part) - c.plus_count(part);
}

std::uint64_t class_word(const SpinConfig& c, const SpinConfig& ref, int part, int w, int spin, int ref_spin) {
    const std::uint64_t a = spin > 0 ? c.words(part)[w] : ~c.words(part)[w];
    const std::uint64_t r = ref_spin > 0 ? ref.words(part)[w] : ~ref.words(part)[w];
    return a & r & c.valid_mask(part, w);
}

/// Sites of `part` with index < local whose (spin, reference spin) class is
/// the given one.
int class_rank(const SpinConfig& c, const SpinConfig& ref, int part, int local, int spin, int ref_spin) {
    int k = 0;
    const int full = local >> 6;
    for (int w = 0; w < full; ++w) k += std::popcount(class_word(c, ref, part, w, spin, ref_spin));
    if (local & 63) {
        k += std::popcount(class_word(c, ref, part, full, spin, ref_spin) & ((std::uint64_t{1} << (local & 63)) - 1));
    }
    return k;
}

int class_select(const SpinConfig& c, const SpinConfig& ref, int part, int k, int spin, int ref_spin) {
    for (int w = 0; w < c.word_count(part); ++w) {
        std::uint64_t x = class_word(c, ref, part, w, spin, ref_spin);
        const int cnt = std::popcount(x);
        if (k < cnt) {
            for (; k > 0; --k) x &= x - 1;
            return 64 * w + std::countr_zero(x);
        }
        k -= cnt;
    }
    throw std::logic_error("class_select: class smaller than requested rank");
}

int agreement(const SpinConfig& c, const SpinConfig& ref, int part) {
    int k = 0;
    for (int w = 0; w < c.word_count(part); ++w) k += std::popcount(c.words(part)[w] & ref.words(part)[w]);
    return k;
}

}  // namespace

int matched_site(const SpinConfig& sigma, const SpinConfig& sigma_prime, int part, int local) {
    const int s = sigma.spin(part, local);
    const int k = sigma.rank(part, local, s);
    const int available = count_with(sigma_prime, part, s);
    if (k < available) return sigma_prime.select(part, s, k);
    return sigma_prime.select(part, -s, count_with(sigma, part, -s) + (k - available));
}

MatchedPair modified_matching(const SpinConfig& sigma, const SpinConfig& sigma_prime) {
    MatchedPair pair{sigma, sigma_prime, {}};
    for (int i = 0; i < sigma.m(); ++i) {
        std::vector<int> plus;
        std::vector<int> minus;
        std::vector<int> plus_p;
        std::vector<int> minus_p;
        for (int v = 0; v < sigma.size(i); ++v) {
            (sigma.spin(i, v) > 0 ? plus : minus).push_back(v);
            (sigma_prime.spin(i, v) > 0 ? plus_p : minus_p).push_back(v);
        }
        std::vector<int> f(static_cast<std::size_t>(sigma.size(i)), -1);
        std::vector<int> left;
        std::vector<int> left_p;
        auto pair_up = [&](const std::vector<int>& a, const std::vector<int>& b) {
            const std::size_t k = std::min(a.size(), b.size());
            for (std::size_t j = 0; j < k; ++j) f[a[j]] = b[j];
            left.insert(left.end(), a.begin() + static_cast<long>(k), a.end());
            left_p.insert(left_p.end(), b.begin() + static_cast<long>(k), b.end());
        };
        pair_up(plus, plus_p);
        pair_up(minus, minus_p);
        // at most one of the two spin classes leaves an excess, already in index order
        for (std::size_t j = 0; j < left.size(); ++j) f[left[j]] = left_p[j];
        pair.f.push_back(std::move(f));
    }
    return pair;
}

void modified_monotone_update(SpinConfig& sigma, SpinConfig& sigma_prime, Site site, int image,
                              const FieldTable& table, double u) {
    const int field = sigma.field_numerator(site.part);
    const int field_prime = sigma_prime.field_numerator(site.part);
    sigma.set_spin(site, heat_bath_spin(table, field, u));
    sigma_prime.set_spin(site.part, image, heat_bath_spin(table, field_prime, u));
}

void modified_monotone_step(MatchedPair& pair, const PartitionSpec& spec, const FieldTable& table,
                            const UpdateRandomness& rnd) {
    const Site s = spec.locate(rnd.site);
    modified_monotone_update(pair.sigma, pair.sigma_prime, s, pair.f[s.part][s.local], table, rnd.u);
}

double r_down_rate(int U, int V, int R, int tilde_u, int tilde_v, int n, double r_plus) {
    const double r_minus = 1.0 - r_plus;
    double a = 0.0;
    // I in B (sigma -1, reference +1), I' in D' (both -1), new spin +1
    if (tilde_u - U + V > 0) {
        a += (tilde_u - U) / static_cast<double>(n) * (V + R) / static_cast<double>(tilde_u - U + V) * r_plus;
    }
    // I in C (sigma +1, reference -1), I' in A' (both +1), new spin -1
    if (tilde_v - V + U > 0) {
        a += (tilde_v - V) / static_cast<double>(n) * (U + R) / static_cast<double>(tilde_v - V + U) * r_minus;
    }
    return a;
}

double r_up_rate(int U, int V, int R, int tilde_u, int tilde_v, int n, double r_plus) {
    const double r_minus = 1.0 - r_plus;
    double b = 0.0;
    // I in A, I' in C', new spin -1
    if (U + tilde_v - V > 0) {
        b += U / static_cast<double>(n) * (tilde_v - V - R) / static_cast<double>(U + tilde_v - V) * r_minus;
    }
    // I in D, I' in B', new spin +1
    if (tilde_u - U + V > 0) {
        b += V / static_cast<double>(n) * (tilde_u - U - R) / static_cast<double>(tilde_u - U + V) * r_plus;
    }
    return b;
}

CoupledChains::CoupledChains(const PartitionSpec& spec, SpinConfig sigma, SpinConfig sigma_prime,
                             std::uint64_t seed, std::uint64_t stream)
    : spec_(spec),
      table_(spec.beta(), spec.n()),
      sigma_(std::move(sigma)),
      sigma_prime_(std::move(sigma_prime)),
      rng_(seed, stream) {}

bool CoupledChains::counts_within_one() const {
    for (int i = 0; i < spec_.m(); ++i) {
        if (std::abs(sigma_.plus_count(i) - sigma_prime_.plus_count(i)) > 1) return false;
    }
    return true;
}

void CoupledChains::monotone_step() {
    const auto rnd = draw_update(rng_, spec_.n());
    const Site s = spec_.locate(rnd.site);
    sigma_.set_spin(s, heat_bath_spin(table_, sigma_.field_numerator(s.part), rnd.u));
    sigma_prime_.set_spin(s, heat_bath_spin(table_, sigma_prime_.field_numerator(s.part), rnd.u));
    ++t_;
}

void CoupledChains::split_step() {
    const auto rnd = draw_update(rng_, spec_.n());
    const Site s = spec_.locate(rnd.site);
    auto in_k = [&](int part) { return std::abs(sigma_.plus_count(part) - sigma_prime_.plus_count(part)) <= 1; };
    if (in_k(s.part)) {
        modified_monotone_update(sigma_, sigma_prime_, s, matched_site(sigma_, sigma_prime_, s.part, s.local), table_,
                                 rnd.u);
    } else {
        int l_size = 0;
        for (int i = 0; i < spec_.m(); ++i) {
            if (!in_k(i)) l_size += spec_.size(i);
        }
        auto k = static_cast<int>(rng_.below(static_cast<std::uint64_t>(l_size)));
        const double u_prime = rng_.uniform();
        int part = 0;
        for (; part < spec_.m(); ++part) {
            if (in_k(part)) continue;
            if (k < spec_.size(part)) break;
            k -= spec_.size(part);
        }
        const int field_prime = sigma_prime_.field_numerator(part);
        sigma_.set_spin(s, heat_bath_spin(table_, sigma_.field_numerator(s.part), rnd.u));
        sigma_prime_.set_spin(part, k, heat_bath_spin(table_, field_prime, u_prime));
    }
    ++t_;
}

void CoupledChains::freeze_matching() { frozen_f_ = modified_matching(sigma_, sigma_prime_).f; }

void CoupledChains::matched_step() {
    if (frozen_f_.empty()) throw std::logic_error("matched_step before freeze_matching");
    const auto rnd = draw_update(rng_, spec_.n());
    const Site s = spec_.locate(rnd.site);
    modified_monotone_update(sigma_, sigma_prime_, s, frozen_f_[s.part][s.local], table_, rnd.u);
    ++t_;
}

void CoupledChains::post_mag_step(const SpinConfig& reference) {
    if (!magnetizations_equal()) throw std::logic_error("post-magnetization step needs equal magnetizations");
    const auto rnd = draw_update(rng_, spec_.n());
    const Site s = spec_.locate(rnd.site);
    const int spin = sigma_.spin(s);
    const int new_spin = heat_bath_spin(table_, sigma_.field_numerator(s.part), rnd.u);
    int image = 0;
    if (agreement(sigma_, reference, s.part) == agreement(sigma_prime_, reference, s.part)) {
        const int ref_spin = reference.spin(s);
        const int k = class_rank(sigma_, reference, s.part, s.local, spin, ref_spin);
        image = class_select(sigma_prime_, reference, s.part, k, spin, ref_spin);
    } else {
        const auto k = static_cast<int>(rng_.below(static_cast<std::uint64_t>(count_with(sigma_prime_, s.part, spin))));
        image = sigma_prime_.select(s.part, spin, k);
    }
    sigma_.set_spin(s, new_spin);
    sigma_prime_.set_spin(s.part, image, new_spin);
    ++t_;
}

std::vector<int> CoupledChains::offsets(const SpinConfig& reference) const {
    std::vector<int> r;
    for (int i = 0; i < spec_.m(); ++i) r.push_back(agreement(sigma_prime_, reference, i) - agreement(sigma_, reference, i));
    return r;
}

namespace {

CouplingRecord fresh_record(const PartitionSpec& spec, const SpectralData* sd) {
    CouplingRecord rec;
    rec.tau_i_c.assign(static_cast<std::size_t>(spec.m()), std::nullopt);
    if (sd) {
        rec.below_critical = sd->upsilon > 0.0;
        rec.t_n = rec.below_critical ? cutoff_time(spec.n(), sd->upsilon) : 0;
    }
    return rec;
}

bool run_mag_phase(CoupledChains& c, CouplingRecord& rec, long t_max) {
    enum class Phase { monotone, split, matched } phase = Phase::monotone;
    while (true) {
        if (c.magnetizations_equal()) {
            rec.tau_mag = c.time();
            return true;
        }
        if (c.time() >= t_max) return false;
        if (phase == Phase::monotone && c.time() >= rec.t_n) phase = Phase::split;
        if (phase == Phase::split && c.counts_within_one()) {
            rec.tau_phase2 = c.time();
            c.freeze_matching();
            phase = Phase::matched;
        }
        switch (phase) {
            case Phase::monotone: c.monotone_step(); break;
            case Phase::split: c.split_step(); break;
            case Phase::matched: c.matched_step(); break;
        }
    }
}

void run_post_phase(CoupledChains& c, const SpinConfig& reference, CouplingRecord& rec, long t_max) {
    const int m = static_cast<int>(rec.tau_i_c.size());
    auto settle = [&] {
        const auto r = c.offsets(reference);
        bool all = true;
        for (int i = 0; i < m; ++i) {
            if (rec.tau_i_c[i] && r[i] != 0) throw std::logic_error("a frozen coordinate pair separated");
            if (!rec.tau_i_c[i] && r[i] == 0) rec.tau_i_c[i] = c.time();
            all = all && rec.tau_i_c[i].has_value();
        }
        if (all) rec.tau_tot = c.time();
        return all;
    };
    while (!settle() && c.time() < t_max) {
        c.post_mag_step(reference);
        if (!c.magnetizations_equal()) throw std::logic_error("post-magnetization coupling broke S_t = S'_t");
    }
}

}  // namespace

CouplingRecord mag_coupling_run(const SpinConfig& sigma, const SpinConfig& sigma_prime, const PartitionSpec& spec,
                                const SpectralData& sd, long t_max, std::uint64_t seed, std::uint64_t stream) {
    if (t_max < 0) throw ValidationError("t_max must be >= 0");
    CouplingRecord rec = fresh_record(spec, &sd);
    CoupledChains c(spec, sigma, sigma_prime, seed, stream);
    run_mag_phase(c, rec, t_max);
    return rec;
}

CouplingRecord post_mag_coupling_run(const SpinConfig& sigma0, const SpinConfig& sigma0_prime,
                                     const SpinConfig& reference, const PartitionSpec& spec, long t_max,
                                     std::uint64_t seed, std::uint64_t stream) {
    if (t_max < 0) throw ValidationError("t_max must be >= 0");
    if (sigma0.plus_counts() != sigma0_prime.plus_counts()) {
        throw ValidationError("post-magnetization coupling needs equal starting magnetizations");
    }
    CouplingRecord rec = fresh_record(spec, nullptr);
    rec.tau_mag = 0;
    CoupledChains c(spec, sigma0, sigma0_prime, seed, stream);
    run_post_phase(c, reference, rec, t_max);
    return rec;
}

CouplingRecord full_coupling_run(const SpinConfig& sigma, const SpinConfig& sigma_prime, const SpinConfig& reference,
                                 const PartitionSpec& spec, const SpectralData& sd, long t_max, std::uint64_t seed,
                                 std::uint64_t stream) {
    if (t_max < 0) throw ValidationError("t_max must be >= 0");
    CouplingRecord rec = fresh_record(spec, &sd);
    CoupledChains c(spec, sigma, sigma_prime, seed, stream);
    if (run_mag_phase(c, rec, t_max)) run_post_phase(c, reference, rec, t_max);
    return rec;
}

std::vector<TailPoint> tail_curve(std::span<const std::optional<long>> taus, std::span<const long> t_grid,
                                  long t_max) {
    if (taus.empty()) throw ValidationError("tail curve needs at least one record");
    std::vector<TailPoint> out;
    for (long t : t_grid) {
        if (t > t_max) throw ValidationError("tail requested beyond t_max, where censored runs are undecided");
        long exceed = 0;
        for (const auto& tau : taus) {
            if (!tau || *tau > t) ++exceed;
        }
        const auto total = static_cast<long>(taus.size());
        out.push_back({t, static_cast<double>(exceed) / total, wilson_interval(exceed, total)});
    }
    return out;
}

UpperBoundResult upper_bound_curve(const PartitionSpec& spec, const SpectralData& sd, std::span<const long> t_grid,
                                   int replicas, std::uint64_t seed, long t_max, unsigned threads) {
    if (replicas < 1) throw ValidationError("replicas must be >= 1");
    const SpinConfig reference = CoordRef::balanced(spec).configuration(spec);
    const SpinConfig adversary = SpinConfig::all_plus(spec);
    UpperBoundResult out;
    out.records.resize(static_cast<std::size_t>(replicas));
    parallel_for(
        out.records.size(),
        [&](std::size_t r) {
            out.records[r] = full_coupling_run(reference, adversary, reference, spec, sd, t_max, seed, r);
        },
        threads);
    std::vector<std::optional<long>> taus;
    for (const auto& rec : out.records) taus.push_back(rec.tau_tot);
    out.tail = tail_curve(taus, t_grid, t_max);
    return out;
}

}  // namespace mpising
