#include "mpising/partition.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mpising/errors.hpp"

namespace mpising {

namespace {

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError("cannot parse integer '" + std::string(s) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = num / g;
    den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ValidationError("empty proportion");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational(parse_int(trim(text.substr(0, slash))), parse_int(trim(text.substr(slash + 1))));
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        const auto whole = text.substr(0, dot);
        const auto frac = text.substr(dot + 1);
        if (frac.size() > 15) throw ValidationError("too many decimal digits in '" + std::string(text) + "'");
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
        const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
        return Rational(w * den + f, den);
    }
    return Rational(parse_int(text), 1);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational a, Rational b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const std::int64_t den = a.den_ / g * b.den_;
    return Rational(a.num_ * (den / a.den_) + b.num_ * (den / b.den_), den);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    // Denominators stay small (they divide n), so cross-multiplication is safe.
    return a.num_ * b.den_ <=> b.num_ * a.den_;
}

std::vector<Rational> parse_proportions(std::string_view text) {
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(Rational::parse(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

PartitionSpec PartitionSpec::make(std::vector<Rational> p, int n, double beta) {
    if (p.empty()) throw ValidationError("m must be at least 1");
    if (n <= 0) throw ValidationError("n must be a positive integer");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be a finite non-negative real");

    Rational total(0, 1);
    for (const auto& r : p) {
        if (r.num() <= 0) throw ValidationError("every proportion p_i must be > 0");
        total = total + r;
    }
    if (total != Rational(1, 1)) {
        throw ValidationError("proportions must sum to 1 exactly (got " + total.str() + ")");
    }
    if (!std::is_sorted(p.begin(), p.end())) {
        throw ValidationError("proportions must be sorted non-decreasing (p_1 <= ... <= p_m)");
    }

    PartitionSpec spec;
    spec.n_ = n;
    spec.beta_ = beta;
    int offset = 0;
    for (const auto& r : p) {
        if ((static_cast<std::int64_t>(n) * r.num()) % r.den() != 0) {
            throw ValidationError("n*p_i must be a positive integer for every partition (n=" + std::to_string(n) +
                                  ", p_i=" + r.str() + ")");
        }
        const int size = static_cast<int>(static_cast<std::int64_t>(n) * r.num() / r.den());
        spec.sizes_.push_back(size);
        spec.offsets_.push_back(offset);
        spec.p_double_.push_back(r.value());
        offset += size;
    }
    spec.p_ = std::move(p);
    return spec;
}

PartitionSpec PartitionSpec::uniform(int m, int n, double beta) {
    if (m <= 0) throw ValidationError("m must be at least 1");
    return make(std::vector<Rational>(static_cast<std::size_t>(m), Rational(1, m)), n, beta);
}

Site PartitionSpec::locate(int site) const {
    int part = m() - 1;
    while (part > 0 && offsets_[part] > site) --part;
    return Site{part, site - offsets_[part]};
}

std::string PartitionSpec::describe() const {
    std::ostringstream os;
    os << "m=" << m() << " p=";
    for (int i = 0; i < m(); ++i) os << (i ? "," : "") << p_[i].str();
    os << " n=" << n_ << " beta=" << beta_;
    return os.str();
}

}  // namespace mpising
