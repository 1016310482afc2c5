#include "mpising/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mpising/errors.hpp"

namespace mpising {

double CriticalBeta::value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

Eigen::MatrixXd build_matrix(const PartitionSpec& spec) {
    const int m = spec.m();
    const double n = spec.n();
    Eigen::MatrixXd a(m, m);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            a(k, j) = (k == j) ? 1.0 - 1.0 / n : spec.p(k) * spec.beta() / n;
        }
    }
    return a;
}

Eigen::MatrixXd symmetric_interaction(std::span<const double> p) {
    const auto m = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i != j) c(i, j) = std::sqrt(p[i] * p[j]);
        }
    }
    return c;
}

SpectralData perron(const PartitionSpec& spec, int max_iterations, double tol) {
    const int m = spec.m();
    const auto& p = spec.p();

    // Shifting by max p_i makes the matrix positive semidefinite, so the
    // Perron root is also the dominant eigenvalue in magnitude.
    const double shift = *std::max_element(p.begin(), p.end());
    Eigen::MatrixXd b = symmetric_interaction(p);
    b.diagonal().array() += shift;

    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x(i) = std::sqrt(p[i]);
    x.normalize();

    double rho = x.dot(b * x);
    int it = 0;
    for (;; ++it) {
        if (it >= max_iterations) {
            throw ConvergenceError("Perron power iteration did not converge for " + spec.describe());
        }
        Eigen::VectorXd y = b * x;
        y.normalize();
        const Eigen::VectorXd by = b * y;
        const double next = y.dot(by);
        const double residual = (by - next * y).lpNorm<Eigen::Infinity>();
        const double change = std::abs(next - rho);
        x = y;
        rho = next;
        if (change <= tol && residual <= tol) break;
    }

    SpectralData sd;
    sd.iterations = it + 1;
    sd.lambda = std::max(0.0, rho - shift);
    if (m == 1) sd.lambda = 0.0;

    double total = 0.0;
    sd.a.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        sd.a[i] = std::abs(x(i)) / std::sqrt(p[i]);
        total += sd.a[i];
    }
    for (auto& v : sd.a) v /= total;

    const double n = spec.n();
    const double beta = spec.beta();
    sd.g = 1.0 - 1.0 / n + beta * sd.lambda / n;
    sd.upsilon = 1.0 - beta * sd.lambda;

    if (m == 1) {
        sd.beta_cr = CriticalBeta::infinite();
    } else {
        double ap = 0.0;
        for (int i = 0; i < m; ++i) ap += sd.a[i] * p[i];
        sd.beta_cr = CriticalBeta::finite(1.0 / ((m - 1) * ap));
    }
    return sd;
}

double perron_root_bisection(std::span<const double> p) {
    if (p.size() <= 1) return 0.0;
    auto excess = [&](double lambda) {
        double s = 0.0;
        for (double pj : p) s += pj / (lambda + pj);
        return s - 1.0;
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> interaction_spectrum(std::span<const double> p, int max_iterations) {
    const auto m = static_cast<Eigen::Index>(p.size());
    // Eigenvalues lie in [-max p, 1), so a unit shift keeps every shifted
    // eigenvalue positive and away from zero, which deflation needs.
    const double shift = 1.0;
    Eigen::MatrixXd b = symmetric_interaction(p);
    b.diagonal().array() += shift;

    std::vector<Eigen::VectorXd> found;
    std::vector<double> eigenvalues;
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::VectorXd x(m);
        for (Eigen::Index i = 0; i < m; ++i) x(i) = 1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i + 1) + 0.7 * k);
        auto deflate = [&](Eigen::VectorXd& v) {
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& f : found) v -= f.dot(v) * f;
        };
        deflate(x);
        x.normalize();
        double rho = x.dot(b * x);
        for (int it = 0; it < max_iterations; ++it) {
            Eigen::VectorXd y = b * x;
            deflate(y);
            const double norm = y.norm();
            if (norm < 1e-300) {
                rho = 0.0;
                break;
            }
            y /= norm;
            const double next = y.dot(b * y);
            Eigen::VectorXd r = b * y - next * y;
            deflate(r);
            x = y;
            rho = next;
            if (r.lpNorm<Eigen::Infinity>() <= 1e-13) break;
        }
        found.push_back(x);
        eigenvalues.push_back(rho - shift);
    }
    std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
    return eigenvalues;
}

bool IdentityReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

const IdentityCheck* IdentityReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

IdentityReport verify_identities(const SpectralData& sd, const PartitionSpec& spec, double tol) {
    const int m = spec.m();
    const auto& p = spec.p();
    const auto& a = sd.a;
    const double beta = spec.beta();
    IdentityReport report;
    auto add = [&](std::string name, double residual) {
        report.checks.push_back({std::move(name), residual, std::isfinite(residual) && residual <= tol});
    };

    // a_1 >= ... >= a_m > 0, sum a = 1
    {
        double r = std::abs(std::accumulate(a.begin(), a.end(), 0.0) - 1.0);
        for (int i = 0; i + 1 < m; ++i) r = std::max(r, a[i + 1] - a[i]);
        if (a.back() <= 0.0) r = std::max(r, 1.0);
        add("a_ordered_normalized", r);
    }

    double ap = 0.0;
    double a2p = 0.0;
    double a2p2 = 0.0;
    for (int i = 0; i < m; ++i) {
        ap += a[i] * p[i];
        a2p += a[i] * a[i] * p[i];
        a2p2 += a[i] * a[i] * p[i] * p[i];
    }

    // sum a_i p_i <= 1/m, with equality exactly when the p_i coincide
    {
        const bool equal_p = std::all_of(spec.proportions().begin(), spec.proportions().end(),
                                         [&](const Rational& r) { return r == spec.proportions().front(); });
        const double gap = ap - 1.0 / m;
        add("weighted_sum_bound", equal_p ? std::abs(gap) : std::max(0.0, gap));
    }

    // a^T (p 1^T - diag p) = lambda a^T, the n-free form of a^T A = g a^T
    {
        double r = 0.0;
        for (int j = 0; j < m; ++j) {
            double col = 0.0;
            for (int k = 0; k < m; ++k) {
                if (k != j) col += a[k] * p[k];
            }
            r = std::max(r, std::abs(col - sd.lambda * a[j]));
        }
        add("left_eigenvector", r);
    }

    // upsilon = 1 - beta (m-1) sum a_i p_i = 1 - beta / beta_cr
    {
        const double via_a = 1.0 - beta * (m - 1) * ap;
        const double via_cr = 1.0 - sd.beta_cr.ratio(beta);
        add("upsilon_identity", std::max(std::abs(sd.upsilon - via_a), std::abs(sd.upsilon - via_cr)));
    }

    // (beta p_i + 1 - upsilon) a_i is constant in i
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int i = 0; i < m; ++i) {
            const double v = (beta * p[i] + 1.0 - sd.upsilon) * a[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        add("balance_constant", hi - lo);
    }

    // beta_cr = sum a^2 p / ((sum a p)^2 - sum a^2 p^2)
    {
        const double denom = ap * ap - a2p2;
        double r = 0.0;
        if (sd.beta_cr.is_infinite()) {
            r = std::abs(denom);
        } else {
            const double rhs = a2p / denom;
            r = std::abs(rhs - sd.beta_cr.value()) / std::max(1.0, sd.beta_cr.value());
        }
        add("critical_beta_quadratic", r);
    }

    // n(I - C) is positive definite exactly below beta_cr; its eigenvalues are 1 - beta*mu_k.
    {
        const auto mu = interaction_spectrum(p);
        double min_eig = std::numeric_limits<double>::infinity();
        for (double v : mu) min_eig = std::min(min_eig, 1.0 - beta * v);
        const bool high = sd.beta_cr.exceeds(beta);
        const double margin = std::abs(1.0 - sd.beta_cr.ratio(beta));
        double r = 0.0;
        if (margin > 1e-9 && (min_eig > 0.0) != high) r = std::abs(min_eig);
        add("positive_definite_threshold", r);
    }
    return report;
}

bool NormBound::holds(double tol) const {
    if (lhs > rhs + tol) return false;
    for (std::size_t j = 0; j < component_lhs.size(); ++j) {
        if (component_lhs[j] > component_rhs[j] + tol) return false;
    }
    return true;
}

NormBound norm_bound_check(const SpectralData& sd, const PartitionSpec& spec, std::span<const double> s, long t) {
    if (t < 0) throw ValidationError("norm_bound_check requires t >= 0");
    const int m = spec.m();
    if (static_cast<int>(s.size()) != m) throw ValidationError("s must have m components");
    for (int i = 0; i < m; ++i) {
        if (s[i] < 0.0 || s[i] > spec.p(i)) throw ValidationError("s must satisfy 0 <= s_i <= p_i");
    }
    const Eigen::MatrixXd a = build_matrix(spec);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(s.data(), m);
    for (long k = 0; k < t; ++k) v = a * v;

    double weighted = 0.0;
    for (int i = 0; i < m; ++i) weighted += s[i] * s[i] / spec.p(i);
    NormBound out;
    out.lhs = v.lpNorm<1>();
    out.rhs = std::pow(sd.g, static_cast<double>(t)) * std::sqrt(weighted);
    for (int j = 0; j < m; ++j) {
        out.component_lhs.push_back(v(j));
        out.component_rhs.push_back(std::sqrt(spec.p(j)) * out.rhs);
    }
    return out;
}

}  // namespace mpising
