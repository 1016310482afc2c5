#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpising/partition.hpp"

namespace mpising {

/// Critical inverse temperature. A single partition has no interaction, so
/// the threshold is infinite; that case is a distinct state rather than a
/// large float.
class CriticalBeta {
public:
    static CriticalBeta infinite() { return CriticalBeta(true, 0.0); }
    static CriticalBeta finite(double value) { return CriticalBeta(false, value); }

    bool is_infinite() const { return infinite_; }
    /// +infinity when infinite.
    double value() const;
    /// True iff beta lies strictly in the high-temperature regime.
    bool exceeds(double beta) const { return infinite_ || beta < value_; }
    /// beta / beta_cr, zero when infinite.
    double ratio(double beta) const { return infinite_ ? 0.0 : beta / value_; }

private:
    CriticalBeta(bool infinite, double value) : infinite_(infinite), value_(value) {}
    bool infinite_;
    double value_;
};

/// Perron data of the contraction matrix A.
struct SpectralData {
    double lambda = 0.0;   ///< Perron root of p 1^T - diag(p) (n-free)
    double g = 0.0;        ///< Perron root of A, 1 - 1/n + beta*lambda/n
    std::vector<double> a; ///< left Perron vector of A, l1-normalized
    double upsilon = 0.0;  ///< n(1 - g) = 1 - beta*lambda
    CriticalBeta beta_cr = CriticalBeta::infinite();
    int iterations = 0;    ///< power iterations used
};

/// Contraction matrix A: diagonal 1 - 1/n, row k off-diagonal p_k*beta/n.
Eigen::MatrixXd build_matrix(const PartitionSpec& spec);

/// Symmetrized n-free interaction matrix D^{-1}(p 1^T - diag p)D with
/// D = diag(sqrt p): zero diagonal, sqrt(p_i p_j) off the diagonal.
Eigen::MatrixXd symmetric_interaction(std::span<const double> p);

/// Perron data via shifted power iteration on the symmetric interaction
/// matrix. Throws ConvergenceError past the iteration cap.
SpectralData perron(const PartitionSpec& spec, int max_iterations = 100000, double tol = 1e-14);

/// Perron root from bisection on 1 = sum_j p_j / (lambda + p_j). Independent
/// of the eigen-solver; used as a cross-check.
double perron_root_bisection(std::span<const double> p);

/// All eigenvalues (descending) of the symmetric interaction matrix, by power
/// iteration with Hotelling deflation.
std::vector<double> interaction_spectrum(std::span<const double> p, int max_iterations = 100000);

struct IdentityCheck {
    std::string name;
    double residual = 0.0;
    bool passed = false;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool ok() const;
    const IdentityCheck* find(const std::string& name) const;
};

/// Evaluates the Perron-data identities; each residual must be <= tol.
IdentityReport verify_identities(const SpectralData& sd, const PartitionSpec& spec, double tol = 1e-10);

struct NormBound {
    double lhs = 0.0;                  ///< ||A^t s||_1
    double rhs = 0.0;                  ///< g^t sqrt(sum s_i^2 / p_i)
    std::vector<double> component_lhs; ///< e_j^T A^t s
    std::vector<double> component_rhs; ///< sqrt(p_j) * rhs
    bool holds(double tol = 1e-12) const;
};

/// Compares ||A^t s||_1 with g^t sqrt(sum s_i^2/p_i) for 0 <= s <= p.
NormBound norm_bound_check(const SpectralData& sd, const PartitionSpec& spec, std::span<const double> s, long t);

}  // namespace mpising
