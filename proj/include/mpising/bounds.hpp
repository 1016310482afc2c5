#pragma once

#include <span>
#include <vector>

#include "mpising/magchain.hpp"
#include "mpising/spectral.hpp"

namespace mpising {

struct LowerBoundResult {
    double gamma = 0.0;
    double zeta = 0.0;
    long t_star = 0;
    bool clamped = false;  ///< t_n - gamma n / upsilon was negative and t_star was set to 0
    std::vector<int> start;
    double e_start = 0.0;
    double e_stat = 0.0;
    double var_start = 0.0;
    double var_stat = 0.0;
    double r = 0.0;
    double tv_lower = 0.0;
    double tv_exact = 0.0;
};

/// min(1, 3 upsilon / beta^2) / 2, the midpoint of the admissible range.
double default_zeta(const SpectralData& sd, double beta);

/// Plus counts nearest to S = zeta p with every S_i > 0.
std::vector<int> scaled_start(const PartitionSpec& spec, double zeta);

/// Exact moments of Z = sum a_i S_i at t_star = ceil(t_n - gamma n / upsilon)
/// from S = zeta p and under stationarity; tv_lower = 1 - 8/r^2 clamped to
/// [0, 1], with r = |E_start - E_stat| / sqrt(max(Var_start, Var_stat)).
LowerBoundResult lower_bound_at(const MagChain& chain, const SpectralData& sd, double gamma, double zeta);

/// Same for a list of gammas, sharing one evolution.
std::vector<LowerBoundResult> lower_bound_sweep(const MagChain& chain, const SpectralData& sd,
                                                std::span<const double> gammas, double zeta);

struct ConductanceResult {
    int n = 0;
    double beta = 0.0;
    double phi_A = 0.0;
    double mu_A = 0.0;
    double mu_B = 0.0;
    double tmix_lower = 0.0;
};

/// Exact conductance of A = {sum S > 0} and mass of B = {|sum S| <= 1/n}.
ConductanceResult conductance_cut(const MagChain& chain);

struct FreeEnergySample {
    double gamma = 0.0;
    double f = 0.0;
    double df = 0.0;
    double d2f = 0.0;
};

/// f, f', f'' along k = 1/2 + gamma v. Every |gamma v_i| must be < 1/2.
std::vector<FreeEnergySample> f_profile(std::span<const double> p, double beta, std::span<const double> v,
                                        std::span<const double> gamma_grid);

/// f''(0) = 4 beta ((sum v p)^2 - sum v^2 p^2) - 4 sum p v^2.
double f_second_at_zero(std::span<const double> p, double beta, std::span<const double> v);

/// Root in beta of f''(0) by bisection inside the first sign change of an
/// ascending beta grid. Throws ConvergenceError if the grid has none.
double critical_beta_scan(std::span<const double> p, std::span<const double> v, std::span<const double> beta_grid);

}  // namespace mpising
