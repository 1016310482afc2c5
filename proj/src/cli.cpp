#include "mpising/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "mpising/bounds.hpp"
#include "mpising/coordchain.hpp"
#include "mpising/coupling.hpp"
#include "mpising/errors.hpp"
#include "mpising/glauber.hpp"
#include "mpising/magchain.hpp"
#include "mpising/oracle.hpp"
#include "mpising/spectral.hpp"

namespace mpising {

namespace {

struct Config {
    std::string command;
    int m = 0;
    std::string p;
    double beta = 1.0;
    int n = 0;
    std::string n_ladder;
    long t_max = -1;
    std::string gamma;
    double zeta = std::numeric_limits<double>::quiet_NaN();
    int replicas = 1000;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string out;
    std::string tail_out;
    double mem_cap = static_cast<double>(kDefaultStateCap);
    std::string series = "tv";
    std::string chain = "mag";
    std::string start = "all-plus";
    std::string tail_of = "tot";
    long stride = 1;
    bool paired = false;
    unsigned threads = 0;
};

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string describe(const Config& c) {
    std::ostringstream os;
    os << "command=" << c.command << " m=" << c.m << " p=" << (c.p.empty() ? "equal" : c.p) << " beta=" << num(c.beta)
       << " n=" << c.n << " n_ladder=" << (c.n_ladder.empty() ? "-" : c.n_ladder) << " t_max=" << c.t_max
       << " gamma=" << (c.gamma.empty() ? "-" : c.gamma) << " zeta=" << (std::isnan(c.zeta) ? "default" : num(c.zeta))
       << " replicas=" << c.replicas << " mem_cap=" << num(c.mem_cap) << " series=" << c.series
       << " chain=" << c.chain << " start=" << c.start << " tail_of=" << c.tail_of << " stride=" << c.stride
       << " paired=" << (c.paired ? 1 : 0);
    return os.str();
}

void header(std::ostream& os, const Config& c, bool stochastic) {
    os << "# mpising " << kVersion << '\n';
    os << "# config: " << describe(c) << '\n';
    if (stochastic) os << "# seed: " << c.seed << '\n';
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ValidationError("cannot parse number '" + item + "'");
        }
        if (used != item.size()) throw ValidationError("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("empty number list");
    return out;
}

std::vector<Rational> proportions_of(const Config& c) {
    if (c.p.empty()) {
        const int m = c.m == 0 ? 2 : c.m;
        if (m < 1) throw ValidationError("m must be >= 1");
        return std::vector<Rational>(static_cast<std::size_t>(m), Rational(1, m));
    }
    auto p = parse_proportions(c.p);
    if (c.m != 0 && static_cast<int>(p.size()) != c.m) {
        throw ValidationError("--m disagrees with the number of proportions in --p");
    }
    return p;
}

std::vector<int> sizes_of(const Config& c) {
    if (!c.n_ladder.empty()) return parse_ladder(c.n_ladder);
    if (c.n <= 0) throw ValidationError("--n (positive) or --n-ladder is required");
    return {c.n};
}

PartitionSpec spec_for(const Config& c, int n) { return PartitionSpec::make(proportions_of(c), n, c.beta); }

std::size_t cap_of(const Config& c) {
    if (!(c.mem_cap >= 1.0)) throw ValidationError("--mem-cap must be >= 1");
    return static_cast<std::size_t>(c.mem_cap);
}

double nominal_tn(int n, double upsilon) { return n * std::log(static_cast<double>(n)) / (2.0 * upsilon); }

int cmd_spectral(const Config& c, std::ostream& out) {
    const auto spec = spec_for(c, c.n > 0 ? c.n : 100);
    const auto sd = perron(spec);
    const auto report = verify_identities(sd, spec);
    nlohmann::ordered_json j;
    j["schema_version"] = kJsonSchemaVersion;
    j["config"] = {{"m", spec.m()}, {"n", spec.n()}, {"beta", spec.beta()}};
    for (const auto& r : spec.proportions()) j["config"]["p"].push_back(r.str());
    j["lambda"] = sd.lambda;
    j["g"] = sd.g;
    j["a"] = sd.a;
    j["upsilon"] = sd.upsilon;
    if (sd.beta_cr.is_infinite()) {
        j["beta_cr"] = "inf";
    } else {
        j["beta_cr"] = sd.beta_cr.value();
    }
    j["iterations"] = sd.iterations;
    j["identity_residuals"] = nlohmann::ordered_json::object();
    for (const auto& check : report.checks) j["identity_residuals"][check.name] = check.residual;
    j["passed"] = report.ok();
    out << j.dump(2) << '\n';
    return report.ok() ? 0 : 1;
}

std::vector<long> time_grid(long t_max, long stride) {
    if (t_max < 0) throw ValidationError("--t-max is required");
    if (stride < 1) throw ValidationError("--stride must be >= 1");
    std::vector<long> grid;
    for (long t = 0; t <= t_max; t += stride) grid.push_back(t);
    if (grid.back() != t_max) grid.push_back(t_max);
    return grid;
}

std::vector<int> mag_start(const Config& c, const MagChain& chain) {
    if (c.start == "all-plus") return chain.all_plus();
    if (c.start == "all-minus") return chain.all_minus();
    throw ValidationError("--start for the magnetization chain must be all-plus, all-minus or proxy");
}

int cmd_tv(const Config& c, std::ostream& out) {
    const auto spec = spec_for(c, c.n);
    header(out, c, false);
    if (c.chain == "mag") {
        const MagChain chain(spec, cap_of(c));
        if (c.series == "stationary") {
            for (int i = 1; i <= spec.m(); ++i) out << "u_" << i << ',';
            out << "prob\n";
            const auto pi = chain.stationary();
            for (std::size_t idx = 0; idx < pi.size(); ++idx) {
                for (int v : chain.space().decode(idx)) out << v << ',';
                out << num(pi[idx]) << '\n';
            }
            return 0;
        }
        const auto grid = time_grid(c.t_max, c.stride);
        if (c.series == "variance") {
            out << "t,sum_var,n_sum_var\n";
            for (const auto& v : chain.variance_trajectory(mag_start(c, chain), grid)) {
                out << v.t << ',' << num(v.sum_var) << ',' << num(v.n_sum_var) << '\n';
            }
            return 0;
        }
        if (c.series != "tv") throw ValidationError("--series must be tv, variance or stationary");
        const auto curve = c.start == "proxy" ? extreme_start_tv(chain, grid) : chain.tv_curve(mag_start(c, chain), grid);
        out << "t,tv\n";
        for (const auto& [t, tv] : curve) out << t << ',' << num(tv) << '\n';
        return 0;
    }
    if (c.chain != "coord") throw ValidationError("--chain must be mag or coord");
    const CoordChain chain(spec, CoordRef::balanced(spec), cap_of(c));
    if (c.series == "stationary") {
        out << "chain";
        for (int i = 1; i <= spec.m(); ++i) out << ",U_" << i << ",V_" << i;
        out << ",prob\n";
        const auto nu = chain.stationary();
        for (std::size_t idx = 0; idx < nu.size(); ++idx) {
            out << "coord";
            for (int v : chain.space().decode(idx)) out << ',' << v;
            out << ',' << num(nu[idx]) << '\n';
        }
        return 0;
    }
    if (c.series != "tv") throw ValidationError("the coordinate chain supports --series tv or stationary");
    out << "chain,t,tv\n";
    for (const auto& [t, tv] : chain.exact_tv_full(time_grid(c.t_max, c.stride))) {
        out << "coord," << t << ',' << num(tv) << '\n';
    }
    return 0;
}

int cmd_cutoff_scan(const Config& c, std::ostream& out) {
    header(out, c, false);
    out << "n,t_n,tmix_25,tmix_75,tmix_25_over_tn,tmix_75_over_tn,ratio_25_75,window_over_n,window_over_nlogn\n";
    const double eps[] = {0.25, 0.75};
    for (int n : sizes_of(c)) {
        const auto spec = spec_for(c, n);
        const auto sd = perron(spec);
        if (!(sd.upsilon > 0.0)) throw ValidationError("cutoff-scan needs beta < beta_cr");
        const double t_n = nominal_tn(n, sd.upsilon);
        const MagChain chain(spec, cap_of(c));
        const long cap = c.t_max >= 0 ? c.t_max : static_cast<long>(std::ceil(20.0 * t_n)) + 10L * n;
        const auto tm = chain.mixing_times(chain.all_plus(), eps, cap);
        if (!tm[0] || !tm[1]) throw ConvergenceError("TV did not fall below 0.25 within t_max at n=" + std::to_string(n));
        const double t25 = static_cast<double>(*tm[0]);
        const double t75 = static_cast<double>(*tm[1]);
        const double window = t25 - t75;
        out << n << ',' << num(t_n) << ',' << *tm[0] << ',' << *tm[1] << ',' << num(t25 / t_n) << ',' << num(t75 / t_n)
            << ',' << num(t75 > 0 ? t25 / t75 : std::numeric_limits<double>::infinity()) << ',' << num(window / n) << ','
            << num(window / (n * std::log(static_cast<double>(n)))) << '\n';
    }
    return 0;
}

std::string opt_time(const std::optional<long>& t) { return t ? std::to_string(*t) : std::string("inf"); }

int cmd_coupling(const Config& c, std::ostream& out) {
    if (!c.has_seed) throw ValidationError("--seed is required for stochastic subcommands");
    if (c.replicas < 1) throw ValidationError("--replicas must be >= 1");
    if (c.tail_of != "mag" && c.tail_of != "tot") throw ValidationError("--tail-of must be mag or tot");
    const auto spec = spec_for(c, c.n);
    const auto sd = perron(spec);
    if (!(sd.upsilon > 0.0)) throw ValidationError("the coupling construction needs beta < beta_cr");
    const long t_n = cutoff_time(spec.n(), sd.upsilon);
    const auto gammas = parse_doubles(c.gamma.empty() ? "0,1,2,4,10" : c.gamma);
    std::vector<long> grid;
    for (double g : gammas) grid.push_back(t_n + static_cast<long>(std::ceil(g * spec.n())));
    std::sort(grid.begin(), grid.end());
    const long t_max = c.t_max >= 0 ? c.t_max : grid.back();
    const auto result = upper_bound_curve(spec, sd, grid, c.replicas, c.seed, t_max, c.threads);

    header(out, c, true);
    out << "replica,tau_mag,tau_tot,censored\n";
    for (std::size_t r = 0; r < result.records.size(); ++r) {
        const auto& rec = result.records[r];
        out << r << ',' << opt_time(rec.tau_mag) << ',' << opt_time(rec.tau_tot) << ',' << (rec.censored() ? 1 : 0)
            << '\n';
    }
    if (!c.tail_out.empty()) {
        std::ofstream tail(c.tail_out);
        if (!tail) throw std::runtime_error("cannot open " + c.tail_out);
        std::vector<std::optional<long>> taus;
        for (const auto& rec : result.records) taus.push_back(c.tail_of == "mag" ? rec.tau_mag : rec.tau_tot);
        header(tail, c, true);
        tail << "t,p_tail,ci_lo,ci_hi\n";
        for (const auto& pt : tail_curve(taus, grid, t_max)) {
            tail << pt.t << ',' << num(pt.p_tail) << ',' << num(pt.ci.lo) << ',' << num(pt.ci.hi) << '\n';
        }
    }
    return 0;
}

int cmd_lower(const Config& c, std::ostream& out) {
    header(out, c, false);
    out << "n,beta,gamma,zeta,t_star,r,tv_lower,tv_exact\n";
    const auto gammas = parse_doubles(c.gamma.empty() ? "1,2,3,4" : c.gamma);
    for (int n : sizes_of(c)) {
        const auto spec = spec_for(c, n);
        const auto sd = perron(spec);
        const double zeta = std::isnan(c.zeta) ? default_zeta(sd, spec.beta()) : c.zeta;
        const MagChain chain(spec, cap_of(c));
        for (const auto& r : lower_bound_sweep(chain, sd, gammas, zeta)) {
            out << n << ',' << num(spec.beta()) << ',' << num(r.gamma) << ',' << num(r.zeta) << ',' << r.t_star << ','
                << num(r.r) << ',' << num(r.tv_lower) << ',' << num(r.tv_exact) << '\n';
        }
    }
    return 0;
}

int cmd_conductance(const Config& c, std::ostream& out) {
    header(out, c, false);
    out << "n,beta,phi_A,mu_A,mu_B,tmix_lower\n";
    for (int n : sizes_of(c)) {
        const MagChain chain(spec_for(c, n), cap_of(c));
        const auto r = conductance_cut(chain);
        out << r.n << ',' << num(r.beta) << ',' << num(r.phi_A) << ',' << num(r.mu_A) << ',' << num(r.mu_B) << ','
            << num(r.tmix_lower) << '\n';
    }
    return 0;
}

int cmd_oracle_check(const Config& c, std::ostream& out) {
    const auto spec = spec_for(c, c.n);
    const FullChain full(spec);
    const MagChain chain(spec, cap_of(c));
    const long t_max = c.t_max >= 0 ? c.t_max : 4L * spec.n();
    const auto grid = time_grid(t_max, c.stride);
    std::vector<std::pair<std::string, double>> checks;

    const auto lumped_mu = full.lump(full.gibbs(), chain.space());
    const auto pi = chain.stationary();
    double r = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) r = std::max(r, std::abs(pi[k] - lumped_mu[k]));
    checks.emplace_back("stationary", r);

    r = 0.0;
    for (std::size_t idx = 0; idx < chain.space().size(); ++idx) {
        const auto u = chain.space().decode(idx);
        DistVector row(full.size(), 0.0);
        for (const auto& [y, p] : full.row(full.representative(u))) row[y] += p;
        const auto lumped = full.lump(row, chain.space());
        DistVector mine(chain.space().size(), 0.0);
        for (const auto& [y, p] : chain.transition_probs(u)) mine[chain.space().index(y)] += p;
        for (std::size_t k = 0; k < mine.size(); ++k) r = std::max(r, std::abs(mine[k] - lumped[k]));
    }
    checks.emplace_back("kernel", r);

    const auto mine = chain.tv_curve(chain.all_plus(), grid);
    const auto theirs = full.tv_curve(full.representative(chain.all_plus()), grid);
    r = 0.0;
    for (std::size_t k = 0; k < mine.size(); ++k) r = std::max(r, std::abs(mine[k].second - theirs[k].second));
    checks.emplace_back("tv_curve_all_plus", r);

    const CoordChain coord(spec, CoordRef::balanced(spec), cap_of(c));
    const auto coord_tv = coord.exact_tv_full(grid);
    const auto ref_tv = full.tv_curve(full.representative(coord.ref().tilde_u), grid);
    r = 0.0;
    for (std::size_t k = 0; k < coord_tv.size(); ++k) r = std::max(r, std::abs(coord_tv[k].second - ref_tv[k].second));
    checks.emplace_back("tv_curve_reference", r);

    r = std::abs(conductance_cut(chain).phi_A - full.conductance());
    checks.emplace_back("conductance", r);

    header(out, c, false);
    out << "check,residual,passed\n";
    bool ok = true;
    for (const auto& [name, res] : checks) {
        const bool pass = res <= 1e-10;
        ok = ok && pass;
        out << name << ',' << num(res) << ',' << (pass ? 1 : 0) << '\n';
    }
    return ok ? 0 : 1;
}

SpinConfig named_start(const std::string& name, const PartitionSpec& spec) {
    if (name == "all-plus") return SpinConfig::all_plus(spec);
    if (name == "all-minus") return SpinConfig::all_minus(spec);
    if (name == "balanced") return CoordRef::balanced(spec).configuration(spec);
    throw ValidationError("--start must be all-plus, all-minus or balanced");
}

int cmd_simulate(const Config& c, std::ostream& out) {
    if (!c.has_seed) throw ValidationError("--seed is required for stochastic subcommands");
    const auto spec = spec_for(c, c.n);
    const auto sd = perron(spec);
    ReplicaOptions opts;
    opts.t_max = c.t_max;
    opts.replicas = c.replicas;
    opts.seed = c.seed;
    opts.stride = c.stride;
    opts.threads = c.threads;
    const SpinConfig start = named_start(c.start, spec);
    const SpinConfig partner = SpinConfig::all_minus(spec);
    const auto run = run_replicas(spec, start, c.paired ? &partner : nullptr, sd.a, opts);
    header(out, c, true);
    write_trajectory_csv(out, run);
    return 0;
}

int dispatch(const Config& c, std::ostream& out) {
    if (c.command == "spectral") return cmd_spectral(c, out);
    if (c.command == "tv") return cmd_tv(c, out);
    if (c.command == "cutoff-scan") return cmd_cutoff_scan(c, out);
    if (c.command == "coupling") return cmd_coupling(c, out);
    if (c.command == "lower") return cmd_lower(c, out);
    if (c.command == "conductance") return cmd_conductance(c, out);
    if (c.command == "oracle-check") return cmd_oracle_check(c, out);
    if (c.command == "simulate") return cmd_simulate(c, out);
    throw ValidationError("unknown subcommand " + c.command);
}

}  // namespace

std::vector<int> parse_ladder(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ValidationError("n-ladder must look like start:stop");
    int lo = 0;
    int hi = 0;
    try {
        std::size_t used = 0;
        lo = std::stoi(text.substr(0, colon), &used);
        if (used != colon) throw ValidationError("");
        const std::string rest = text.substr(colon + 1);
        hi = std::stoi(rest, &used);
        if (used != rest.size()) throw ValidationError("");
    } catch (const std::exception&) {
        throw ValidationError("n-ladder must look like start:stop with integers");
    }
    if (lo < 1 || hi < lo) throw ValidationError("n-ladder needs 1 <= start <= stop");
    std::vector<int> out;
    for (long n = lo; n <= hi; n *= 2) out.push_back(static_cast<int>(n));
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Glauber dynamics of the Ising model on complete multipartite graphs"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.require_subcommand(1);

    Config c;
    app.add_option("--m", c.m, "number of partitions (default 2 when --p is absent)");
    // Config files split list values on commas; Join puts them back together.
    app.add_option("--p", c.p, "comma-separated proportions, e.g. 1/4,3/4")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::Join);
    app.add_option("--beta", c.beta, "inverse temperature");
    app.add_option("--n", c.n, "number of vertices");
    app.add_option("--n-ladder", c.n_ladder, "start:stop, doubling");
    app.add_option("--t-max", c.t_max, "last time step");
    app.add_option("--gamma", c.gamma, "comma-separated gamma values")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::Join);
    app.add_option("--zeta", c.zeta, "start scale for the lower bound");
    app.add_option("--replicas", c.replicas, "Monte Carlo replicas");
    auto* seed_opt = app.add_option("--seed", c.seed, "RNG seed");
    app.add_option("--out", c.out, "output file (default stdout)");
    app.add_option("--tail-out", c.tail_out, "coupling: tail CSV file");
    app.add_option("--tail-of", c.tail_of, "coupling: tail of mag or tot");
    app.add_option("--mem-cap", c.mem_cap, "maximum number of lumped states");
    app.add_option("--series", c.series, "tv: tv, variance or stationary");
    app.add_option("--chain", c.chain, "tv: mag or coord");
    app.add_option("--start", c.start, "start configuration");
    app.add_option("--stride", c.stride, "time grid stride");
    app.add_option("--threads", c.threads, "worker threads (0 = all cores); output does not depend on it");
    app.add_flag("--paired", c.paired, "simulate: couple with an all-minus partner");

    for (const char* name : {"spectral", "tv", "cutoff-scan", "coupling", "lower", "conductance", "oracle-check",
                             "simulate"}) {
        app.add_subcommand(name)->fallthrough();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    c.command = app.get_subcommands().front()->get_name();
    c.has_seed = seed_opt->count() > 0;

    try {
        if (c.out.empty()) return dispatch(c, out);
        std::ostringstream buffer;
        const int code = dispatch(c, buffer);
        std::ofstream file(c.out);
        if (!file) throw std::runtime_error("cannot open " + c.out);
        file << buffer.str();
        return code;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace mpising
