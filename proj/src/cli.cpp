#include "ham/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "ham/asymptotic_constants.hpp"
#include "ham/chaos_moments.hpp"
#include "ham/clt_harness.hpp"
#include "ham/config.hpp"
#include "ham/errors.hpp"
#include "ham/hilbert.hpp"
#include "ham/malliavin.hpp"
#include "ham/noise_sim.hpp"

namespace ham {

namespace {

namespace fs = std::filesystem;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// A CSV table plus its audit sidecar, one audit line per data row.
class Table {
public:
    Table(std::string name, std::string header) : name_(std::move(name)), header_(std::move(header)) {}

    void row(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
        rows_.push_back(line);
    }
    std::size_t size() const { return rows_.size(); }

    std::string write(const fs::path& dir, const Scenario& sc) const {
        const fs::path p = dir / (name_ + ".csv");
        std::ofstream f(p);
        f << header_ << '\n';
        for (const auto& r : rows_) f << r << '\n';
        std::ofstream a(dir / (name_ + ".audit.csv"));
        a << "row,scenario_hash,seed,tol\n";
        const std::string h = scenario_hash(sc);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            a << i << ',' << h << ',' << sc.mc_seed << ',' << num(sc.quad.tol) << '\n';
        if (!f || !a) throw ConfigError("cannot write to output directory '" + dir.string() + "'");
        return p.string();
    }

private:
    std::string name_, header_;
    std::vector<std::string> rows_;
};

void write_dat(const fs::path& dir, const std::string& name, const std::vector<std::pair<double, double>>& xy) {
    std::ofstream f(dir / (name + ".dat"));
    for (const auto& [x, y] : xy) f << num(x) << ' ' << num(y) << '\n';
}

struct Context {
    Scenario sc;
    fs::path dir;
    std::ostream& out;
};

int cmd_selftest(std::ostream& out, bool verbose) {
    const ConventionReport rep = convention_selftest(1e-4);
    bool ok = rep.ok;
    if (verbose)
        for (const auto& l : rep.lines) out << "  " << l << '\n';
    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const double b = 0.1 * i;
        worst = std::max(worst, std::fabs(kappa(b, 1) / kappa_closed_form(b) - 1.0));
    }
    if (!(worst <= 1e-6)) ok = false;
    if (verbose) out << "  kappa quadrature vs closed form, beta=0.1..0.9: max rel " << short_num(worst) << '\n';
    out << "selftest: " << (ok ? "pass" : "FAIL") << " parseval_max_rel=" << short_num(rep.parseval_max_rel)
        << " kappa_max_rel=" << short_num(worst) << '\n';
    return ok ? kExitOk : kExitContract;
}

void cmd_constants(Context& c) {
    const Scenario& sc = c.sc;
    const QuadSpec& q = sc.quad;
    Table t("constants", "name,value,stderr,method");
    t.row({"dalang_integral", num(dalang_integral(sc.spatial, q)), "0", "quadrature"});
    t.row({"big_gamma", num(big_gamma(sc.temporal, sc.t)), "0", "closed_form"});
    t.row({"variance_exponent", num(variance_exponent(sc)), "0", "closed_form"});
    const Regime rg = sc.regime();
    if (rg == Regime::Part2) {
        t.row({"kappa", num(kappa(sc.spatial.beta, sc.dim)), "0", "quadrature"});
        if (sc.dim == 1) t.row({"kappa", num(kappa_closed_form(sc.spatial.beta)), "0", "closed_form"});
    }
    if (rg == Regime::Part3a) {
        const McValue k = kbeta12(sc.spatial.f1.beta, sc.spatial.f2.beta, sc.mc_samples * 10, sc.mc_seed);
        t.row({"kbeta12", num(k.value), num(k.stderr_), "monte_carlo"});
        t.row({"kbeta12", num(kbeta12_polar(sc.spatial.f1.beta, sc.spatial.f2.beta)), "0", "quadrature"});
    }
    if (rg == Regime::Part3b) {
        const double b = sc.spatial.f1.kind == Kernel1D::Kind::Riesz ? sc.spatial.f1.beta : sc.spatial.f2.beta;
        const McValue l = lbeta_mc(b, sc.mc_samples * 10, sc.mc_seed);
        t.row({"lbeta", num(lbeta(b)), "0", "quadrature"});
        t.row({"lbeta", num(l.value), num(l.stderr_), "monte_carlo"});
    }
    if (rg != Regime::Part1) {
        t.row({"limit_constant", num(limit_constant(sc)), "0", "quadrature"});
        t.row({"limit_cov_t_t", num(limit_cov(sc, sc.t, sc.t, q)), "0", "quadrature"});
    }
    const std::string p = t.write(c.dir, sc);
    c.out << "constants: " << t.size() << " rows, regime " << regime_name(rg) << " -> " << p << '\n';
}

void cmd_covariance(Context& c) {
    const Scenario& sc = c.sc;
    const double a = variance_exponent(sc);
    double lim_half = NAN, lim_full = NAN;
    if (sc.regime() != Regime::Part1) {
        lim_half = limit_cov(sc, sc.t, 0.5 * sc.t, sc.quad);
        lim_full = limit_cov(sc, sc.t, sc.t, sc.quad);
    }
    Table t("covariance", "R,t,s,cov_p1,rescaled,limit_cov");
    std::vector<std::pair<double, double>> dat;
    for (double R : sc.radii)
        for (double s : {0.5 * sc.t, sc.t}) {
            const double v = var_J1R(sc, sc.t, s, R, sc.quad);
            const double r = v * std::pow(R, -a);
            t.row({num(R), num(sc.t), num(s), num(v), num(r), num(s == sc.t ? lim_full : lim_half)});
            if (s != sc.t) dat.push_back({R, r});
        }
    write_dat(c.dir, "covariance_rescaled", dat);
    const std::string p = t.write(c.dir, sc);
    c.out << "covariance: " << t.size() << " rows, first chaos, rescaled by R^" << short_num(a);
    if (!std::isnan(lim_half)) c.out << ", limit(t, t/2)=" << short_num(lim_half);
    c.out << " -> " << p << '\n';
}

void cmd_variance_scan(Context& c) {
    const Scenario& sc = c.sc;
    if (sc.p_max < 1 || sc.p_max > 3) throw ConfigError("variance-scan needs p_max in 1..3");
    const auto rows = variance_scan(sc, sc.t, sc.radii, sc.p_max, sc.quad, sc.mc_samples, sc.mc_seed);
    Table t("variance_scan", "R,t,var_p1,var_p2,var_p3,tail_bound,stderr");
    std::vector<std::pair<double, double>> dat;
    double worst_tail = 0.0;
    for (const auto& r : rows) {
        std::vector<std::string> cells{num(r.R), num(sc.t)};
        for (int p = 0; p < 3; ++p) cells.push_back(num(p < static_cast<int>(r.per_p.size()) ? r.per_p[p] : 0.0));
        cells.push_back(num(r.tail));
        cells.push_back(num(r.total_stderr()));
        t.row(cells);
        dat.push_back({r.R, r.total()});
        worst_tail = std::max(worst_tail, r.tail / r.total());
    }
    write_dat(c.dir, "variance_scan", dat);
    const std::string p = t.write(c.dir, sc);
    c.out << "variance-scan: " << rows.size() << " rows";
    if (rows.size() >= 3) {
        const ExponentFit f = fit_exponent(rows);
        c.out << ", slope " << short_num(f.slope) << " +- " << short_num(f.stderr_);
    }
    c.out << ", max relative tail " << short_num(worst_tail) << " -> " << p << '\n';
}

int sim_order(const Scenario& sc) { return std::clamp(sc.p_max, 1, 2); }

std::vector<double> simulate_at(const Scenario& sc, double R) {
    const NoiseGrid g = build_grid(sc, R, sc.grid_nt, sc.grid_nx);
    return simulate_FR(sc, sc.t, R, g, sim_order(sc), sc.mc_seed, static_cast<std::size_t>(sc.mc_samples));
}

std::pair<double, double> mean_var(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return {m, s / static_cast<double>(x.size() - 1)};
}

void cmd_simulate(Context& c) {
    const Scenario& sc = c.sc;
    if (sc.mc_samples < 2) throw ConfigError("simulate needs mc.samples >= 2");
    Table t("simulate", "R,n_samples,mean,variance,discrete_variance,seed");
    for (double R : sc.radii) {
        const NoiseGrid g = build_grid(sc, R, sc.grid_nt, sc.grid_nx);
        const auto x = simulate_FR(sc, sc.t, R, g, sim_order(sc), sc.mc_seed, static_cast<std::size_t>(sc.mc_samples));
        const auto dv = discrete_variance(g, fr_kernels(g, sc.t, R, sim_order(sc)));
        double total = 0.0;
        for (double v : dv) total += v;
        const auto [m, v] = mean_var(x);
        t.row({num(R), std::to_string(x.size()), num(m), num(v), num(total), std::to_string(sc.mc_seed)});
        std::vector<std::pair<double, double>> hist;
        const int bins = 40;
        std::vector<double> cnt(bins, 0.0);
        const double sd = std::sqrt(v);
        for (double y : x) {
            const int b = static_cast<int>(std::floor(((y - m) / sd + 4.0) / 8.0 * bins));
            if (b >= 0 && b < bins) cnt[b] += 1.0;
        }
        for (int b = 0; b < bins; ++b)
            hist.push_back({-4.0 + (b + 0.5) * 8.0 / bins, cnt[b] / (static_cast<double>(x.size()) * 8.0 / bins)});
        write_dat(c.dir, "simulate_hist_R" + short_num(R), hist);
    }
    const std::string p = t.write(c.dir, sc);
    c.out << "simulate: " << t.size() << " radii x " << sc.mc_samples << " samples, grid " << sc.grid_nt << "x"
          << sc.grid_nx << " -> " << p << '\n';
}

void cmd_clt(Context& c) {
    const Scenario& sc = c.sc;
    Table t("clt", "R,n_samples,ks,tv_binned,sigma_hat,seed");
    std::vector<std::pair<double, double>> ks_dat, tv_dat;
    for (double R : sc.radii) {
        const auto x = simulate_at(sc, R);
        const double ks = ks_distance(x), tv = tv_binned(x, 20);
        t.row({num(R), std::to_string(x.size()), num(ks), num(tv), num(std::sqrt(mean_var(x).second)),
               std::to_string(sc.mc_seed)});
        ks_dat.push_back({R, ks});
        tv_dat.push_back({R, tv});
        c.out << "  R=" << short_num(R) << " ks=" << short_num(ks) << " tv=" << short_num(tv) << '\n';
    }
    write_dat(c.dir, "clt_ks", ks_dat);
    write_dat(c.dir, "clt_tv", tv_dat);
    const std::string p = t.write(c.dir, sc);
    c.out << "clt: " << t.size() << " radii, KS band at 95% ~ " << short_num(1.36 / std::sqrt(double(sc.mc_samples)))
          << " -> " << p << '\n';
}

void cmd_malliavin(Context& c) {
    const Scenario& sc = c.sc;
    if (sc.dim != 1) throw UnsupportedRegime("malliavin-check is implemented for d = 1");
    Table t("malliavin", "m,point_id,lower,l2_value,l2_tail,upper_series");
    std::vector<std::pair<double, double>> dat;
    int bad = 0;
    const int points = 10;
    for (int m = 1; m <= 2; ++m)
        for (int i = 0; i < points; ++i) {
            PhiloxStream g(sc.mc_seed, 1000ull * m + i);
            std::vector<double> ts;
            std::vector<Point> ps;
            random_admissible(g, sc.t, m, ts, ps);
            const double lo = dm_lower(sc, sc.t, {0.0, 0.0}, m, ts, ps);
            const DmL2 l2 = dm_l2(sc, sc.t, {0.0, 0.0}, m, ts, ps, m + 1, sc.quad);
            const double up = dm_upper_series(sc, sc.t, {0.0, 0.0}, m, ts, ps, sc.quad);
            t.row({std::to_string(m), std::to_string(i), num(lo), num(l2.value), num(l2.tail), num(up)});
            if (lo > l2.value * (1.0 + 1e-4) || l2.value + l2.tail > up * (1.0 + 1e-4)) ++bad;
            if (lo > 0.0) dat.push_back({static_cast<double>(m * points + i), l2.value / lo});
        }
    write_dat(c.dir, "malliavin_ratio", dat);
    const std::string p = t.write(c.dir, sc);
    c.out << "malliavin-check: " << t.size() << " points, " << bad << " sandwich violations -> " << p << '\n';
    if (bad) throw ContractError("Malliavin sandwich violated at " + std::to_string(bad) + " points");
}

void cmd_density(Context& c) {
    const Scenario& sc = c.sc;
    Table t("density", "delta,phi,phi_direct,psi0,psi0_direct,gamma_delta,bound");
    std::vector<std::pair<double, double>> dat;
    int bad = 0;
    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const double d = 0.1 * i;
        const DensityIntegrals D = density_integrals(sc, d, sc.quad);
        const double bound = D.gamma_delta * D.psi0;
        t.row({num(d), num(D.phi), D.has_direct ? num(D.phi_direct) : "nan", num(D.psi0),
               D.has_direct ? num(D.psi0_direct) : "nan", num(D.gamma_delta), num(bound)});
        if (D.phi > bound * (1.0 + 1e-9)) ++bad;
        if (D.has_direct) {
            const double e = std::max(std::fabs(D.phi / D.phi_direct - 1.0), std::fabs(D.psi0 / D.psi0_direct - 1.0));
            worst = std::max(worst, e);
            if (e > 1e-4) ++bad;
        }
        dat.push_back({d, bound > 0.0 ? D.phi / bound : 0.0});
    }
    write_dat(c.dir, "density_ratio", dat);
    const std::string p = t.write(c.dir, sc);
    c.out << "density-check: 9 deltas, max two-route rel " << short_num(worst) << ", " << bad << " violations -> "
          << p << '\n';
    if (bad) throw ContractError("density inequality or route agreement failed at " + std::to_string(bad) + " deltas");
}

}  // namespace

const std::vector<std::string>& cli_commands() {
    static const std::vector<std::string> c = {"constants",       "covariance",    "variance-scan", "simulate",
                                               "clt",             "malliavin-check", "density-check", "selftest"};
    return c;
}

int run(const std::string& command, const std::string& config_path, const std::vector<std::string>& overrides,
        std::ostream& out, std::ostream& err) {
    try {
        const auto& cmds = cli_commands();
        if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
            throw ConfigError("unknown command '" + command + "'");
        if (command == "selftest" && config_path.empty()) return cmd_selftest(out, true);
        if (config_path.empty()) throw ConfigError("missing --config");
        ConfigMap m = read_config_file(config_path);
        apply_overrides(m, overrides);
        Context c{scenario_from_config(m), {}, out};
        if (command == "selftest") return cmd_selftest(out, true);
        if (!conventions_validated() && cmd_selftest(out, false) != kExitOk)
            throw ContractError("convention selftest failed; refusing to run " + command);
        c.dir = c.sc.out_dir;
        std::error_code ec;
        fs::create_directories(c.dir, ec);
        if (ec) throw ConfigError("cannot create output directory '" + c.dir.string() + "'");
        static const std::vector<std::pair<std::string, std::function<void(Context&)>>> table = {
            {"constants", cmd_constants},     {"covariance", cmd_covariance},
            {"variance-scan", cmd_variance_scan}, {"simulate", cmd_simulate},
            {"clt", cmd_clt},                 {"malliavin-check", cmd_malliavin},
            {"density-check", cmd_density}};
        for (const auto& [name, f] : table)
            if (name == command) f(c);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << " (partial " << e.partial() << ")\n";
        return kExitBudget;
    } catch (const ContractError& e) {
        err << "contract violation: " << e.what() << '\n';
        return kExitContract;
    } catch (const UnsupportedRegime& e) {
        err << "unsupported for this scenario: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "invalid arguments: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InsufficientData& e) {
        err << "insufficient data: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitContract;
    }
}

}  // namespace ham
