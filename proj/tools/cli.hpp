#pragma once

// Command-line front end. run() is kept separate from main() so tests can
// drive it with an argument vector and captured streams.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "plap/acceptance.hpp"
#include "plap/asymptotics.hpp"
#include "plap/cylinder.hpp"
#include "plap/radial.hpp"
#include "plap/solver.hpp"
#include "plap/tugofwar.hpp"

namespace plap::cli {

enum ExitCode { kOk = 0, kFailed = 1, kInvalid = 2, kNotConverged = 3 };

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Reads `key = value` lines; `#` starts a comment. Repeated keys keep the last value.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(key, value);
    }
    return out;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument("key '" + key + "': '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw std::invalid_argument("key '" + key + "': empty list");
    return out;
}

struct Io {
    std::ostream& out;
    std::ostream& err;
};

/// Settings shared by all subcommands.
struct Common {
    std::string config;
    std::string out;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::optional<std::uint64_t> seed;
    bool strict = false;

    std::uint64_t resolved_seed() const {
        if (seed) return *seed;
        if (const char* env = std::getenv("PLAP_SEED")) {
            try {
                return std::stoull(env);
            } catch (const std::exception&) {
                throw std::invalid_argument("PLAP_SEED is not an unsigned integer");
            }
        }
        return kDefaultSeed;
    }
};

/// Writes CSV to --out when given.
template <class Fn>
void emit(const Common& c, Fn&& write) {
    if (c.out.empty()) return;
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw std::invalid_argument("key 'out': cannot open '" + c.out + "' for writing");
    write(f);
    if (!f) throw std::runtime_error("failed writing '" + c.out + "'");
}

inline void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "output CSV path");
    sub->add_option("--threads", c.threads, "worker threads (1 = serial reference path)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "64-bit seed (fallback: PLAP_SEED, then " + std::to_string(kDefaultSeed) + ")");
    sub->add_flag("--strict", c.strict, "exit 3 when a solve does not converge");
    sub->add_option("--config", c.config, "file of key = value lines; command-line flags take precedence");
}

inline SolveOptions solve_options(double delta, double tol, int max_iter, int threads) {
    SolveOptions s;
    s.delta = delta;
    s.tol = tol;
    s.max_iter = max_iter;
    s.threads = threads;
    return s;
}

inline int run(const std::vector<std::string>& args, Io io) {
    CLI::App app{"p-Laplacian boundary derivative laboratory"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help and exit");  // -h would clash with the probe distance key
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Common common;

    // radial
    double r_p = 1.5, r_r0 = 1, r_r1 = 2, r_v0 = 0, r_v1 = 1;
    int r_d = 2, r_samples = 101;
    std::optional<double> r_at;
    auto* radial_cmd = app.add_subcommand("radial", "closed-form radial profile");
    radial_cmd->add_option("--p", r_p, "exponent in (1, 2]");
    radial_cmd->add_option("--d", r_d, "dimension >= 2");
    radial_cmd->add_option("--r0", r_r0, "inner radius");
    radial_cmd->add_option("--r1", r_r1, "outer radius");
    radial_cmd->add_option("--v0", r_v0, "value at r0");
    radial_cmd->add_option("--v1", r_v1, "value at r1");
    radial_cmd->add_option("--at", r_at, "print the value at this radius");
    radial_cmd->add_option("--samples", r_samples, "rows in the CSV (r,u,derivative)")->check(CLI::Range(2, 10000000));
    add_common(radial_cmd, common);

    // solve / sweep share the problem description
    std::string domain_spec = "annulus 1 2 2", boundary_spec = "outer", x0_text, h_text = "0.04,0.08", p_text = "1.5";
    int n = 64, max_iter = 2000;
    double s_p = 1.5, delta = 1e-6, tol = 1e-8;
    std::optional<double> mollify;
    auto add_problem = [&](CLI::App* sub) {
        sub->add_option("--domain", domain_spec, "annulus r_in r_out d | cylinder d R H | box s1 s2 ...");
        sub->add_option("--boundary", boundary_spec, "zero | one | inner | outer | critical | top | ramp");
        sub->add_option("--n", n, "grid nodes per unit length")->check(CLI::PositiveNumber);
        sub->add_option("--delta", delta, "gradient regularization");
        sub->add_option("--tol", tol, "stopping tolerance");
        sub->add_option("--max_iter", max_iter, "lagged-diffusivity iteration cap");
        sub->add_option("--h", h_text, "comma-separated probe distances for the boundary derivative");
    };
    auto* solve_cmd = app.add_subcommand("solve", "solve on a grid, optionally probe a boundary derivative");
    add_problem(solve_cmd);
    solve_cmd->add_option("--p", s_p, "exponent in (1, 2]");
    solve_cmd->add_option("--x0", x0_text, "boundary point for the derivative, e.g. 1,0");
    solve_cmd->add_option("--mollify", mollify, "ramp width replacing F near {F = 0}");
    add_common(solve_cmd, common);

    auto* sweep_cmd = app.add_subcommand("sweep", "boundary derivative over a list of p");
    add_problem(sweep_cmd);
    sweep_cmd->add_option("--p", p_text, "comma-separated p values in [1.05, 2]");
    sweep_cmd->add_option("--x0", x0_text, "boundary point, e.g. 1,0")->required();
    add_common(sweep_cmd, common);

    // fit
    std::string fit_in;
    ClassifyThresholds th;
    auto* fit_cmd = app.add_subcommand("fit", "fit power and exponential rates to a sweep CSV");
    fit_cmd->add_option("--in", fit_in, "sweep CSV")->required();
    fit_cmd->add_option("--power_r2", th.power_r2, "r2 floor for the power regimes");
    fit_cmd->add_option("--explosion_lo", th.explosion_lo, "explosion slope band, low end");
    fit_cmd->add_option("--explosion_hi", th.explosion_hi, "explosion slope band, high end");
    fit_cmd->add_option("--critical_lo", th.critical_lo, "critical slope band, low end");
    fit_cmd->add_option("--critical_hi", th.critical_hi, "critical slope band, high end");
    fit_cmd->add_option("--exponential_r2", th.exponential_r2, "r2 floor for exponential decay");
    add_common(fit_cmd, common);

    // game
    double g_p = 1.5, g_eps = 0.05, g_h = 0.5;
    int g_d = 2;
    std::int64_t g_traj = 10000, g_max_steps = 0;
    std::optional<double> g_c;
    bool g_tilt = false;
    std::string g_player = "counter", g_opponent = "pull-down", g_payoff = "ramp", g_report;
    auto* game_cmd = app.add_subcommand("game", "tug-of-war with noise on the unit cylinder");
    game_cmd->add_option("--p", g_p, "exponent in (1, 2]");
    game_cmd->add_option("--d", g_d, "ambient dimension >= 2");
    game_cmd->add_option("--eps", g_eps, "step size");
    game_cmd->add_option("--h", g_h, "start height on the axis");
    game_cmd->add_option("--c", g_c, "counter-strategy constant (default 8Hd/C1^2)");
    game_cmd->add_flag("--tilt", g_tilt, "simulate under the tilted coin with the same c");
    game_cmd->add_option("--player", g_player, "player I: counter | mirror | zero");
    game_cmd->add_option("--opponent", g_opponent, "player II: pull-down | zero");
    game_cmd->add_option("--payoff", g_payoff, "ramp | top | critical");
    game_cmd->add_option("--n_traj", g_traj, "trajectories (>= 100)");
    game_cmd->add_option("--max_steps", g_max_steps, "step cap (0 = 50 T0)");
    game_cmd->add_option("--report", g_report, "martingale report CSV path");
    add_common(game_cmd, common);

    // cylinder-check
    double c_p = 1.5, c_c1 = 1.0 / 40, c_slack = 0.1;
    int c_d = 1, c_n = 128;
    auto* cyl_cmd = app.add_subcommand("cylinder-check", "band and monotonicity checks on the axis of the cylinder");
    cyl_cmd->add_option("--p", c_p, "exponent in (1, 2]");
    cyl_cmd->add_option("--d", c_d, "cross-section dimension");
    cyl_cmd->add_option("--n", c_n, "grid nodes per unit length")->check(CLI::PositiveNumber);
    cyl_cmd->add_option("--c1", c_c1, "lower band constant");
    cyl_cmd->add_option("--slack", c_slack, "slack as a fraction of the band width");
    add_common(cyl_cmd, common);

    // repro
    std::string criterion = "all";
    auto* repro_cmd = app.add_subcommand("repro", "run acceptance criteria end to end");
    repro_cmd->add_option("--criterion", criterion, "A1 .. A11 or all");
    add_common(repro_cmd, common);

    // Config values go in front of the command-line tokens so that the
    // latter win under the take-last policy.
    std::vector<std::string> tokens;
    try {
        std::string config_path;
        CLI::App* chosen = nullptr;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (!chosen)
                for (auto* s : app.get_subcommands({}))
                    if (s->get_name() == args[i]) chosen = s;
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        std::vector<std::string> injected;
        if (!config_path.empty()) {
            if (!chosen) throw std::invalid_argument("a subcommand is required with --config");
            std::ifstream f(config_path);
            if (!f) throw std::invalid_argument("key 'config': cannot open '" + config_path + "'");
            for (const auto& [key, value] : parse_config(f)) {
                if (key == "config" || !chosen->get_option_no_throw("--" + key))
                    throw std::invalid_argument("unknown config key '" + key + "' for " + chosen->get_name());
                const auto* opt = chosen->get_option("--" + key);
                if (opt->get_type_size() == 0) {
                    if (value == "true" || value == "1") injected.push_back("--" + key);
                    else if (value != "false" && value != "0")
                        throw std::invalid_argument("config key '" + key + "': expected true or false");
                } else {
                    injected.push_back("--" + key);
                    injected.push_back(value);
                }
            }
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            tokens.push_back(args[i]);
            if (chosen && args[i] == chosen->get_name()) {
                tokens.insert(tokens.end(), injected.begin(), injected.end());
                injected.clear();
            }
        }
        std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::ParseError& e) {
        io.err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << '\n';
        return kInvalid;
    }

    try {
        const std::uint64_t seed = common.resolved_seed();
        if (radial_cmd->parsed()) {
            const radial::RadialProfile prof(r_p, r_d, r_r0, r_r1, r_v0, r_v1);
            if (r_at) io.out << prof.value(*r_at) << '\n';
            emit(common, [&](std::ostream& os) {
                os << "r,u,derivative\n" << std::setprecision(17);
                for (int i = 0; i < r_samples; ++i) {
                    const double r = i + 1 == r_samples ? r_r1 : r_r0 + (r_r1 - r_r0) * i / (r_samples - 1);
                    os << r << ',' << prof.value(r) << ',' << prof.derivative(r) << '\n';
                }
            });
            if (!r_at) io.out << "radial profile gamma = " << prof.gamma() << '\n';
            return kOk;
        }
        if (solve_cmd->parsed()) {
            const Domain dom = parse_domain(domain_spec);
            const BoundaryIndicator F = parse_boundary(boundary_spec, dom);
            auto grid = std::make_shared<const Grid>(discretize(dom, F, n, mollify));
            const GridSolution sol = solve(grid, s_p, solve_options(delta, tol, max_iter, common.threads));
            emit(common, [&](std::ostream& os) { write_solution_csv(os, sol); });
            io.out << "solve: " << grid->interior_count() << " unknowns, " << sol.iterations << " iterations, residual "
                   << sol.residual << (sol.converged ? "" : " (not converged)");
            if (!x0_text.empty())
                io.out << ", derivative " << boundary_derivative(sol, dom, parse_vec(x0_text), parse_list(h_text, "h"));
            io.out << '\n';
            return common.strict && !sol.converged ? kNotConverged : kOk;
        }
        if (sweep_cmd->parsed()) {
            const Domain dom = parse_domain(domain_spec);
            SweepOptions so;
            so.n = n;
            so.h_list = parse_list(h_text, "h");
            so.solve = solve_options(delta, tol, max_iter, common.threads);
            const SweepResult sw = sweep(dom, parse_boundary(boundary_spec, dom), parse_vec(x0_text), parse_list(p_text, "p"), so);
            emit(common, [&](std::ostream& os) { write_sweep_csv(os, sw); });
            bool all = true;
            for (const auto& r : sw.rows) {
                io.out << "p=" << r.p << " derivative=" << r.derivative << (r.converged ? "" : " (not converged)") << '\n';
                all = all && r.converged;
            }
            return common.strict && !all ? kNotConverged : kOk;
        }
        if (fit_cmd->parsed()) {
            std::ifstream f(fit_in);
            if (!f) throw std::invalid_argument("key 'in': cannot open '" + fit_in + "'");
            const auto c = classify_detail(read_sweep_csv(f), th);
            emit(common, [&](std::ostream& os) { write_fit_csv(os, c); });
            io.out << regime_name(c.regime) << ": power slope " << c.power.rate << " (r2 " << c.power.r_squared
                   << "), exponential slope " << c.exponential.rate << " (r2 " << c.exponential.r_squared << ")\n";
            return kOk;
        }
        if (game_cmd->parsed()) {
            GameConfig cfg = lemma_game(g_p, g_d, g_eps, g_h);
            if (g_payoff == "top") cfg.payoff = cylinder_top_indicator(cfg.domain);
            else if (g_payoff == "critical") cfg.payoff = cylinder_critical_indicator(cfg.domain);
            else if (g_payoff != "ramp") throw std::invalid_argument("key 'payoff': unknown value '" + g_payoff + "'");
            const double c = g_c.value_or(proof_c(cfg.height(), g_h, g_d));
            if (g_tilt) cfg.tilt_c = c;
            cfg.max_steps = g_max_steps;
            cfg.seed = seed;
            cfg.validate();
            Strategy sII;
            if (g_opponent == "pull-down") sII = pull_down_strategy(g_d, g_eps);
            else if (g_opponent == "zero") sII = zero_strategy(g_d);
            else throw std::invalid_argument("key 'opponent': unknown value '" + g_opponent + "'");
            Strategy sI;
            if (g_player == "counter") sI = counter_strategy(sII, c, g_eps, g_p, unit(g_d, g_d - 1));
            else if (g_player == "mirror") sI = mirror_strategy(sII);
            else if (g_player == "zero") sI = zero_strategy(g_d);
            else throw std::invalid_argument("key 'player': unknown value '" + g_player + "'");
            std::vector<TrajectorySummary> rows;
            const auto est = estimate_value(cfg, sI, sII, g_traj, common.threads, &rows);
            emit(common, [&](std::ostream& os) { write_trajectory_csv(os, rows); });
            if (!g_report.empty()) {
                MartingaleAccumulator acc(cfg);
                detail::simulate_ordered(cfg, sI, sII, g_traj, common.threads, [&](const Trajectory& t) { acc.add(t); });
                std::ofstream f(g_report, std::ios::binary);
                if (!f) throw std::invalid_argument("key 'report': cannot open '" + g_report + "'");
                write_martingale_csv(f, acc.rows());
            }
            io.out << "game: mean payoff " << est.mean << " +- " << est.stderr_ << " over " << est.trajectories
                   << " trajectories, " << est.truncated << " truncated\n";
            return kOk;
        }
        if (cyl_cmd->parsed()) {
            const Domain dom = make_cylinder(c_d, 1, 1);
            auto grid = std::make_shared<const Grid>(discretize(dom, cylinder_critical_indicator(dom), c_n));
            SolveOptions so;
            so.threads = common.threads;
            const GridSolution sol = solve(grid, c_p, so);
            const auto band = cylinder::verify_band(sol, c_p, c_d, c_c1, c_slack);
            const auto mono = cylinder::axis_monotonicity(sol);
            emit(common, [&](std::ostream& os) { cylinder::write_band_csv(os, band); });
            io.out << "cylinder-check: band " << (band.pass() ? "pass" : "fail") << " (" << band.violations << " of "
                   << band.rows.size() << " nodes outside), monotonicity " << (mono.pass() ? "pass" : "fail") << '\n';
            if (common.strict && !sol.converged) return kNotConverged;
            return band.pass() && mono.pass() ? kOk : kFailed;
        }
        if (repro_cmd->parsed()) {
            acceptance::Options opt;
            opt.threads = common.threads;
            opt.seed = seed;
            opt.log = &io.out;
            acceptance::Context ctx(opt);
            std::vector<std::string> ids;
            if (criterion == "all")
                for (const auto& c : acceptance::criteria()) ids.push_back(c.first);
            else
                ids.push_back(criterion);
            bool ok = true;
            std::ostringstream summary;
            for (const auto& id : ids) {
                const auto r = acceptance::run(id, ctx);
                io.out << acceptance::format(r) << '\n';
                summary << id << ',' << (r.pass ? "pass" : "fail") << '\n';
                ok = ok && r.pass;
            }
            emit(common, [&](std::ostream& os) { os << "criterion,result\n" << summary.str(); });
            return ok ? kOk : kFailed;
        }
    } catch (const std::invalid_argument& e) {
        io.err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::domain_error& e) {
        io.err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::out_of_range& e) {
        io.err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kInvalid;
}

}  // namespace plap::cli
