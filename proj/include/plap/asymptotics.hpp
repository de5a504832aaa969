#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/solver.hpp"

namespace plap {

struct SweepRow {
    double p;
    double derivative;
    int grid_n;
    double h;  ///< smallest probe distance
    double residual;
    bool converged;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

struct SweepOptions {
    int n = 128;
    std::vector<double> h_list{0.04, 0.08};
    SolveOptions solve;
};

/// Solves at each p (sorted decreasing) and records the boundary derivative at x0.
inline SweepResult sweep(const Domain& dom, const BoundaryIndicator& F, const Vec& x0, std::vector<double> p_list,
                         const SweepOptions& opt = {}) {
    if (p_list.empty()) throw std::invalid_argument("sweep: empty p list");
    std::sort(p_list.begin(), p_list.end(), std::greater<>());
    if (std::adjacent_find(p_list.begin(), p_list.end()) != p_list.end())
        throw std::invalid_argument("sweep: repeated p value");
    for (double p : p_list)
        if (!(p >= 1.05 - 1e-12 && p <= 2)) throw std::invalid_argument("sweep: p = " + std::to_string(p) + " outside [1.05, 2]");
    if (!dom.inward_normal(x0)) throw std::domain_error("sweep: inward normal undefined at x0");
    const auto grid = std::make_shared<const Grid>(discretize(dom, F, opt.n));
    SweepResult out;
    for (double p : p_list) {
        const GridSolution sol = solve(grid, p, opt.solve);
        const double D = boundary_derivative(sol, dom, x0, opt.h_list);
        out.rows.push_back({p, D, opt.n, *std::min_element(opt.h_list.begin(), opt.h_list.end()), sol.residual,
                            sol.converged});
    }
    return out;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
    os << "p,derivative,grid_n,h,residual,converged\n" << std::setprecision(17);
    for (const auto& r : sw.rows)
        os << r.p << ',' << r.derivative << ',' << r.grid_n << ',' << r.h << ',' << r.residual << ',' << r.converged << '\n';
}

inline SweepResult read_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("p,derivative", 0) != 0) throw std::invalid_argument("sweep CSV: bad header");
    SweepResult sw;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        SweepRow r{};
        char c1, c2, c3, c4, c5;
        int conv = 0;
        if (!(ls >> r.p >> c1 >> r.derivative >> c2 >> r.grid_n >> c3 >> r.h >> c4 >> r.residual >> c5 >> conv))
            throw std::invalid_argument("sweep CSV: malformed row '" + line + "'");
        r.converged = conv != 0;
        sw.rows.push_back(r);
    }
    return sw;
}

enum class RateModel { Power, Exponential };

struct RateFit {
    RateModel model;
    double amplitude;
    double rate;  ///< slope of log(derivative) against log(p-1) or 1/(p-1)
    double r_squared;
};

namespace detail {

inline RateFit fit_log_linear(const SweepResult& sw, RateModel model) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sw.rows.size(); ++i) {
        const auto& r = sw.rows[i];
        if (!r.converged) continue;
        if (!(r.derivative > 0))
            throw std::domain_error("fit: nonpositive derivative in row " + std::to_string(i) + " (p = " + std::to_string(r.p) + ")");
        xs.push_back(model == RateModel::Power ? std::log(r.p - 1) : 1 / (r.p - 1));
        ys.push_back(std::log(r.derivative));
    }
    if (xs.size() < 3) throw std::invalid_argument("fit: need at least 3 converged rows");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n, my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0)) throw std::invalid_argument("fit: all rows share the same p");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    // A constant response is fit exactly by the zero slope.
    const double r2 = syy > 0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return {model, std::exp(intercept), slope, r2};
}

}  // namespace detail

inline RateFit fit_power(const SweepResult& sw) { return detail::fit_log_linear(sw, RateModel::Power); }
inline RateFit fit_exponential(const SweepResult& sw) { return detail::fit_log_linear(sw, RateModel::Exponential); }

enum class Regime { Explosion, Critical, ExponentialDecay, Inconclusive };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Explosion: return "Explosion";
        case Regime::Critical: return "Critical";
        case Regime::ExponentialDecay: return "ExponentialDecay";
        default: return "Inconclusive";
    }
}

struct ClassifyThresholds {
    double power_r2 = 0.95;
    double explosion_lo = -1.3, explosion_hi = -0.7;
    double critical_lo = -0.65, critical_hi = -0.35;
    double exponential_r2 = 0.9;
};

struct Classification {
    Regime regime;
    RateFit power;
    RateFit exponential;
};

inline Classification classify_detail(const SweepResult& sw, const ClassifyThresholds& th = {}) {
    const auto converged = std::count_if(sw.rows.begin(), sw.rows.end(), [](const SweepRow& r) { return r.converged; });
    if (converged < 4) throw std::invalid_argument("classify: need at least 4 converged rows");
    const RateFit pw = fit_power(sw), ex = fit_exponential(sw);
    Regime regime = Regime::Inconclusive;
    if (pw.r_squared >= th.power_r2 && pw.rate >= th.explosion_lo && pw.rate <= th.explosion_hi)
        regime = Regime::Explosion;
    else if (pw.r_squared >= th.power_r2 && pw.rate >= th.critical_lo && pw.rate <= th.critical_hi)
        regime = Regime::Critical;
    else if (ex.r_squared >= th.exponential_r2 && ex.rate < 0 && ex.r_squared > pw.r_squared)
        regime = Regime::ExponentialDecay;
    return {regime, pw, ex};
}

inline Regime classify(const SweepResult& sw, const ClassifyThresholds& th = {}) { return classify_detail(sw, th).regime; }

inline void write_fit_csv(std::ostream& os, const Classification& c) {
    os << "model,amplitude,rate,r2,classification\n" << std::setprecision(17);
    for (const RateFit* f : {&c.power, &c.exponential})
        os << (f->model == RateModel::Power ? "power" : "exponential") << ',' << f->amplitude << ',' << f->rate << ','
           << f->r_squared << ',' << regime_name(c.regime) << '\n';
}

}  // namespace plap
