#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "plap/solver.hpp"

namespace plap::cylinder {

/// w(x, y) = |x|^2 + 2 a y - b y^2 on R^d x R.
struct QuadraticTest {
    double a;
    double b;
    double p;
    int d;

    double value(const Vec& x, double y) const { return x.squaredNorm() + 2 * a * y - b * y * y; }
};

/// Closed form of the normalized p-Laplacian |grad w|^2 lap w + (p-2) <D^2 w grad w, grad w>.
inline double delta_pN_quadratic(const QuadraticTest& q, const Vec& x, double y) {
    const double s = q.a - q.b * y;
    return 8 * (x.squaredNorm() * (q.d - q.b + q.p - 2) + s * s * (q.d - q.b * (q.p - 1)));
}

inline double band_slope(double p, int d) { return std::sqrt(d / (p - 1)); }
inline double band_height(double p, int d) { return std::sqrt((p - 1) / d); }

namespace detail {
inline void check_band_args(double p, int d, double y) {
    if (!(p > 1 && p <= 2) || d < 1) throw std::domain_error("band: need p in (1, 2] and d >= 1");
    if (!(y >= 0 && y <= band_height(p, d) * (1 + 1e-12))) throw std::out_of_range("band: y outside [0, sqrt((p-1)/d)]");
}
}  // namespace detail

inline double upper_band(double p, int d, double y) {
    detail::check_band_args(p, d, y);
    return band_slope(p, d) * y;
}

inline double lower_band(double p, int d, double y, double c1 = 1.0 / 40) {
    detail::check_band_args(p, d, y);
    if (!(c1 > 0)) throw std::domain_error("lower_band: c1 must be positive");
    return c1 * band_slope(p, d) * y;
}

inline double mk_floor(int k) {
    if (k < 1) throw std::domain_error("mk_floor: k must be >= 1");
    return std::max(0.0, 1.0 - 11.0 / (k + 2));
}

/// Product of (1 - 11/(l+2)^2) for l = start .. start+terms-1, accumulated in log space.
inline double tail_product(long start, long terms) {
    if (terms < 0) throw std::domain_error("tail_product: negative term count");
    double log_sum = 0.0;
    for (long l = start; l < start + terms; ++l) {
        const double q = 11.0 / (static_cast<double>(l + 2) * static_cast<double>(l + 2));
        if (!(q < 1)) throw std::domain_error("tail_product: factor at l = " + std::to_string(l) + " is not positive");
        log_sum += std::log1p(-q);
    }
    return std::exp(log_sum);
}

inline double y_k(int k, double p, int d) { return k * std::sqrt((p - 1) / d); }

/// Barrier (b (y - y_{k+2})^2 + 1 - |x|^2) / (b y_{k+2}^2) with b = d/(2(p-1)).
inline double f_barrier(const Vec& x, double y, int k, double p, int d) {
    const double b = d / (2 * (p - 1));
    const double top = y_k(k + 2, p, d);
    return (b * (y - top) * (y - top) + 1 - x.squaredNorm()) / (b * top * top);
}

struct BandRow {
    double y, u, lower, upper;
    bool pass;
};

struct BandReport {
    std::vector<BandRow> rows;
    int violations = 0;
    bool pass() const { return violations == 0 && !rows.empty(); }
};

namespace detail {

inline void check_critical(const GridSolution& sol) {
    const Grid& g = *sol.grid;
    if (g.domain.kind != DomainKind::Cylinder) throw std::invalid_argument("cylinder check: solution is not on a cylinder");
    if (g.boundary.description != "critical")
        throw std::invalid_argument("cylinder check: boundary data is '" + g.boundary.description + "', need 'critical'");
}

/// Axis samples (y, u(0, y)) at lattice heights 0 < y < H.
inline std::vector<std::pair<double, double>> axis_values(const GridSolution& sol) {
    const Grid& g = *sol.grid;
    const int d = g.dim - 1;
    const double H = g.domain.params[2];
    std::vector<std::pair<double, double>> out;
    for (int k = 1; k * g.spacing < H - 1e-12; ++k) {
        Vec z = zeros(g.dim);
        z[d] = k * g.spacing;
        out.emplace_back(z[d], sol.interpolate(z));
    }
    return out;
}

}  // namespace detail

/// Band check on the axis for 2 cells < y <= sqrt((p-1)/d). A node passes when
/// lower(y - 2h) - s <= u(0, y) <= upper(y + 2h) + s, with s = slack times the
/// band width upper(y) - lower(y).
inline BandReport verify_band(const GridSolution& sol, double p, int d, double c1 = 1.0 / 40, double slack = 0.1,
                              double y_cells = 2.0) {
    detail::check_critical(sol);
    if (sol.grid->dim != d + 1) throw std::invalid_argument("verify_band: d does not match the solution");
    const double h = sol.grid->spacing;
    const double k = band_slope(p, d);
    BandReport rep;
    for (const auto& [y, u] : detail::axis_values(sol)) {
        if (y <= 2 * h + 1e-12 || y > band_height(p, d) * (1 + 1e-12)) continue;
        const double lo = lower_band(p, d, y, c1), hi = upper_band(p, d, y);
        const double s = slack * (hi - lo);
        const double lo_ok = c1 * k * std::max(0.0, y - y_cells * h) - s;
        const double hi_ok = k * (y + y_cells * h) + s;
        const bool ok = u >= lo_ok && u <= hi_ok;
        rep.rows.push_back({y, u, lo, hi, ok});
        rep.violations += !ok;
    }
    return rep;
}

inline void write_band_csv(std::ostream& os, const BandReport& rep) {
    os << "y,u,lower,upper,pass\n" << std::setprecision(17);
    for (const auto& r : rep.rows) os << r.y << ',' << r.u << ',' << r.lower << ',' << r.upper << ',' << r.pass << '\n';
}

struct MonotonicityReport {
    std::vector<std::pair<double, double>> ratios;  ///< (y, u(0,y)/y)
    int violations = 0;
    double worst_increase = 0.0;
    bool pass() const { return violations == 0 && ratios.size() >= 2; }
};

/// Checks that u(0, y)/y does not increase by more than tol between
/// consecutive axis nodes.
inline MonotonicityReport axis_monotonicity(const std::vector<std::pair<double, double>>& axis, double tol = 1e-3) {
    MonotonicityReport rep;
    for (const auto& [y, u] : axis)
        if (y > 0) rep.ratios.emplace_back(y, u / y);
    for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
        const double inc = rep.ratios[i].second - rep.ratios[i - 1].second;
        rep.worst_increase = std::max(rep.worst_increase, inc);
        if (inc > tol) ++rep.violations;
    }
    return rep;
}

inline MonotonicityReport axis_monotonicity(const GridSolution& sol, double tol = 1e-3) {
    detail::check_critical(sol);
    return axis_monotonicity(detail::axis_values(sol), tol);
}

}  // namespace plap::cylinder
