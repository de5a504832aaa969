#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/vec.hpp"

namespace plap {

/// Thrown when a builtin domain or boundary specification has invalid parameters.
class ConstructionError : public std::invalid_argument {
public:
    ConstructionError(const std::string& field, const std::string& what)
        : std::invalid_argument("invalid '" + field + "': " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct BoundingBox {
    Vec lo;
    Vec hi;

    bool contains(const Vec& x) const {
        for (int i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
    double diameter() const { return (hi - lo).norm(); }
};

enum class DomainKind { Annulus, Cylinder, Box };

/// Bounded open region given implicitly. All members are pure; copies share
/// nothing mutable and may be used from any thread.
struct Domain {
    DomainKind kind;
    std::vector<double> params;  ///< annulus: r_in r_out d; cylinder: d R H; box: side lengths
    int dim = 0;
    BoundingBox bbox;
    std::function<bool(const Vec&)> inside;
    std::function<Vec(const Vec&)> boundary_project;
    /// Unit inward normal at a boundary point; empty on edges, corners and off the boundary.
    std::function<std::optional<Vec>(const Vec&)> inward_normal;
    /// Deterministic quasi-uniform boundary points, roughly `count` of them.
    std::function<std::vector<Vec>(int count)> sample_boundary;

    double diameter() const { return bbox.diameter(); }
    double distance_to_boundary(const Vec& x) const { return (x - boundary_project(x)).norm(); }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case DomainKind::Annulus: os << "annulus"; break;
            case DomainKind::Cylinder: os << "cylinder"; break;
            case DomainKind::Box: os << "box"; break;
        }
        for (double v : params) os << ' ' << v;
        return os.str();
    }
};

/// Dirichlet data on the boundary. Binary indicators take values in {0,1};
/// continuous data (the ramp) is flagged with binary = false.
struct BoundaryIndicator {
    std::function<double(const Vec&)> value;
    std::string description;
    bool binary = true;

    double operator()(const Vec& x) const { return value(x); }
    bool is_one(const Vec& x) const { return value(x) >= 0.5; }
};

namespace detail {

inline constexpr double kBoundaryTol = 1e-9;

inline double radical_inverse(std::uint64_t index, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

inline constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

// Inverse standard normal CDF (Acklam's rational approximation, refined by one Newton step).
inline double inverse_normal_cdf(double u) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    double x;
    if (u < 0.02425) {
        const double q = std::sqrt(-2 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (u > 1 - 0.02425) {
        const double q = std::sqrt(-2 * std::log(1 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else {
        const double q = u - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
    return x - e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
}

/// Quasi-uniform points on the unit sphere S^{dim-1} in R^dim.
inline std::vector<Vec> sphere_points(int dim, int count) {
    std::vector<Vec> pts;
    count = std::max(count, 1);
    if (dim == 1) {
        pts.push_back(unit(1, 0) * -1.0);
        pts.push_back(unit(1, 0));
        return pts;
    }
    pts.reserve(count);
    if (dim == 2) {
        for (int k = 0; k < count; ++k) {
            const double t = 2 * std::numbers::pi * k / count;
            Vec v(2);
            v << std::cos(t), std::sin(t);
            pts.push_back(v);
        }
    } else if (dim == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1 - z * z));
            Vec v(3);
            v << r * std::cos(golden * k), r * std::sin(golden * k), z;
            pts.push_back(v);
        }
    } else {
        for (int k = 0; k < count; ++k) {
            Vec v(dim);
            for (int i = 0; i < dim; ++i) v[i] = inverse_normal_cdf(radical_inverse(k + 1, kPrimes[i]));
            pts.push_back(v / v.norm());
        }
    }
    return pts;
}

/// Quasi-uniform points in the closed unit ball of R^dim, including its rim.
inline std::vector<Vec> ball_points(int dim, int count) {
    std::vector<Vec> pts;
    count = std::max(count, 2);
    if (dim == 1) {
        for (int k = 0; k < count; ++k) pts.push_back(Vec::Constant(1, -1.0 + 2.0 * k / (count - 1)));
        return pts;
    }
    const int rim = std::max(4, static_cast<int>(std::pow(count, (dim - 1.0) / dim)));
    for (const Vec& s : sphere_points(dim, rim)) pts.push_back(s);
    const int body = std::max(1, count - rim);
    if (dim == 2) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < body; ++k) {
            const double r = std::sqrt((k + 0.5) / body);
            Vec v(2);
            v << r * std::cos(golden * k), r * std::sin(golden * k);
            pts.push_back(v);
        }
    } else {
        for (int k = 0; k < body; ++k) {
            Vec v(dim);
            for (int i = 0; i < dim; ++i) v[i] = inverse_normal_cdf(radical_inverse(k + 1, kPrimes[i]));
            const double r = std::pow(radical_inverse(k + 1, kPrimes[dim]), 1.0 / dim);
            pts.push_back(v / v.norm() * r);
        }
    }
    return pts;
}

inline std::vector<double> linspace(double a, double b, int count) {
    std::vector<double> out;
    if (count == 1) return {0.5 * (a + b)};
    for (int k = 0; k < count; ++k) out.push_back(a + (b - a) * k / (count - 1));
    return out;
}

inline double unit_ball_volume(int dim) {
    return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

inline double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

inline Vec radial_direction(const Vec& x) {
    const double r = x.norm();
    return r > 0 ? Vec(x / r) : unit(static_cast<int>(x.size()), 0);
}

}  // namespace detail

/// Spherical shell { r_in < |x| < r_out } in R^d.
inline Domain make_annulus(double r_in, double r_out, int d) {
    if (d < 1) throw ConstructionError("d", "dimension must be >= 1");
    if (d > kMaxDim) throw ConstructionError("d", "dimension exceeds " + std::to_string(kMaxDim));
    if (!(r_in > 0)) throw ConstructionError("r_in", "must be positive");
    if (!(r_out > r_in)) throw ConstructionError("r_out", "must exceed r_in");
    Domain dom;
    dom.kind = DomainKind::Annulus;
    dom.params = {r_in, r_out, static_cast<double>(d)};
    dom.dim = d;
    dom.bbox = {Vec::Constant(d, -r_out), Vec::Constant(d, r_out)};
    dom.inside = [=](const Vec& x) {
        const double r = x.norm();
        return r > r_in && r < r_out;
    };
    dom.boundary_project = [=](const Vec& x) -> Vec {
        const double r = x.norm();
        const Vec dir = detail::radial_direction(x);
        return r <= 0.5 * (r_in + r_out) ? Vec(dir * r_in) : Vec(dir * r_out);
    };
    dom.inward_normal = [=](const Vec& x) -> std::optional<Vec> {
        const double r = x.norm();
        const double tol = detail::kBoundaryTol * r_out;
        if (std::abs(r - r_in) <= tol) return Vec(x / r);
        if (std::abs(r - r_out) <= tol) return Vec(-x / r);
        return std::nullopt;
    };
    dom.sample_boundary = [=](int count) {
        const double w_in = std::pow(r_in, d - 1), w_out = std::pow(r_out, d - 1);
        const int n_in = std::max(1, static_cast<int>(std::lround(count * w_in / (w_in + w_out))));
        const int n_out = std::max(1, count - n_in);
        std::vector<Vec> pts;
        for (const Vec& s : detail::sphere_points(d, n_in)) pts.push_back(s * r_in);
        for (const Vec& s : detail::sphere_points(d, n_out)) pts.push_back(s * r_out);
        return pts;
    };
    return dom;
}

/// Cylinder B^d(0,R) x (0,H) in R^{d+1}; the last coordinate is the height y.
inline Domain make_cylinder(int d, double R, double H) {
    if (d < 1) throw ConstructionError("d", "cross-section dimension must be >= 1");
    if (d + 1 > kMaxDim) throw ConstructionError("d", "dimension exceeds " + std::to_string(kMaxDim - 1));
    if (!(R > 0)) throw ConstructionError("R", "must be positive");
    if (!(H > 0)) throw ConstructionError("H", "must be positive");
    Domain dom;
    dom.kind = DomainKind::Cylinder;
    dom.params = {static_cast<double>(d), R, H};
    dom.dim = d + 1;
    Vec lo = Vec::Constant(d + 1, -R), hi = Vec::Constant(d + 1, R);
    lo[d] = 0.0;
    hi[d] = H;
    dom.bbox = {lo, hi};
    dom.inside = [=](const Vec& z) {
        const double y = z[d];
        return z.head(d).norm() < R && y > 0 && y < H;
    };
    dom.boundary_project = [=](const Vec& z) -> Vec {
        const Vec x = z.head(d);
        const double y = z[d];
        const double r = x.norm();
        Vec out = z;
        if (!(r < R && y > 0 && y < H)) {
            if (r > R) out.head(d) = x * (R / r);
            out[d] = std::clamp(y, 0.0, H);
            return out;
        }
        const double to_side = R - r, to_bottom = y, to_top = H - y;
        if (to_bottom <= to_top && to_bottom <= to_side) {
            out[d] = 0.0;
        } else if (to_top <= to_side) {
            out[d] = H;
        } else {
            out.head(d) = detail::radial_direction(x) * R;
        }
        return out;
    };
    dom.inward_normal = [=](const Vec& z) -> std::optional<Vec> {
        const double tol = detail::kBoundaryTol * std::max(R, H);
        const double r = z.head(d).norm();
        const double y = z[d];
        const bool on_side = std::abs(r - R) <= tol;
        const bool on_bottom = std::abs(y) <= tol;
        const bool on_top = std::abs(y - H) <= tol;
        const bool within_disc = r < R - tol;
        const bool within_height = y > tol && y < H - tol;
        if (on_bottom && within_disc) return unit(d + 1, d);
        if (on_top && within_disc) return Vec(-unit(d + 1, d));
        if (on_side && within_height) {
            Vec n = Vec::Zero(d + 1);
            n.head(d) = -z.head(d) / r;
            return n;
        }
        return std::nullopt;
    };
    dom.sample_boundary = [=](int count) {
        const double cap = detail::unit_ball_volume(d) * std::pow(R, d);
        const double side = (d == 1 ? 2.0 : detail::unit_sphere_area(d) * std::pow(R, d - 1)) * H;
        const int n_cap = std::max(2, static_cast<int>(std::lround(count * cap / (2 * cap + side))));
        const int n_side = std::max(4, count - 2 * n_cap);
        std::vector<Vec> pts;
        for (const Vec& b : detail::ball_points(d, n_cap)) {
            for (double y : {0.0, H}) {
                Vec z(d + 1);
                z.head(d) = b * R;
                z[d] = y;
                pts.push_back(z);
            }
        }
        // Side: directions x heights, heights include both rims.
        const int n_dir = d == 1 ? 2 : std::max(4, static_cast<int>(std::sqrt(n_side * 2.0 * std::numbers::pi * R / H)));
        const int n_height = std::max(2, n_side / n_dir);
        for (const Vec& s : detail::sphere_points(d, n_dir)) {
            for (double y : detail::linspace(0.0, H, n_height)) {
                Vec z(d + 1);
                z.head(d) = s * R;
                z[d] = y;
                pts.push_back(z);
            }
        }
        return pts;
    };
    return dom;
}

/// Axis-aligned box (0, s_1) x ... x (0, s_d).
inline Domain make_box(const std::vector<double>& sides) {
    const int d = static_cast<int>(sides.size());
    if (d < 1 || d > kMaxDim) throw ConstructionError("sides", "need between 1 and " + std::to_string(kMaxDim) + " side lengths");
    for (std::size_t i = 0; i < sides.size(); ++i)
        if (!(sides[i] > 0)) throw ConstructionError("sides[" + std::to_string(i) + "]", "must be positive");
    Vec hi(d);
    for (int i = 0; i < d; ++i) hi[i] = sides[i];
    Domain dom;
    dom.kind = DomainKind::Box;
    dom.params = sides;
    dom.dim = d;
    dom.bbox = {Vec::Zero(d), hi};
    dom.inside = [=](const Vec& x) {
        for (int i = 0; i < d; ++i)
            if (!(x[i] > 0 && x[i] < hi[i])) return false;
        return true;
    };
    dom.boundary_project = [=](const Vec& x) -> Vec {
        Vec out = x;
        bool outside = false;
        for (int i = 0; i < d; ++i) {
            if (x[i] <= 0 || x[i] >= hi[i]) outside = true;
            out[i] = std::clamp(x[i], 0.0, hi[i]);
        }
        if (outside) return out;
        int best_axis = 0;
        double best = std::numeric_limits<double>::infinity(), target = 0.0;
        for (int i = 0; i < d; ++i) {
            if (x[i] < best) best = x[i], best_axis = i, target = 0.0;
            if (hi[i] - x[i] < best) best = hi[i] - x[i], best_axis = i, target = hi[i];
        }
        out[best_axis] = target;
        return out;
    };
    dom.inward_normal = [=](const Vec& x) -> std::optional<Vec> {
        const double tol = detail::kBoundaryTol * hi.maxCoeff();
        int faces = 0;
        Vec n = Vec::Zero(d);
        for (int i = 0; i < d; ++i) {
            if (std::abs(x[i]) <= tol) ++faces, n[i] = 1.0;
            else if (std::abs(x[i] - hi[i]) <= tol) ++faces, n[i] = -1.0;
            else if (x[i] < 0 || x[i] > hi[i]) return std::nullopt;
        }
        if (faces != 1) return std::nullopt;
        return n;
    };
    dom.sample_boundary = [=](int count) {
        std::vector<Vec> pts;
        if (d == 1) return std::vector<Vec>{Vec::Zero(1), hi};
        double total = 0.0;
        std::vector<double> area(d);
        for (int i = 0; i < d; ++i) {
            area[i] = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != i) area[i] *= hi[j];
            total += 2 * area[i];
        }
        for (int axis = 0; axis < d; ++axis) {
            const int per_face = std::max(4, static_cast<int>(count * area[axis] / total));
            const int per_dim = std::max(2, static_cast<int>(std::lround(std::pow(per_face, 1.0 / (d - 1)))));
            std::vector<int> idx(d - 1, 0);
            while (true) {
                Vec z(d);
                int k = 0;
                for (int j = 0; j < d; ++j)
                    if (j != axis) z[j] = hi[j] * idx[k++] / (per_dim - 1);
                for (double side : {0.0, hi[axis]}) {
                    z[axis] = side;
                    pts.push_back(z);
                }
                int carry = 0;
                while (carry < d - 1 && ++idx[carry] == per_dim) idx[carry++] = 0;
                if (carry == d - 1) break;
            }
        }
        return pts;
    };
    return dom;
}

// ---------------------------------------------------------------------------
// Boundary data

inline BoundaryIndicator constant_indicator(double v) {
    return {[v](const Vec&) { return v; }, v == 0.0 ? "zero" : (v == 1.0 ? "one" : "constant"), v == 0.0 || v == 1.0};
}

/// F = 1 on the inner sphere of an annulus, 0 on the outer one.
inline BoundaryIndicator annulus_inner_indicator(const Domain& dom) {
    const double mid = 0.5 * (dom.params[0] + dom.params[1]);
    return {[mid](const Vec& x) { return x.norm() <= mid ? 1.0 : 0.0; }, "inner"};
}

/// F = 1 on the outer sphere of an annulus, 0 on the inner one.
inline BoundaryIndicator annulus_outer_indicator(const Domain& dom) {
    const double mid = 0.5 * (dom.params[0] + dom.params[1]);
    return {[mid](const Vec& x) { return x.norm() >= mid ? 1.0 : 0.0; }, "outer"};
}

/// F = 1 on the side and the top of a cylinder, 0 on the open bottom disc.
/// The rim belongs to the closed set {F = 1}.
inline BoundaryIndicator cylinder_critical_indicator(const Domain& dom) {
    const int d = static_cast<int>(dom.params[0]);
    const double R = dom.params[1], H = dom.params[2];
    const double tol = detail::kBoundaryTol * std::max(R, H);
    return {[=](const Vec& z) { return (z.head(d).norm() >= R - tol || z[d] >= H - tol) ? 1.0 : 0.0; }, "critical"};
}

/// F = 1 on the closed top disc of a cylinder, 0 elsewhere.
inline BoundaryIndicator cylinder_top_indicator(const Domain& dom) {
    const int d = static_cast<int>(dom.params[0]);
    const double H = dom.params[2];
    const double tol = detail::kBoundaryTol * std::max(dom.params[1], H);
    return {[=](const Vec& z) { return z[d] >= H - tol ? 1.0 : 0.0; }, "top"};
}

/// Continuous top data min{1, (R - |x|)/width} on the top disc, 0 elsewhere.
/// With R = 1 and width = 0.1 this is min{1, 10 - 10|x|}.
inline BoundaryIndicator cylinder_ramp_indicator(const Domain& dom, double width = 0.1) {
    if (!(width > 0)) throw ConstructionError("width", "ramp width must be positive");
    const int d = static_cast<int>(dom.params[0]);
    const double R = dom.params[1], H = dom.params[2];
    const double tol = detail::kBoundaryTol * std::max(R, H);
    return {[=](const Vec& z) {
                if (z[d] < H - tol) return 0.0;
                return std::clamp((R - z.head(d).norm()) / width, 0.0, 1.0);
            },
            "ramp", false};
}

namespace detail {

inline std::vector<std::string> split_words(const std::string& text) {
    std::istringstream is(text);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

inline double parse_number(const std::string& word, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(word, &used);
        if (used != word.size()) throw std::invalid_argument(word);
        return v;
    } catch (const std::exception&) {
        throw ConstructionError(field, "expected a number, got '" + word + "'");
    }
}

inline int parse_integer(const std::string& word, const std::string& field) {
    const double v = parse_number(word, field);
    if (v != std::floor(v)) throw ConstructionError(field, "expected an integer, got '" + word + "'");
    return static_cast<int>(v);
}

}  // namespace detail

/// Parses `annulus r_in r_out d`, `cylinder d R H` or `box s_1 ... s_d`.
inline Domain parse_domain(const std::string& text) {
    const auto w = detail::split_words(text);
    if (w.empty()) throw ConstructionError("domain", "empty specification");
    if (w[0] == "annulus") {
        if (w.size() != 4) throw ConstructionError("domain", "expected 'annulus r_in r_out d'");
        return make_annulus(detail::parse_number(w[1], "r_in"), detail::parse_number(w[2], "r_out"),
                            detail::parse_integer(w[3], "d"));
    }
    if (w[0] == "cylinder") {
        if (w.size() != 4) throw ConstructionError("domain", "expected 'cylinder d R H'");
        return make_cylinder(detail::parse_integer(w[1], "d"), detail::parse_number(w[2], "R"),
                             detail::parse_number(w[3], "H"));
    }
    if (w[0] == "box") {
        std::vector<double> sides;
        for (std::size_t i = 1; i < w.size(); ++i)
            sides.push_back(detail::parse_number(w[i], "sides[" + std::to_string(i - 1) + "]"));
        return make_box(sides);
    }
    throw ConstructionError("domain", "unknown domain kind '" + w[0] + "'");
}

/// Parses `zero`, `one`, `inner`, `outer` (annulus), `critical`, `top`, `ramp [width]` (cylinder).
inline BoundaryIndicator parse_boundary(const std::string& text, const Domain& dom) {
    const auto w = detail::split_words(text);
    if (w.empty()) throw ConstructionError("boundary", "empty specification");
    const std::string& name = w[0];
    auto require = [&](DomainKind kind, const char* what) {
        if (dom.kind != kind) throw ConstructionError("boundary", "'" + name + "' requires " + what + " domain");
    };
    if (name == "zero") return constant_indicator(0.0);
    if (name == "one") return constant_indicator(1.0);
    if (name == "inner") return require(DomainKind::Annulus, "an annulus"), annulus_inner_indicator(dom);
    if (name == "outer") return require(DomainKind::Annulus, "an annulus"), annulus_outer_indicator(dom);
    if (name == "critical") return require(DomainKind::Cylinder, "a cylinder"), cylinder_critical_indicator(dom);
    if (name == "top") return require(DomainKind::Cylinder, "a cylinder"), cylinder_top_indicator(dom);
    if (name == "ramp") {
        require(DomainKind::Cylinder, "a cylinder");
        return cylinder_ramp_indicator(dom, w.size() > 1 ? detail::parse_number(w[1], "width") : 0.1);
    }
    throw ConstructionError("boundary", "unknown boundary data '" + name + "'");
}

// ---------------------------------------------------------------------------
// Geometric hypothesis checks. Both operate on a finite boundary sample, so a
// positive answer is necessary for the continuum hypothesis but not sufficient.

inline constexpr int kDefaultBoundarySamples = 4096;

/// Checks that every sampled boundary point with F = 0, other than x0, lies
/// strictly inside the ball B(x0 - R n(x0), R) tangent at x0.
inline bool check_enclosing_ball(const BoundaryIndicator& F, const Domain& dom, const Vec& x0, double R,
                                 int n_samples = kDefaultBoundarySamples) {
    const auto normal = dom.inward_normal(x0);
    if (!normal) throw std::domain_error("inward normal undefined at x0");
    if (!(R > 0)) throw std::invalid_argument("enclosing ball radius must be positive");
    const Vec center = x0 - R * *normal;
    const double skip = detail::kBoundaryTol * dom.diameter();
    for (const Vec& s : dom.sample_boundary(n_samples)) {
        if (F.is_one(s) || (s - x0).norm() <= skip) continue;
        if (!((s - center).squaredNorm() < R * R)) return false;
    }
    return true;
}

struct Separation {
    Vec xi;       ///< unit normal of the separating hyperplane
    double beta;  ///< offset: xi . x0 > beta > xi . s for sampled s with F(s) = 1
};

/// Looks for a hyperplane strictly separating x0 from the sampled set {F = 1}.
/// Runs Gilbert's nearest-point iteration on the convex hull of the sample and
/// stops as soon as the current direction separates.
inline std::optional<Separation> check_hyperplane_separation(const BoundaryIndicator& F, const Domain& dom,
                                                             const Vec& x0,
                                                             int n_samples = kDefaultBoundarySamples) {
    std::vector<Vec> ones;
    for (const Vec& s : dom.sample_boundary(n_samples))
        if (F.is_one(s)) ones.push_back(s);
    if (ones.empty()) {
        const Vec xi = dom.inward_normal(x0).value_or(unit(dom.dim, 0));
        return Separation{xi, xi.dot(x0) - 1.0};
    }
    auto separates = [&](const Vec& dir) -> std::optional<Separation> {
        const double len = dir.norm();
        if (!(len > 0)) return std::nullopt;
        const Vec xi = dir / len;
        double top = -std::numeric_limits<double>::infinity();
        for (const Vec& s : ones) top = std::max(top, xi.dot(s));
        const double at_x0 = xi.dot(x0);
        const double gap = at_x0 - top;
        if (!(gap > 1e-12 * std::max(1.0, dom.diameter()))) return std::nullopt;
        const double beta = 0.5 * (at_x0 + top);
        if (!(at_x0 > beta && top < beta)) return std::nullopt;
        return Separation{xi, beta};
    };

    // Start from the sample point nearest to x0.
    Vec q = *std::min_element(ones.begin(), ones.end(), [&](const Vec& a, const Vec& b) {
        return (a - x0).squaredNorm() < (b - x0).squaredNorm();
    });
    const double tiny = 1e-10 * dom.diameter();
    for (int iter = 0; iter < 20000; ++iter) {
        const Vec dir = x0 - q;
        if (dir.norm() <= tiny) return std::nullopt;
        if (auto sep = separates(dir)) return sep;
        const Vec* best = &ones.front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (const Vec& s : ones) {
            const double score = dir.dot(s);
            if (score > best_score) best_score = score, best = &s;
        }
        const Vec step = *best - q;
        const double denom = step.squaredNorm();
        if (!(denom > 0)) return std::nullopt;
        const double t = std::clamp(dir.dot(step) / denom, 0.0, 1.0);
        if (t <= 0) return std::nullopt;
        q += t * step;
    }
    return std::nullopt;
}

}  // namespace plap
