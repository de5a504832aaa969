#pragma once

#include <cmath>
#include <stdexcept>

#include "plap/vec.hpp"

namespace plap::radial {

/// Exponent of the radial solution r^{-gamma}: (d - p)/(p - 1).
inline double gamma(double p, int d) {
    if (!(p > 1)) throw std::domain_error("gamma: p must exceed 1");
    return (d - p) / (p - 1);
}

/// Radial p-harmonic profile on the shell r0 < |x| < r1 taking v0 on |x| = r0
/// and v1 on |x| = r1.
///
/// Powers of r are formed as exp(-gamma ln r) and the ratio is rewritten with
/// expm1, so p-sweeps down to p ~ 1.0001 (gamma ~ 1e4 in the plane) stay finite.
/// The p = d line uses the logarithmic profile.
class RadialProfile {
public:
    RadialProfile(double p, int d, double r0, double r1, double v0, double v1)
        : p_(p), d_(d), r0_(r0), r1_(r1), v0_(v0), v1_(v1) {
        if (!(p > 1 && p <= 2)) throw std::domain_error("RadialProfile: p must lie in (1, 2]");
        if (d < 2) throw std::domain_error("RadialProfile: d must be >= 2");
        if (!(r0 > 0 && r1 > r0)) throw std::domain_error("RadialProfile: need 0 < r0 < r1");
        gamma_ = p == d ? 0.0 : radial::gamma(p, d);
        if (p < d && !(gamma_ > 0)) throw std::logic_error("RadialProfile: gamma must be positive for p < d");
        log_span_ = std::log(r1 / r0);
        if (gamma_ != 0.0) denom_ = std::expm1(-gamma_ * log_span_);
    }

    double p() const { return p_; }
    int d() const { return d_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }
    double gamma() const { return gamma_; }

    /// Fraction of the way from v0 to v1 at radius r.
    double fraction(double r) const {
        check(r);
        const double s = std::log(r / r0_);
        if (gamma_ == 0.0) return s / log_span_;
        return std::expm1(-gamma_ * s) / denom_;
    }

    double value(double r) const { return v0_ + (v1_ - v0_) * fraction(r); }

    double derivative(double r) const {
        check(r);
        if (gamma_ == 0.0) return (v1_ - v0_) / (r * log_span_);
        const double s = std::log(r / r0_);
        return (v1_ - v0_) * (-gamma_ / r) * std::exp(-gamma_ * s) / denom_;
    }

private:
    void check(double r) const {
        const double slack = 1e-12 * r1_;
        if (!(r >= r0_ - slack && r <= r1_ + slack)) throw std::out_of_range("radius outside [r0, r1]");
    }

    double p_;
    int d_;
    double r0_, r1_, v0_, v1_;
    double gamma_ = 0.0;
    double log_span_ = 0.0;
    double denom_ = 0.0;
};

inline double radial_value(const RadialProfile& prof, double r) { return prof.value(r); }
inline double radial_derivative(const RadialProfile& prof, double r) { return prof.derivative(r); }

/// Shell barrier vanishing on the sphere |x - center| = inner_radius and equal
/// to one on |x - center| = inner_radius + width.
///
/// With (inner_radius, width) = (R, M) this is the lower barrier for the
/// explosion estimate; with (delta, delta') it is the upper barrier built on an
/// exterior ball.
struct ShellBarrier {
    double p;
    int d;
    double inner_radius;
    double width;
    Vec center;

    RadialProfile profile() const { return {p, d, inner_radius, inner_radius + width, 0.0, 1.0}; }

    double value(const Vec& x) const {
        const double r = (x - center).norm();
        if (!(r >= inner_radius && r <= inner_radius + width))
            throw std::out_of_range("barrier evaluated outside its shell");
        return profile().value(r);
    }

    /// Radial derivative, i.e. the normal derivative on the inner sphere.
    double radial_derivative(double r) const { return profile().derivative(r); }
};

inline double barrier_lower(double p, int d, double R, double M, const Vec& x, const Vec& center) {
    return ShellBarrier{p, d, R, M, center}.value(x);
}

/// Upper bound on u at distance eps outside a sphere of radius R enclosing
/// {F = 1}, when the domain lies inside the concentric ball of radius R_outer.
inline double separating_sphere_bound(double p, int d, double R, double eps, double R_outer) {
    if (!(eps > 0 && R + eps < R_outer)) throw std::domain_error("separating sphere bound needs R < R + eps < R_outer");
    return RadialProfile(p, d, R, R_outer, 1.0, 0.0).value(R + eps);
}

/// Explicit lower bound on the cylinder hitting probability at height h,
/// prefactor * exp(-rate / (p - 1)). The value underflows double precision for
/// most parameters of interest, so compare through log_value().
struct Lemma31Bound {
    double prefactor;
    double rate;
    double p;

    double log_value() const { return std::log(prefactor) - rate / (p - 1); }
    double value() const { return std::exp(log_value()); }
};

inline Lemma31Bound lemma31(double p, int d, double H, double h) {
    if (!(p > 1 && p <= 2)) throw std::domain_error("lemma31: p must lie in (1, 2]");
    if (d < 1) throw std::domain_error("lemma31: d must be positive");
    if (!(h > 0 && h < H)) throw std::domain_error("lemma31: need 0 < h < H");
    const double gap = 2 * H - h;
    return {h * h / (64 * gap * gap), 32 * H * H * gap * gap * gap * d / (h * h * h), p};
}

inline double lemma31_bound(double p, int d, double H, double h) { return lemma31(p, d, H, h).value(); }

}  // namespace plap::radial
