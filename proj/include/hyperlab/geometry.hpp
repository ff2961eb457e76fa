#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hyperlab::geometry {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Point of H^1 in rapidity coordinates; embedding (sinh u, cosh u).
struct HPoint1 {
    double u = 0.0;

    double xi() const { return std::sinh(u); }
    double tau() const { return std::cosh(u); }
};

/// Point of H^2 in polar coordinates (r, theta); embedding
/// (r cos theta, r sin theta, <r>) with <r> = sqrt(1 + r^2).
struct HPoint2 {
    double r = 0.0;
    double theta = 0.0;  // kept in [0, 2*pi)

    HPoint2() = default;
    HPoint2(double r_, double theta_) : r(r_), theta(normalize_angle(theta_)) {
        if (r < 0.0) throw std::domain_error("HPoint2: radius must be nonnegative");
    }

    double xi1() const { return r * std::cos(theta); }
    double xi2() const { return r * std::sin(theta); }
    double tau() const { return std::sqrt(1.0 + r * r); }

    static double normalize_angle(double t) {
        double a = std::fmod(t, two_pi);
        if (a < 0.0) a += two_pi;
        if (a >= two_pi) a = 0.0;
        return a;
    }
};

/// Composable element of the symmetry group: a rotation R_phi about the tau
/// axis (d=2 only) and a boost L^t along the first coordinate. With
/// rotate_first set the action is L^t ∘ R_phi, otherwise R_phi ∘ L^t.
///
/// Sign convention: L^{tanh k} shifts rapidity u -> u + k on H^1, so the
/// boost with t_k = -tanh(k) maps the cap C_k onto C_0 (and the figure's
/// t = tanh(2) for C_{-2} -> C_0 is the k = -2 instance of the same rule).
struct Isometry {
    double boost_t = 0.0;  // in (-1, 1)
    double phi = 0.0;      // rotation angle in [0, 2*pi)
    bool rotate_first = true;

    static Isometry boost(double t) { return {t, 0.0, true}; }
    static Isometry boost_rotation(double t, double phi, bool rotate_first = true) {
        return {t, phi, rotate_first};
    }

    double rapidity() const {
        check();
        return std::atanh(boost_t);
    }

    Isometry inverse() const {
        // (L^t ∘ R_phi)^{-1} = R_{-phi} ∘ L^{-t} and vice versa.
        return {-boost_t, -phi, !rotate_first};
    }

    HPoint1 apply(const HPoint1& p) const {
        check();
        return HPoint1{p.u + std::atanh(boost_t)};
    }

    HPoint2 apply(const HPoint2& p) const {
        check();
        std::array<double, 3> v{p.xi1(), p.xi2(), p.tau()};
        if (rotate_first) {
            rotate(v);
            boost_first_axis(v);
        } else {
            boost_first_axis(v);
            rotate(v);
        }
        return HPoint2{std::hypot(v[0], v[1]), std::atan2(v[1], v[0])};
    }

private:
    void check() const {
        if (!(std::fabs(boost_t) < 1.0))
            throw std::domain_error("Isometry: boost parameter must satisfy |t| < 1");
    }
    void rotate(std::array<double, 3>& v) const {
        // R_phi(x1, x2, tau) = (x1 cos phi + x2 sin phi, -x1 sin phi + x2 cos phi, tau)
        const double c = std::cos(phi), s = std::sin(phi);
        const double x1 = v[0] * c + v[1] * s;
        const double x2 = -v[0] * s + v[1] * c;
        v[0] = x1;
        v[1] = x2;
    }
    void boost_first_axis(std::array<double, 3>& v) const {
        const double g = 1.0 / std::sqrt((1.0 - boost_t) * (1.0 + boost_t));
        const double x1 = g * (v[0] + boost_t * v[2]);
        const double tau = g * (v[2] + boost_t * v[0]);
        v[0] = x1;
        v[2] = tau;
    }
};

template <class P>
P boost_apply(const Isometry& iso, const P& p) {
    return iso.apply(p);
}

/// Cap index for H^1: C_k = {k - 1/2 <= u < k + 1/2}.
struct CapId1 {
    int k = 0;
};

/// Cap index for H^2: C_{n,j} with 2^n <= r < 2^{n+1} and
/// 2*pi*j/2^n <= theta < 2*pi*(j+1)/2^n; C_{0,0} is the disk r < 2.
struct CapId2 {
    int n = 0;
    long j = 0;

    void check() const {
        if (n < 0 || j < 0 || j >= (1L << n))
            throw std::domain_error("CapId2: need n >= 0 and 0 <= j < 2^n");
    }
};

inline CapId1 cap_of(const HPoint1& p) {
    return CapId1{static_cast<int>(std::floor(p.u + 0.5))};
}

inline CapId2 cap_of(const HPoint2& p) {
    if (p.r < 2.0) return CapId2{0, 0};
    const int n = std::ilogb(p.r);  // 2^n <= r < 2^{n+1}
    long j = static_cast<long>(std::floor(p.theta / two_pi * static_cast<double>(1L << n)));
    if (j >= (1L << n)) j = (1L << n) - 1;  // guards angle rounding at 2*pi
    if (j < 0) j = 0;
    return CapId2{n, j};
}

inline double cap_measure(CapId1 /*c*/) { return 1.0; }

inline double annulus_measure(int n) {
    if (n < 0) throw std::domain_error("annulus_measure: n must be >= 0");
    if (n == 0) return two_pi * (std::sqrt(5.0) - 1.0);
    const double p4n = std::pow(4.0, n);
    return two_pi * (std::sqrt(1.0 + 4.0 * p4n) - std::sqrt(1.0 + p4n));
}

inline double cap_measure(CapId2 c) {
    c.check();
    if (c.n == 0) return two_pi * (std::sqrt(5.0) - 1.0);
    return annulus_measure(c.n) / static_cast<double>(1L << c.n);
}

/// Isometry mapping C_k onto C_0 (exactly, Lemma-2.1 style boost).
inline Isometry recenter_cap(CapId1 c) {
    return Isometry::boost(-std::tanh(static_cast<double>(c.k)));
}

/// Isometry L^{-t} ∘ R_phi moving C_{n,j} inside {|xi| <= 2*sqrt(2)*pi}.
/// For n <= 2 the cap already sits inside that ball and the identity is
/// returned; for n >= 3, t = 1 - (pi/2^n)^2 and phi centers the angular
/// sector at theta = 0.
inline Isometry recenter_cap(CapId2 c) {
    c.check();
    if (c.n <= 2) return Isometry{};
    const double w = std::numbers::pi / static_cast<double>(1L << c.n);
    const double t = 1.0 - w * w;
    const double phi = two_pi * (static_cast<double>(c.j) + 0.5) / static_cast<double>(1L << c.n);
    return Isometry::boost_rotation(-t, phi, /*rotate_first=*/true);
}

/// s = sqrt(tau^2 - |xi|^2) for (xi, tau) strictly inside the forward cone.
inline double lorentz_reduce(double xi_norm, double tau) {
    const double n = std::fabs(xi_norm);
    if (!(tau > n)) throw std::domain_error("lorentz_reduce: point outside the open cone");
    return std::sqrt((tau - n) * (tau + n));
}

inline double lorentz_reduce(double xi1, double xi2, double tau) {
    return lorentz_reduce(std::hypot(xi1, xi2), tau);
}

}  // namespace hyperlab::geometry
