#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hyperlab/interp.hpp"
#include "hyperlab/quadrature.hpp"

namespace hyperlab::convolution {

inline constexpr double pi = std::numbers::pi;

// sigma^{(*3)}(0,3+) = 2*pi/sqrt(3): the boundary value and global supremum.
inline double sigma3_boundary_value() { return 2.0 * pi / std::sqrt(3.0); }

// Quadrature on (3, 3 + kBoundaryBand) degenerates as the interval collapses;
// within the band we return the continuous-extension boundary value instead.
inline constexpr double kBoundaryBand = 1e-6;

/// (sigma*sigma)(xi,tau) on H^1: 4/(s sqrt(s^2-4)) with s^2 = tau^2 - xi^2,
/// zero outside the closed support, +inf on the boundary curve s = 2 (the
/// singularity is integrable, so the boundary is flagged by the value rather
/// than by an error).
inline double conv2_1d(double xi, double tau) {
    if (tau <= 0.0) return 0.0;
    const double s2 = (tau - xi) * (tau + xi);
    if (s2 < 4.0) return 0.0;
    if (s2 == 4.0) return std::numeric_limits<double>::infinity();
    return 4.0 / std::sqrt(s2 * (s2 - 4.0));
}

/// (sigma*sigma)(xi,tau) on H^2: 2*pi/s on {s >= 2}, else 0.
inline double conv2_2d(double xi_norm, double tau) {
    if (tau <= 0.0) return 0.0;
    const double s2 = (tau - xi_norm) * (tau + xi_norm);
    if (s2 < 4.0) return 0.0;
    return 2.0 * pi / std::sqrt(s2);
}

/// sigma^{(*3)}(xi,tau) on H^2: (2*pi)^2 (1 - 3/s) on {s >= 3}, else 0.
inline double conv3_2d(double xi_norm, double tau) {
    if (tau <= 0.0) return 0.0;
    const double s2 = (tau - xi_norm) * (tau + xi_norm);
    if (s2 < 9.0) return 0.0;
    const double four_pi2 = 4.0 * pi * pi;
    return four_pi2 * (1.0 - 3.0 / std::sqrt(s2));
}

/// sigma^{(*3)}(0,tau) on H^1 by quadrature of
///   16 * int_2^{tau-1} [(tau+1)^2-x^2]^{-1/2} [(tau-1)^2-x^2]^{-1/2}
///                      (x^2-4)^{-1/2} dx.
/// Both endpoints carry inverse-square-root singularities; they are removed
/// exactly by x = 2 cosh v on the left half (sqrt(x^2-4) = 2 sinh v) and
/// x = (tau-1) sin w on the right half (sqrt((tau-1)^2-x^2) = (tau-1) cos w).
/// For tau within kBoundaryBand of 3 the boundary value 2*pi/sqrt(3) is
/// returned and *boundary_flag (if given) is set.
inline double conv3_1d(double tau, const QuadConfig& cfg = {},
                       bool* boundary_flag = nullptr) {
    if (boundary_flag) *boundary_flag = false;
    if (tau <= 3.0) return 0.0;
    if (tau < 3.0 + kBoundaryBand) {
        if (boundary_flag) *boundary_flag = true;
        return sigma3_boundary_value();
    }

    const double tp = tau + 1.0;  // outer radius
    const double tm = tau - 1.0;  // inner-edge radius, right endpoint
    const double x_mid = 0.5 * (2.0 + tm);

    auto left = [tp, tm](double v) {
        const double x = 2.0 * std::cosh(v);
        return 1.0 / std::sqrt((tp - x) * (tp + x) * (tm - x) * (tm + x));
    };
    auto right = [tp, tm](double w) {
        const double x = tm * std::sin(w);
        return 1.0 / std::sqrt((tp - x) * (tp + x) * (x - 2.0) * (x + 2.0));
    };

    const double v_mid = std::acosh(0.5 * x_mid);
    const double w_mid = std::asin(x_mid / tm);
    QuadResult rl = integrate(left, 0.0, v_mid, cfg);
    QuadResult rr = integrate(right, w_mid, 0.5 * pi, cfg);
    return 16.0 * (rl.value + rr.value);
}

/// Lower bound L(tau) of sigma^{(*3)}(0,tau), tau > 3.
inline double bound_L(double tau) {
    if (!(tau > 3.0)) throw std::domain_error("bound_L: requires tau > 3");
    const double tp = tau + 1.0;
    return 16.0 * pi / (std::sqrt(tp * tp - 4.0) * std::sqrt(2.0 * (tau - 1.0)) * std::sqrt(tp));
}

/// Upper bound U(tau), tau > 3; U(3+) = 2*pi/sqrt(3) and U is strictly
/// decreasing, which is what makes the boundary value the strict supremum.
inline double bound_U(double tau) {
    if (!(tau > 3.0)) throw std::domain_error("bound_U: requires tau > 3");
    // (tau+1)^2 - (tau-1)^2 = 4*tau
    return 16.0 * pi / (2.0 * std::sqrt(4.0 * tau) * std::sqrt(tau + 1.0));
}

enum class EvalKind { ClosedForm, Quadrature, Recursive, Cached };

/// tau -> sigma^{(*n)}(0,tau) with its metadata; callable either at xi = 0 or
/// at general (xi, tau) through Lorentz reduction.
struct MeasureProfile {
    int d = 1;
    int n = 2;
    EvalKind kind = EvalKind::ClosedForm;
    std::function<double(double)> eval;  // tau -> value at xi = 0
    double error_estimate = 0.0;

    double support_threshold() const { return static_cast<double>(n); }

    double operator()(double tau) const { return eval(tau); }

    double operator()(double xi_norm, double tau) const {
        if (tau <= std::fabs(xi_norm)) return 0.0;
        return eval(std::sqrt((tau - xi_norm) * (tau + xi_norm)));
    }
};

/// sigma^{(*(n+1))}(0,tau) from a profile for sigma^{(*n)}(0,.):
///   4 * int_n^{tau-1} x sigma_n(0,x) [((tau+1)^2-x^2)((tau-1)^2-x^2)]^{-1/2} dx
/// for tau > n+1, else 0. The right endpoint x = tau-1 is always an
/// inverse-square-root singularity and is removed by x = (tau-1) sin w; the
/// left half uses x = n cosh v, which also absorbs the 1/sqrt(x-n) blow-up of
/// the n = 2 closed form.
inline double conv_recursive(int n, const MeasureProfile& profile_n, double tau,
                             const QuadConfig& cfg = {}) {
    if (n < 2) throw std::domain_error("conv_recursive: need n >= 2");
    const double thr = static_cast<double>(n) + 1.0;
    if (tau <= thr) return 0.0;

    const double tp = tau + 1.0;
    const double tm = tau - 1.0;
    const double nn = static_cast<double>(n);
    const double x_mid = 0.5 * (nn + tm);

    auto kernel = [tp, tm, &profile_n](double x) {
        return x * profile_n(x) / std::sqrt((tp - x) * (tp + x) * (tm - x));
    };
    // Left half in x = n cosh v. dx = n sinh v dv; no singular factor is
    // cancelled explicitly, but the Jacobian vanishes like v at x = n and
    // tames any endpoint blow-up of the profile itself.
    auto left = [nn, &kernel, tp, tm](double v) {
        const double sh = std::sinh(v);
        const double x = nn * std::cosh(v);
        return kernel(x) / std::sqrt(tm + x) * (nn * sh);
    };
    // Right half in x = (tau-1) sin w: sqrt(tau-1-x) = sqrt(tm) cos(w)/... —
    // work with the exact factor sqrt((tm-x)(tm+x)) = tm cos w.
    auto right = [tp, tm, &profile_n](double w) {
        const double x = tm * std::sin(w);
        return x * profile_n(x) / std::sqrt((tp - x) * (tp + x));
    };

    const double v_mid = std::acosh(x_mid / nn);
    const double w_mid = std::asin(x_mid / tm);
    QuadResult rl = integrate(left, 0.0, v_mid, cfg);
    QuadResult rr = integrate(right, w_mid, 0.5 * pi, cfg);
    return 4.0 * (rl.value + rr.value);
}

inline MeasureProfile sigma2_profile_1d() {
    return {1, 2, EvalKind::ClosedForm,
            [](double tau) { return conv2_1d(0.0, tau); }, 0.0};
}

inline MeasureProfile sigma2_profile_2d() {
    return {2, 2, EvalKind::ClosedForm,
            [](double tau) { return conv2_2d(0.0, tau); }, 0.0};
}

inline MeasureProfile sigma3_profile_2d() {
    return {2, 3, EvalKind::ClosedForm,
            [](double tau) { return conv3_2d(0.0, tau); }, 0.0};
}

inline MeasureProfile sigma3_profile_1d(const QuadConfig& cfg = {}) {
    return {1, 3, EvalKind::Quadrature,
            [cfg](double tau) { return conv3_1d(tau, cfg); }, cfg.rel_tol};
}

inline MeasureProfile sigma4_profile_1d(const QuadConfig& cfg = {}) {
    return {1, 4, EvalKind::Recursive,
            [cfg, p3 = sigma3_profile_1d(cfg)](double tau) {
                return conv_recursive(3, p3, tau, cfg);
            },
            cfg.rel_tol};
}

/// sigma^{(*3)}(0,.) cached on a log-spaced grid in tau-3 over (3, 10^3] with
/// monotone cubic interpolation, for use inside outer integrals. Beyond the
/// grid the direct quadrature is used; inside the boundary band the flagged
/// boundary value applies.
inline MeasureProfile sigma3_cached_1d(const QuadConfig& cfg = {}, int nodes = 2000) {
    if (nodes < 4) throw std::invalid_argument("sigma3_cached_1d: need >= 4 nodes");
    const double lo = std::log(kBoundaryBand);
    const double hi = std::log(1000.0 - 3.0);
    std::vector<double> xs(nodes), ys(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / (nodes - 1);
        xs[i] = 3.0 + std::exp(t);
        ys[i] = conv3_1d(xs[i], cfg);
    }
    auto interp = std::make_shared<MonotoneCubic>(std::move(xs), std::move(ys));
    MeasureProfile p;
    p.d = 1;
    p.n = 3;
    p.kind = EvalKind::Cached;
    p.error_estimate = 1e-8;  // interpolation error dominates cfg.rel_tol here
    p.eval = [interp, cfg](double tau) {
        if (tau <= 3.0) return 0.0;
        if (tau < 3.0 + kBoundaryBand) return sigma3_boundary_value();
        if (tau > interp->x_max()) return conv3_1d(tau, cfg);
        return (*interp)(tau);
    };
    return p;
}

struct SupCertificateRow {
    double tau;
    double sigma3;
    double lower;
    double upper;
};

struct SupCertificate {
    double value = 0.0;  // the supremum 2*pi/sqrt(3), attained only as tau -> 3+
    std::vector<SupCertificateRow> rows;
    bool sandwich_holds = true;       // L <= sigma3 <= U rowwise
    bool strictly_below_sup = true;   // U < 2*pi/sqrt(3) rowwise
    double max_tau_times_value = 0.0; // decay diagnostic on tau in [10, 100]
};

/// Certifies sup_{tau>3} sigma^{(*3)}(0,tau) = 2*pi/sqrt(3) on a grid: the
/// value is only approached in the boundary limit, and U(tau) < 2*pi/sqrt(3)
/// pins every sampled tau strictly below it.
inline SupCertificate sup_conv3_1d(int grid_points = 500, double tau_max = 100.0,
                                   const QuadConfig& cfg = {}) {
    SupCertificate cert;
    cert.value = sigma3_boundary_value();
    cert.rows.reserve(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        // grid over (3, tau_max], geometric in tau-3 so the boundary region
        // is well sampled
        const double f = static_cast<double>(i + 1) / grid_points;
        const double tau = 3.0 + (tau_max - 3.0) * std::pow(1e-4, 1.0 - f);
        const double v = conv3_1d(tau, cfg);
        SupCertificateRow row{tau, v, bound_L(tau), bound_U(tau)};
        if (!(row.lower <= v * (1.0 + 1e-9) && v <= row.upper * (1.0 + 1e-9)))
            cert.sandwich_holds = false;
        if (!(row.upper < cert.value)) cert.strictly_below_sup = false;
        if (tau >= 10.0) cert.max_tau_times_value = std::max(cert.max_tau_times_value, tau * v);
        cert.rows.push_back(row);
    }
    return cert;
}

}  // namespace hyperlab::convolution
