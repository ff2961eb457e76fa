#pragma once

#include <cmath>
#include <stdexcept>

#include "hyperlab/quadrature.hpp"

namespace hyperlab::specfun {

/// e^x K_0(x), evaluated from the defining integral
/// K_0(x) = ∫_0^∞ exp(-x cosh t) dt with the exponential peak factored out.
/// The scaled form stays finite for arguments where K_0 itself underflows.
inline double bessel_k0_scaled(double x, const QuadConfig& cfg = {}) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k0: argument must be positive");
    cfg.validate();
    // Truncate where x(cosh t - 1) exceeds ~46: the integrand has dropped
    // below 1e-20 of its peak value there.
    const double t_max = 2.0 * std::asinh(std::sqrt(23.0 / x));
    auto integrand = [x](double t) {
        const double s = std::sinh(0.5 * t);
        return std::exp(-2.0 * x * s * s);  // cosh t - 1 = 2 sinh^2(t/2)
    };
    QuadResult r = integrate(integrand, 0.0, t_max, cfg);
    return r.value;
}

/// K_0(x) by the defining integral; strictly positive, strictly decreasing.
inline double bessel_k0(double x, const QuadConfig& cfg = {}) {
    return std::exp(-x) * bessel_k0_scaled(x, cfg);
}

/// H(a) = ||f_a||^2_{L^2(H^1)} = 2 K_0(2a) for the family f_a(y) = e^{-a<y>}.
inline double mass_exp_family(double a, const QuadConfig& cfg = {}) {
    if (!(a > 0.0)) throw std::domain_error("mass_exp_family: parameter must be positive");
    return 2.0 * bessel_k0(2.0 * a, cfg);
}

/// e^{2a} H(a); used where H alone would underflow (large a).
inline double mass_exp_family_scaled(double a, const QuadConfig& cfg = {}) {
    if (!(a > 0.0)) throw std::domain_error("mass_exp_family: parameter must be positive");
    return 2.0 * bessel_k0_scaled(2.0 * a, cfg);
}

}  // namespace hyperlab::specfun
