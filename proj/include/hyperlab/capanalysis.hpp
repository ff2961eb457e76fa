#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hyperlab/convolution.hpp"
#include "hyperlab/geometry.hpp"
#include "hyperlab/quadrature.hpp"
#include "hyperlab/strichartz.hpp"
#include "hyperlab/threads.hpp"

namespace hyperlab::capanalysis {

using std::complex;
using geometry::CapId1;
using geometry::CapId2;
using strichartz::TrialFunction;

inline constexpr double pi = std::numbers::pi;

// ---- index blocks of the two-dimensional cap interaction argument ----------

/// distance of x to the nearest integer
inline double dist_to_nearest_int(double x) {
    return std::fabs(x - std::round(x));
}

/// A_{m,n}^{(j)} = { 0 <= l < 2^m : l in [2^{m-n}(j-2), 2^{m-n}(j+2)) mod 2^m }
inline std::vector<long> block_A(int m, int n, long j) {
    if (n < 0 || m < n || j < 0 || j >= (1L << n))
        throw std::domain_error("block_A: need 0 <= n <= m, 0 <= j < 2^n");
    const long w = 1L << (m - n);
    const long size = 1L << m;
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(std::min(size, 4 * w)));
    for (long l = w * (j - 2); l < w * (j + 2); ++l)
        out.push_back(((l % size) + size) % size);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// B_{m,n}^{(j,k)} = { 0 <= l < 2^m : l in [2^{m-n}(j+k), 2^{m-n}(j+k+1)) mod 2^m },
/// defined for -2 <= k <= 2^n - 3
inline std::vector<long> block_B(int m, int n, long j, long k) {
    if (n < 0 || m < n || j < 0 || j >= (1L << n))
        throw std::domain_error("block_B: need 0 <= n <= m, 0 <= j < 2^n");
    if (k < -2 || k > (1L << n) - 3)
        throw std::domain_error("block_B: need -2 <= k <= 2^n - 3");
    const long w = 1L << (m - n);
    const long size = 1L << m;
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(w));
    for (long l = w * (j + k); l < w * (j + k + 1); ++l)
        out.push_back(((l % size) + size) % size);
    std::sort(out.begin(), out.end());
    return out;
}

/// interpolation exponent of the L^4/L^6 log-convexity diagnostic
inline double interpolation_theta(double p) {
    if (!(p > 4.0 && p < 6.0))
        throw std::domain_error("interpolation_theta: p must lie in (4, 6)");
    return (1.0 / p - 1.0 / 6.0) / (1.0 / 4.0 - 1.0 / 6.0);
}

// ---- cap decompositions -----------------------------------------------------

struct CapMass1 {
    int k;
    double mass2;  // squared L^2 mass on C_k
};

struct CapMass2 {
    CapId2 id;
    double mass2;
};

/// f = sum_k f 1_{C_k} with the per-cap squared masses; d=2 entries cover the
/// rotation-invariant and single-cap representations.
struct CapDecomposition {
    TrialFunction f;
    std::vector<CapMass1> caps1;
    std::vector<CapMass2> caps2;
    double total_mass2 = 0.0;
};

inline CapDecomposition decompose(const TrialFunction& f, const QuadConfig& cfg = {}) {
    CapDecomposition dec;
    dec.f = f;
    if (f.d == 1) {
        const auto s = strichartz::tf_detail::support_u(f);
        const int klo = static_cast<int>(std::floor(s.lo + 0.5));
        const int khi = static_cast<int>(std::floor(s.hi + 0.5));
        for (int k = klo; k <= khi; ++k) {
            auto g = [&f](double u) { return std::norm(strichartz::eval_rapidity(f, u)); };
            const double m2 = integrate(g, k - 0.5, k + 0.5, cfg).value;
            dec.caps1.push_back({k, m2});
            dec.total_mass2 += m2;
        }
        return dec;
    }
    if (const auto* c = std::get_if<strichartz::CapIndicator2>(&f.rep)) {
        const double m2 =
            f.scale * f.scale * geometry::cap_measure(CapId2{c->n, c->j});
        dec.caps2.push_back({CapId2{c->n, c->j}, m2});
        dec.total_mass2 = m2;
        return dec;
    }
    // rotation-invariant d=2: generation masses split equally over the 2^n caps
    int n_max = 30;
    if (const auto* a = std::get_if<strichartz::AnnularSteps>(&f.rep))
        n_max = static_cast<int>(a->v.size()) - 1;
    else if (const auto* p = std::get_if<strichartz::RadialProfile>(&f.rep))
        n_max = std::max(0, std::ilogb(p->r.back()));
    for (int n = 0; n <= n_max; ++n) {
        const double rlo = (n == 0) ? 0.0 : std::ldexp(1.0, n);
        const double rhi = std::ldexp(1.0, n + 1);
        auto g = [&f](double r) {
            const double v = strichartz::eval_radial(f, r);
            return v * v * r / std::sqrt(1.0 + r * r);
        };
        const double gen2 = 2.0 * pi * integrate(g, rlo, rhi, cfg).value;
        if (n > 2 && gen2 < 1e-24 * (dec.total_mass2 + 1e-300)) break;
        const long ncaps = 1L << n;
        for (long j = 0; j < ncaps; ++j)
            dec.caps2.push_back({CapId2{n, j}, gen2 / static_cast<double>(ncaps)});
        dec.total_mass2 += gen2;
    }
    return dec;
}

struct CapSupMass {
    int d = 1;
    CapId1 cap1{};
    CapId2 cap2{};
    double mass = 0.0;  // L^2 mass (not squared)
};

/// argmax cap of the decomposition; ties go to smaller |k| (d=1) or
/// lexicographically smaller (n, j) (d=2)
inline CapSupMass cap_sup_mass(const CapDecomposition& dec) {
    CapSupMass best;
    best.d = dec.f.d;
    double best2 = -1.0;
    if (dec.f.d == 1) {
        // ties (within relative 1e-12) go to the cap with smaller |k|, then
        // to the smaller k
        auto key = [](int k) { return std::make_pair(std::abs(k), k); };
        bool first = true;
        for (const auto& c : dec.caps1) {
            const bool tie = !first && std::fabs(c.mass2 - best2) <=
                                           1e-12 * std::max(c.mass2, best2);
            if (first || (!tie && c.mass2 > best2) ||
                (tie && key(c.k) < key(best.cap1.k))) {
                best2 = std::max(best2, c.mass2);
                best.cap1 = CapId1{c.k};
                first = false;
            }
        }
    } else {
        // entries are generated in lexicographic (n, j) order, so keeping the
        // first strict maximum realizes the tie-break
        for (const auto& c : dec.caps2) {
            if (c.mass2 > best2 * (1.0 + 1e-12)) {
                best2 = c.mass2;
                best.cap2 = c.id;
            }
        }
    }
    best.mass = std::sqrt(std::max(best2, 0.0));
    return best;
}

/// (sum_k ||f_k||^3_{L^r(H^1)})^{1/3} with r = 2q/(2q-3)
inline double refinement_norm(const CapDecomposition& dec, double q,
                              const QuadConfig& cfg = {}) {
    if (!(q >= 3.0)) throw std::domain_error("refinement_norm: requires q >= 3");
    if (dec.f.d != 1) throw std::invalid_argument("refinement_norm: d=1 only");
    const double r = 2.0 * q / (2.0 * q - 3.0);
    double sum = 0.0;
    for (const auto& c : dec.caps1) {
        if (c.mass2 <= 0.0) continue;
        auto g = [&](double u) {
            return std::pow(std::abs(strichartz::eval_rapidity(dec.f, u)), r);
        };
        const double lr = std::pow(integrate(g, c.k - 0.5, c.k + 0.5, cfg).value, 1.0 / r);
        sum += lr * lr * lr;
    }
    return std::cbrt(sum);
}

// ---- bilinear cap interaction -----------------------------------------------

namespace bil_detail {

/// E0(X,T) = int_{-1/2}^{1/2} e^{i(X sinh u + T cosh u)} du by a composite
/// Gauss-Kronrod panel rule; exact up to quadrature error at any argument.
inline complex<double> e0_exact(double X, double T) {
    auto g = [X, T](double u) -> complex<double> {
        const double ph = X * std::sinh(u) + T * std::cosh(u);
        return {std::cos(ph), std::sin(ph)};
    };
    const double omega = std::fabs(X) + std::fabs(T) + 1.0;
    const long npanels =
        std::max(4L, static_cast<long>(std::ceil(omega / (2.0 * pi * 0.75))));
    complex<double> total = 0.0;
    double err;
    const double h = 1.0 / static_cast<double>(npanels);
    for (long i = 0; i < npanels; ++i) {
        complex<double> v;
        quad_detail::gk15(g, -0.5 + h * i, -0.5 + h * (i + 1), v, err);
        total += v;
    }
    return total;
}

/// Stationary-phase / endpoint asymptotics for large |X|+|T|, falling back to
/// the exact rule near transitions (stationary point close to an endpoint).
inline complex<double> e0_hybrid(double X, double T) {
    const double omega = std::fabs(X) + std::fabs(T);
    if (omega <= 150.0) return e0_exact(X, T);

    auto phi = [X, T](double u) { return X * std::sinh(u) + T * std::cosh(u); };
    auto dphi = [X, T](double u) { return X * std::cosh(u) + T * std::sinh(u); };

    const double da = dphi(-0.5), db = dphi(0.5);
    if (std::fabs(da) < 12.0 || std::fabs(db) < 12.0) return e0_exact(X, T);

    const complex<double> iunit(0.0, 1.0);
    auto osc = [](double ph) { return complex<double>(std::cos(ph), std::sin(ph)); };

    complex<double> result = osc(phi(0.5)) / (iunit * db) - osc(phi(-0.5)) / (iunit * da);
    if (da * db < 0.0) {
        // interior stationary point u0 with tanh(u0) = -X/T
        const double u0 = std::atanh(-X / T);
        const double d2 = X * std::sinh(u0) + T * std::cosh(u0);  // = sgn(T) * s
        result += std::sqrt(2.0 * pi / std::fabs(d2)) *
                  osc(phi(u0) + (d2 > 0.0 ? 0.25 : -0.25) * pi);
    }
    return result;
}

}  // namespace bil_detail

/// ||T1_{C_k} . T1_{C_l}||_{L^q(R^2)} by grid quadrature. The boosted-cap
/// extensions reduce exactly to the extension E0 of 1_{C_0}:
/// Tf_k(x,t) = E0(x cosh k + t sinh k, x sinh k + t cosh k), and the grid is
/// taken in the frame boosted by (k+l)/2 (a measure-preserving substitution)
/// so the interaction region stays centered for every pair.
inline double bilinear_cap_norm(int k, int l, double q,
                                const strichartz::SpaceTimeGrid& grid = {
                                    40.0, 0.25, 40.0, 0.25, 6.0}) {
    if (!(q > 2.0)) throw std::domain_error("bilinear_cap_norm: requires q > 2");
    const double kap = 0.5 * static_cast<double>(k - l);
    const double cp = std::cosh(kap), sp = std::sinh(kap);

    const long mx = 2 * static_cast<long>(std::ceil(grid.x_extent / grid.x_step / 2.0));
    const long mt = 2 * static_cast<long>(std::ceil(grid.t_extent / grid.t_step / 2.0));
    const double hx = 2.0 * grid.x_extent / mx;
    const double ht = 2.0 * grid.t_extent / mt;

    std::vector<double> rowsum(mt + 1, 0.0);
    parallel_for(static_cast<std::size_t>(mt + 1), [&](std::size_t jt) {
        const double t = -grid.t_extent + ht * static_cast<double>(jt);
        double acc = 0.0;
        for (long j = 0; j <= mx; ++j) {
            const double x = -grid.x_extent + hx * static_cast<double>(j);
            const complex<double> a =
                bil_detail::e0_hybrid(x * cp + t * sp, x * sp + t * cp);
            const complex<double> b =
                bil_detail::e0_hybrid(x * cp - t * sp, -x * sp + t * cp);
            const double m = std::abs(a) * std::abs(b);
            acc += strichartz::st_detail::simpson_w(j, mx) * std::pow(m, q);
        }
        rowsum[jt] = acc * hx / 3.0;
    });
    double total = 0.0;
    for (long jt = 0; jt <= mt; ++jt)
        total += strichartz::st_detail::simpson_w(jt, mt) * rowsum[jt];
    total *= ht / 3.0;
    return std::pow(total, 1.0 / q);
}

// ---- the Cauchy-Schwarz smallness functional (d = 2) ------------------------

namespace cs_detail {

/// (sigma*sigma) at the sum point of two H^2 points with radii r1, r2 and
/// angular separation psi; the height obeys s^2 = 2(1 + <r1><r2> - r1 r2 cos psi)
inline double kernel(double r1, double r2, double cpsi) {
    const double b1 = std::sqrt(1.0 + r1 * r1), b2 = std::sqrt(1.0 + r2 * r2);
    const double s2 = 2.0 * (1.0 + b1 * b2 - r1 * r2 * cpsi);
    return 2.0 * pi / std::sqrt(s2);  // always s >= 2: inside the support
}

}  // namespace cs_detail

/// B(f) = iint |f(xi)|^2 |f(eta)|^2 (sigma*sigma)(xi+eta, <xi>+<eta>)
///        dsigma(xi) dsigma(eta)
/// reduced to three variables by rotation invariance. Radial densities use
///   B = 4 pi int_0^pi int int w(r1) w(r2) K(r1,r2,psi) dr1 dr2 dpsi,
/// w(r) = |f(r)|^2 r/<r>; a single-cap indicator uses the angular-overlap
/// weight (W - |psi|) of its sector width W.
inline double bilinear_cs_functional(const TrialFunction& f, const QuadConfig& cfg = {}) {
    if (f.d != 2) throw std::invalid_argument("bilinear_cs_functional: d=2 only");
    QuadConfig c = cfg;
    c.rel_tol = std::max(cfg.rel_tol, 1e-6);
    c.abs_tol = std::max(cfg.abs_tol, 1e-12);

    if (const auto* cap = std::get_if<strichartz::CapIndicator2>(&f.rep)) {
        const double W = 2.0 * pi / std::ldexp(1.0, cap->n);
        const double rlo = (cap->n == 0) ? 0.0 : std::ldexp(1.0, cap->n);
        const double rhi = std::ldexp(1.0, cap->n + 1);
        const double v2 = f.scale * f.scale;
        auto outer = [&](double r1) {
            auto mid = [&](double r2) {
                auto inner = [&](double psi) {
                    return (W - std::fabs(psi)) * cs_detail::kernel(r1, r2, std::cos(psi));
                };
                const double ang = 2.0 * integrate(inner, 0.0, W, c).value;
                return ang * r2 / std::sqrt(1.0 + r2 * r2);
            };
            return integrate(mid, rlo, rhi, c).value * r1 / std::sqrt(1.0 + r1 * r1);
        };
        return v2 * v2 * integrate(outer, rlo, rhi, c).value;
    }

    // rotation-invariant representations: integrate annulus segments so the
    // adaptive rule never straddles a step discontinuity
    std::vector<double> edges{0.0};
    double rmax;
    if (const auto* a = std::get_if<strichartz::AnnularSteps>(&f.rep)) {
        for (std::size_t n = 1; n <= a->v.size(); ++n) edges.push_back(std::ldexp(1.0, n));
        rmax = edges.back();
    } else if (const auto* p = std::get_if<strichartz::RadialProfile>(&f.rep)) {
        edges.push_back(p->r.back());
        rmax = p->r.back();
    } else if (const auto* e = std::get_if<strichartz::ExpFamily>(&f.rep)) {
        rmax = std::sqrt(std::pow(1.0 + 30.0 / e->a, 2) - 1.0);
        edges.push_back(rmax);
    } else {
        throw std::invalid_argument("bilinear_cs_functional: unsupported representation");
    }

    auto w = [&f](double r) {
        const double v = strichartz::eval_radial(f, r);
        return v * v * r / std::sqrt(1.0 + r * r);
    };

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
            auto outer = [&](double r1) {
                const double w1 = w(r1);
                if (w1 == 0.0) return 0.0;
                auto mid = [&](double r2) {
                    const double w2 = w(r2);
                    if (w2 == 0.0) return 0.0;
                    auto inner = [&](double psi) {
                        return cs_detail::kernel(r1, r2, std::cos(psi));
                    };
                    return w2 * integrate(inner, 0.0, pi, c).value;
                };
                return w1 * integrate(mid, edges[j], edges[j + 1], c).value;
            };
            total += integrate(outer, edges[i], edges[i + 1], c).value;
        }
    }
    return 4.0 * pi * total;
}

/// The spread family of the smallness diagnostic: unit total mass distributed
/// equally over every cap of generations 0..N (a radial step function), with
/// per-cap mass eps_N = (2^{N+1} - 1)^{-1/2}.
inline TrialFunction spread_family(int N) {
    if (N < 0) throw std::domain_error("spread_family: N >= 0");
    const double eps = 1.0 / std::sqrt(std::ldexp(1.0, N + 1) - 1.0);
    strichartz::AnnularSteps steps;
    steps.v.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
        const double cap_m = geometry::cap_measure(CapId2{n, 0});
        steps.v[n] = eps / std::sqrt(cap_m);
    }
    TrialFunction f;
    f.d = 2;
    f.rep = std::move(steps);
    return f;
}

// ---- special-cap recentering ------------------------------------------------

struct RecenterResult {
    geometry::Isometry iso;
    TrialFunction recentered;
    double mass = 0.0;  // L^2 mass carried by the recentered cap / region
    bool meets_threshold = false;
};

/// Normalizes f, finds its heaviest cap, and recenters it: d=1 boosts the
/// argmax cap onto C_0 (mass preserved exactly); d=2 applies the Lemma-2.2
/// map, after which the cap's full mass sits inside {|xi| <= 2 sqrt(2) pi}.
inline RecenterResult special_cap_recenter(const TrialFunction& f_in, double eta,
                                           const QuadConfig& cfg = {}) {
    TrialFunction f = f_in;
    const double nrm = strichartz::l2_norm(f, cfg);
    if (nrm <= 0.0) throw std::domain_error("special_cap_recenter: zero density");
    if (std::fabs(nrm - 1.0) > 1e-9) f.scale /= nrm;  // normalize with a warning upstream

    CapDecomposition dec = decompose(f, cfg);
    CapSupMass top = cap_sup_mass(dec);

    RecenterResult res;
    res.mass = top.mass;
    res.meets_threshold = top.mass >= eta;
    res.recentered = f;
    if (f.d == 1) {
        res.iso = geometry::recenter_cap(top.cap1);
        res.recentered.boost_u += static_cast<double>(top.cap1.k);
    } else {
        res.iso = geometry::recenter_cap(top.cap2);
        res.recentered.pre_iso = res.iso.inverse();
    }
    return res;
}

}  // namespace hyperlab::capanalysis
