#pragma once

#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace hyperlab {

struct QuadConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;
    double tail_cut = 40.0;

    void validate() const {
        if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadConfig: rel_tol must be > 0");
        if (!(abs_tol >= 0.0)) throw std::invalid_argument("QuadConfig: abs_tol must be >= 0");
        if (max_subdivisions < 1) throw std::invalid_argument("QuadConfig: max_subdivisions must be >= 1");
        if (!(tail_cut > 0.0)) throw std::invalid_argument("QuadConfig: tail_cut must be > 0");
    }
};

/// Thrown when adaptive quadrature exhausts its subdivision budget; carries the
/// best estimate accumulated so far.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_(best), err_(err) {}
    double best_estimate() const { return best_; }
    double error_estimate() const { return err_; }

private:
    double best_;
    double err_;
};

template <class T>
struct BasicQuadResult {
    T value{};
    double error = 0.0;
    int subdivisions = 0;
    bool converged = true;
};

using QuadResult = BasicQuadResult<double>;
using ComplexQuadResult = BasicQuadResult<std::complex<double>>;

namespace quad_detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (QUADPACK values).
inline constexpr double kGkNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights; nonzero at node indices 1,3,5,7.
inline constexpr double kGaussW[8] = {
    0.0, 0.129484966168870, 0.0, 0.279705391489277,
    0.0, 0.381830050505119, 0.0, 0.417959183673469};

inline double absval(double x) { return std::fabs(x); }
inline double absval(const std::complex<double>& z) { return std::abs(z); }

template <class T, class F>
void gk15(F& f, double a, double b, T& value, double& error) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    T fc = f(mid);
    T k15 = kKronrodW[7] * fc;
    T g7 = kGaussW[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = hw * kGkNodes[i];
        T pair = f(mid + dx) + f(mid - dx);
        k15 += kKronrodW[i] * pair;
        g7 += kGaussW[i] * pair;
    }
    value = hw * k15;
    const double diff = hw * absval(k15 - g7);
    // QUADPACK-style sharpening of the raw Gauss/Kronrod difference.
    const double sharp = std::pow(200.0 * diff, 1.5);
    error = (sharp < diff) ? sharp : diff;
}

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    unsigned long order;  // insertion order, makes the heap deterministic
};

template <class T>
struct SegmentWorse {
    bool operator()(const Segment<T>& x, const Segment<T>& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.order > y.order;
    }
};

template <class F>
auto integrate_core(F&& f, double a, double b, const QuadConfig& cfg)
    -> BasicQuadResult<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    cfg.validate();
    BasicQuadResult<T> res;
    if (a == b) return res;

    std::priority_queue<Segment<T>, std::vector<Segment<T>>, SegmentWorse<T>> heap;
    unsigned long order = 0;

    T v{};
    double e = 0.0;
    gk15(f, a, b, v, e);
    heap.push({a, b, v, e, order++});
    T total = v;
    double total_err = e;
    int splits = 0;

    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * absval(total)) &&
           splits < cfg.max_subdivisions) {
        Segment<T> worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) {  // interval at machine resolution
            heap.push(worst);
            break;
        }
        T vl{}, vr{};
        double el = 0.0, er = 0.0;
        gk15(f, worst.a, m, vl, el);
        gk15(f, m, worst.b, vr, er);
        total += (vl + vr) - worst.value;
        total_err += (el + er) - worst.error;
        heap.push({worst.a, m, vl, el, order++});
        heap.push({m, worst.b, vr, er, order++});
        ++splits;
    }

    // Re-sum segment contributions for a deterministic, cancellation-free total.
    std::vector<Segment<T>> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    T sum{};
    double err_sum = 0.0;
    for (const auto& s : segs) {
        sum += s.value;
        err_sum += s.error;
    }
    res.value = sum;
    res.error = err_sum;
    res.subdivisions = splits;
    res.converged =
        err_sum <= std::max(cfg.abs_tol, cfg.rel_tol * absval(sum)) || err_sum == 0.0;
    return res;
}

}  // namespace quad_detail

/// Adaptive Gauss-Kronrod integration of a real-valued integrand. Throws
/// AccuracyError when the subdivision budget runs out before the tolerances
/// are met.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadConfig& cfg = {}) {
    QuadResult r = quad_detail::integrate_core(std::forward<F>(f), a, b, cfg);
    if (!r.converged)
        throw AccuracyError("adaptive quadrature did not converge", r.value, r.error);
    return r;
}

/// Non-throwing variant; callers inspect .converged.
template <class F>
auto integrate_nothrow(F&& f, double a, double b, const QuadConfig& cfg = {}) {
    return quad_detail::integrate_core(std::forward<F>(f), a, b, cfg);
}

template <class F>
ComplexQuadResult integrate_complex(F&& f, double a, double b, const QuadConfig& cfg = {}) {
    ComplexQuadResult r = quad_detail::integrate_core(std::forward<F>(f), a, b, cfg);
    if (!r.converged)
        throw AccuracyError("adaptive quadrature (complex) did not converge",
                            std::abs(r.value), r.error);
    return r;
}

}  // namespace hyperlab
