#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hyperlab {

/// Monotone cubic Hermite interpolation (Fritsch-Carlson slopes). Preserves
/// monotonicity of the data between nodes, which keeps cached measure
/// profiles free of interpolation overshoot.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 matching nodes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("MonotoneCubic: nodes must be strictly increasing");

        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // Clamp endpoint slopes so the end intervals stay monotone.
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            const double di = d[std::min(i, n - 2)];
            if (di == 0.0)
                m_[i] = 0.0;
            else if (m_[i] / di > 3.0)
                m_[i] = 3.0 * di;
            else if (m_[i] / di < 0.0)
                m_[i] = 0.0;
        }
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;
};

}  // namespace hyperlab
