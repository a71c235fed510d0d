#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cbt/errors.hpp"

namespace cbt {

// Fourth-order derivative samples of a uniformly spaced table (central stencil
// inside, one-sided five-point stencils at the ends).
template <class T>
std::vector<T> table_derivative(const std::vector<T>& f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw numerics_error("SingularSystem: derivative table needs at least 5 samples");
    std::vector<T> d(n);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    return d;
}

template <class T>
T start_slope(const std::vector<T>& f, double h) {
    return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
}

template <class T>
T end_slope(const std::vector<T>& f, double h) {
    const std::size_t n = f.size();
    return (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
}

// Local cubic Lagrange interpolation on a uniform table starting at x_lo.
// Exact at the nodes; fourth-order accurate between them.
template <class T>
T interp_uniform(double x_lo, double h, const std::vector<T>& f, double x) {
    const long n = static_cast<long>(f.size());
    long i = static_cast<long>(std::floor((x - x_lo) / h));
    if (i < 1) i = 1;
    if (i > n - 3) i = n - 3;
    const double t = (x - (x_lo + i * h)) / h;
    const T fm = f[i - 1], f0 = f[i], f1 = f[i + 1], f2 = f[i + 2];
    return fm * (-t * (t - 1.0) * (t - 2.0) / 6.0) + f0 * ((t * t - 1.0) * (t - 2.0) / 2.0) +
           f1 * (-t * (t + 1.0) * (t - 2.0) / 2.0) + f2 * (t * (t * t - 1.0) / 6.0);
}

// A scalar function sampled on a uniform grid together with derivative
// samples, supporting C1 off-grid evaluation by local cubic interpolation.
struct SampledFn {
    double x_lo = 0.0;
    double h = 0.0;
    std::vector<double> v;
    std::vector<double> d;

    double x_hi() const { return x_lo + h * (static_cast<double>(v.size()) - 1.0); }
    std::size_t size() const { return v.size(); }

    void check_domain(double x) const {
        if (x < x_lo - 1e-9 || x > x_hi() + 1e-9)
            throw numerics_error("OutOfDomain: x = " + std::to_string(x) + " outside [" +
                                 std::to_string(x_lo) + ", " + std::to_string(x_hi()) + "]");
    }
    double value(double x) const {
        check_domain(x);
        return interp_uniform(x_lo, h, v, x);
    }
    double slope(double x) const {
        check_domain(x);
        return interp_uniform(x_lo, h, d, x);
    }
};

// Builds the derivative table and wraps samples into a SampledFn.
SampledFn make_sampled(double x_lo, double h, std::vector<double> values);

} // namespace cbt
