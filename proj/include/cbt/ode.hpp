#pragma once

#include <complex>
#include <functional>

#include "cbt/grid_fn.hpp"

namespace cbt {

using RealFn = std::function<double(double)>;

// Direct solve of a tridiagonal linear system using Gaussian elimination with
// partial pivoting restricted to adjacent rows (the only rows sharing a
// column in a tridiagonal matrix).  Row swaps introduce a second
// superdiagonal, handled explicitly.  lo[0] and up[n-1] are ignored.
template <class T>
std::vector<T> solve_tridiagonal(std::vector<T> lo, std::vector<T> di, std::vector<T> up,
                                 std::vector<T> rhs) {
    const std::size_t n = di.size();
    if (n < 2 || lo.size() != n || up.size() != n || rhs.size() != n)
        throw numerics_error("SingularSystem: malformed tridiagonal system");
    std::vector<T> up2(n, T{});
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(lo[i + 1]) > std::abs(di[i])) {
            // Swap rows i and i+1, then eliminate.
            const T d0 = di[i], u0 = up[i], w0 = up2[i], b0 = rhs[i];
            di[i] = lo[i + 1];
            up[i] = di[i + 1];
            up2[i] = up[i + 1];
            rhs[i] = rhs[i + 1];
            const T fact = d0 / di[i];
            di[i + 1] = u0 - fact * up[i];
            up[i + 1] = w0 - fact * up2[i];
            rhs[i + 1] = b0 - fact * rhs[i];
        } else {
            if (di[i] == T{}) throw numerics_error("SingularSystem: zero pivot in tridiagonal solve");
            const T fact = lo[i + 1] / di[i];
            di[i + 1] -= fact * up[i];
            up[i + 1] -= fact * up2[i];
            rhs[i + 1] -= fact * rhs[i];
        }
    }
    if (std::abs(di[n - 1]) == 0.0)
        throw numerics_error("SingularSystem: zero pivot in tridiagonal solve");
    std::vector<T> x(n);
    x[n - 1] = rhs[n - 1] / di[n - 1];
    if (n >= 2) x[n - 2] = (rhs[n - 2] - up[n - 2] * x[n - 1]) / di[n - 2];
    for (std::size_t k = n - 1; k-- > 1;) {
        const std::size_t i = k - 1;
        x[i] = (rhs[i] - up[i] * x[i + 1] - up2[i] * x[i + 2]) / di[i];
    }
    return x;
}

// One central-difference Dirichlet solve of
//     a(x) g'' + drift(x) g' - rate * g + src(x) = 0
// on n equal steps over [x_lo, x_hi].  Second-order accurate.
template <class T>
std::vector<T> bvp_pass(const RealFn& a, const RealFn& drift, T rate,
                        const std::function<T(double)>& src, double x_lo, double x_hi, long n,
                        T left, T right) {
    if (n < 2) throw numerics_error("SingularSystem: boundary value solve needs at least 2 steps");
    const double h = (x_hi - x_lo) / static_cast<double>(n);
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    std::vector<T> lo(m, T{}), di(m, T{}), up(m, T{}), rhs(m, T{});
    di[0] = T{1};
    rhs[0] = left;
    di[m - 1] = T{1};
    rhs[m - 1] = right;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double x = x_lo + static_cast<double>(i) * h;
        const double A = a(x), D = drift(x);
        if (!std::isfinite(A) || !std::isfinite(D))
            throw numerics_error("NonfiniteCoefficient: operator coefficients at x = " + std::to_string(x));
        lo[i] = T{A / (h * h) - D / (2.0 * h)};
        di[i] = T{-2.0 * A / (h * h)} - rate;
        up[i] = T{A / (h * h) + D / (2.0 * h)};
        rhs[i] = -src(x);
    }
    return solve_tridiagonal(std::move(lo), std::move(di), std::move(up), std::move(rhs));
}

// Central differences with one Richardson halving: (4 g_{h/2} - g_h) / 3 at
// the shared nodes, giving fourth-order nodal values.
template <class T>
std::vector<T> bvp_solve(const RealFn& a, const RealFn& drift, T rate,
                         const std::function<T(double)>& src, double x_lo, double x_hi, long n,
                         T left, T right) {
    auto g1 = bvp_pass(a, drift, rate, src, x_lo, x_hi, n, left, right);
    auto g2 = bvp_pass(a, drift, rate, src, x_lo, x_hi, 2 * n, left, right);
    std::vector<T> out(g1.size());
    for (std::size_t i = 0; i < g1.size(); ++i) out[i] = (4.0 * g2[2 * i] - g1[i]) / 3.0;
    return out;
}

// Real-valued convenience wrapper returning a C1-evaluable table.
SampledFn bvp_sampled(const RealFn& a, const RealFn& drift, double rate, const RealFn& src,
                      double x_lo, double x_hi, long n, double left, double right);

// Classical fixed-step fourth-order integration of the same operator as an
// initial value problem in (g, g'), recording both at the grid nodes.
// substeps subdivides each grid step; it is raised by the caller when the
// residual check demands it.
SampledFn ivp_solve(const RealFn& a, const RealFn& drift, double rate, const RealFn& src,
                    double x_lo, double x_hi, long n, double g0, double dg0, int substeps = 1);

struct ResidualReport {
    double max_residual = 0.0; // worst nodal defect of the discrete operator
    double scale = 0.0;        // worst nodal magnitude sum of the operator terms
};

// Evaluates the differential operator on interior nodes (offset two from each
// end) with fourth-order stencils.  The caller compares max_residual against
// a relative tolerance times scale.
ResidualReport residual_check(const RealFn& a, const RealFn& drift, double rate, const RealFn& src,
                              double x_lo, double h, const std::vector<double>& g);

} // namespace cbt
