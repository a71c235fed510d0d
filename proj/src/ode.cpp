#include "cbt/ode.hpp"

namespace cbt {

SampledFn bvp_sampled(const RealFn& a, const RealFn& drift, double rate, const RealFn& src,
                      double x_lo, double x_hi, long n, double left, double right) {
    auto v = bvp_solve<double>(a, drift, rate, src, x_lo, x_hi, n, left, right);
    return make_sampled(x_lo, (x_hi - x_lo) / static_cast<double>(n), std::move(v));
}

SampledFn ivp_solve(const RealFn& a, const RealFn& drift, double rate, const RealFn& src,
                    double x_lo, double x_hi, long n, double g0, double dg0, int substeps) {
    if (n < 4 || substeps < 1)
        throw numerics_error("SingularSystem: initial value solve needs n >= 4 and substeps >= 1");
    const double h = (x_hi - x_lo) / static_cast<double>(n);
    const double dt = h / static_cast<double>(substeps);
    if (std::abs(dt) < 1e-12)
        throw numerics_error("StiffnessFailure: step underflow in initial value solve");

    auto f2 = [&](double x, double g, double p) {
        const double A = a(x);
        if (A == 0.0) throw numerics_error("SingularSystem: vanishing diffusion coefficient");
        return (rate * g - src(x) - drift(x) * p) / A;
    };

    std::vector<double> gs(static_cast<std::size_t>(n) + 1), ps(gs.size());
    double g = g0, p = dg0, x = x_lo;
    gs[0] = g;
    ps[0] = p;
    for (long i = 1; i <= n; ++i) {
        for (int s = 0; s < substeps; ++s) {
            const double k1g = p, k1p = f2(x, g, p);
            const double k2g = p + 0.5 * dt * k1p, k2p = f2(x + 0.5 * dt, g + 0.5 * dt * k1g, p + 0.5 * dt * k1p);
            const double k3g = p + 0.5 * dt * k2p, k3p = f2(x + 0.5 * dt, g + 0.5 * dt * k2g, p + 0.5 * dt * k2p);
            const double k4g = p + dt * k3p, k4p = f2(x + dt, g + dt * k3g, p + dt * k3p);
            g += dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
            p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            x += dt;
        }
        x = x_lo + static_cast<double>(i) * h; // avoid drift in the abscissa
        if (!std::isfinite(g) || !std::isfinite(p) || std::abs(g) > 1e300)
            throw numerics_error("StiffnessFailure: forward integration overflowed near x = " +
                                 std::to_string(x));
        gs[static_cast<std::size_t>(i)] = g;
        ps[static_cast<std::size_t>(i)] = p;
    }
    SampledFn out;
    out.x_lo = x_lo;
    out.h = h;
    out.v = std::move(gs);
    out.d = std::move(ps);
    return out;
}

ResidualReport residual_check(const RealFn& a, const RealFn& drift, double rate, const RealFn& src,
                              double x_lo, double h, const std::vector<double>& g) {
    const std::size_t n = g.size();
    ResidualReport rep;
    if (n < 5) return rep;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double x = x_lo + static_cast<double>(i) * h;
        const double d1 = (g[i - 2] - 8.0 * g[i - 1] + 8.0 * g[i + 1] - g[i + 2]) / (12.0 * h);
        const double d2 =
            (-g[i - 2] + 16.0 * g[i - 1] - 30.0 * g[i] + 16.0 * g[i + 1] - g[i + 2]) / (12.0 * h * h);
        const double A = a(x), D = drift(x), F = src(x);
        const double res = A * d2 + D * d1 - rate * g[i] + F;
        const double sc = std::abs(A * d2) + std::abs(D * d1) + std::abs(rate * g[i]) + std::abs(F);
        rep.max_residual = std::max(rep.max_residual, std::abs(res));
        rep.scale = std::max(rep.scale, sc);
    }
    return rep;
}

} // namespace cbt
