#include "cbt/qh_solver.hpp"

namespace cbt {

namespace {
constexpr double kTolFlat = 1e-4;
constexpr double kBisectWidth = 1e-6;
constexpr double kScanStep = 0.02;
} // namespace

QhSolver::QhSolver(const ExpSolver& ex) : ex_(ex) {
    const Scenario& s = ex_.scenario();
    rate_ = s.lambda + s.delta;
    if (!s.biased()) return; // degenerate parameters fall back to the plain solver

    const RealFn a = [&s](double x) { return 0.5 * s.sigma(x) * s.sigma(x); };
    const RealFn drift = [&s](double x) { return s.drift_emit(x); };
    v3b_ = bvp_sampled(a, drift, rate_, [](double) { return 0.0; }, 0.0, ex_.grid_x_max(),
                       ex_.grid_n(), 1.0, 0.0);
    if (std::abs(v3b_.d.back()) > kTolFlat)
        throw numerics_error("TruncationTooSmall: pre-switch outer decay not flat at x_max");
}

double QhSolver::far_value() const {
    const Scenario& s = ex_.scenario();
    return (s.lambda * s.alpha + s.delta) / (s.lambda + s.delta) * ex_.far_value();
}

QhSolver::Parts QhSolver::parts(double b) const {
    const Scenario& s = ex_.scenario();
    if (b < 0.0 || b > ex_.grid_x_max())
        throw numerics_error("OutOfDomain: threshold " + std::to_string(b) + " outside [0, x_max]");

    const RealFn a = [&s](double x) { return 0.5 * s.sigma(x) * s.sigma(x); };
    const RealFn drift_out = [&s](double x) { return s.drift_emit(x); };
    const RealFn drift_in = [&s](double x) { return s.drift_idle(x); };
    const double la = s.lambda * s.alpha;
    const double q = s.q(), Lam = s.Lambda();

    // Post-switch continuation for the same threshold, sampled on the shared
    // grid for the outer solve and kept piecewise for the inner solve.
    const ThresholdValue cont = ex_.value(b);
    const std::vector<double> cont_nodes = cont.sample_shared();
    const double h = ex_.grid_h();

    auto src_out = [&](double x) { return q + la * interp_uniform(0.0, h, cont_nodes, x); };
    auto src_in = [&](double x) { return Lam + la * cont.value(x); };

    Parts pt;
    auto ub_v = bvp_solve<double>(a, drift_out, rate_, src_out, 0.0, ex_.grid_x_max(), ex_.grid_n(),
                                  0.0, far_value());
    pt.ub = make_sampled(0.0, h, std::move(ub_v));
    if (!(b > 0.0)) {
        // Threshold at the origin: emitting everywhere, value matching at 0
        // forces the coefficient on the decaying solution to vanish.
        pt.C3 = 0.0;
        pt.Vb = 0.0;
        pt.hbar = NAN;
        return pt;
    }

    const long nb = std::max<long>(6, std::lround(b / h));
    const double hb = b / static_cast<double>(nb);
    auto phi_v = bvp_solve<double>(a, drift_in, rate_, [](double) { return 0.0; }, 0.0, b, nb, 0.0, 1.0);
    auto p_v = bvp_solve<double>(a, drift_in, rate_, src_in, 0.0, b, nb, 0.0, 0.0);

    const double phip_b = end_slope(phi_v, hb), pp_b = end_slope(p_v, hb);
    const double v3b = v3b_.value(b), v3pb = v3b_.slope(b);
    const double ubb = pt.ub.value(b), upb = pt.ub.slope(b);

    const double den = v3b * phip_b - v3pb;
    if (den == 0.0 || !std::isfinite(den))
        throw numerics_error("SingularSystem: threshold matching degenerate at b = " + std::to_string(b));
    pt.C3 = (upb - pp_b - ubb * phip_b) / den;
    pt.Vb = pt.C3 * v3b + ubb;
    pt.hbar = pt.C3 * v3pb + upb;
    pt.phi = make_sampled(0.0, hb, std::move(phi_v));
    pt.p = make_sampled(0.0, hb, std::move(p_v));
    return pt;
}

double QhSolver::marginal_value(double b) const {
    const Scenario& s = ex_.scenario();
    if (!s.biased()) return ex_.marginal_value(b);
    if (!(b > 0.0))
        throw numerics_error("OutOfDomain: matched slope is defined for positive thresholds only");
    return parts(b).hbar;
}

ThresholdValue QhSolver::value(double b) const {
    const Scenario& s = ex_.scenario();
    if (!s.biased()) return ex_.value(b);
    Parts pt = parts(b);
    if (!(b > 0.0)) {
        SampledFn outer = pt.ub;
        return ThresholdValue(0.0, 0.0, 0.0, SampledFn{}, std::move(outer), far_value());
    }
    std::vector<double> outer_v(v3b_.v.size()), outer_d(v3b_.v.size());
    for (std::size_t i = 0; i < outer_v.size(); ++i) {
        outer_v[i] = pt.C3 * v3b_.v[i] + pt.ub.v[i];
        outer_d[i] = pt.C3 * v3b_.d[i] + pt.ub.d[i];
    }
    SampledFn outer{0.0, ex_.grid_h(), std::move(outer_v), std::move(outer_d)};
    std::vector<double> inner_v(pt.phi.v.size());
    for (std::size_t i = 0; i < inner_v.size(); ++i) inner_v[i] = pt.Vb * pt.phi.v[i] + pt.p.v[i];
    SampledFn inner = make_sampled(0.0, pt.phi.h, std::move(inner_v));
    return ThresholdValue(b, pt.Vb, pt.C3, std::move(inner), std::move(outer), far_value());
}

const ThresholdScan& QhSolver::threshold() const {
    if (scanned_) return scan_;
    const Scenario& s = ex_.scenario();
    if (!s.biased()) {
        scan_.b_star = ex_.threshold();
        scan_.crossings = {scan_.b_star};
        scan_.from_exp = true;
        scanned_ = true;
        return scan_;
    }
    const double m = s.margin();
    const double cap = std::min(ex_.threshold() + 10.0 * kScanStep, ex_.search_cap());
    auto f = [&](double b) { return marginal_value(b) - m; };

    double prev_b = kScanStep / 10.0;
    double prev_f = f(prev_b);
    bool starts_below = prev_f <= 0.0;
    double first_down = NAN;
    for (long k = 1;; ++k) {
        const double b = static_cast<double>(k) * kScanStep;
        if (b > cap) break;
        const double fb = f(b);
        if ((prev_f > 0.0) != (fb > 0.0)) {
            double lo = prev_b, hi = b;
            const bool down = prev_f > 0.0;
            while (hi - lo > kBisectWidth) {
                const double mid = 0.5 * (lo + hi);
                ((f(mid) > 0.0) == down ? lo : hi) = mid;
            }
            const double root = 0.5 * (lo + hi);
            scan_.crossings.push_back(root);
            if (down && std::isnan(first_down)) first_down = root;
        }
        prev_b = b;
        prev_f = fb;
    }
    if (starts_below) {
        scan_.b_star = 0.0;
    } else if (!std::isnan(first_down)) {
        scan_.b_star = first_down;
    } else {
        throw numerics_error("NoCrossing: threshold condition has no sign change below b = " +
                            std::to_string(cap));
    }
    scanned_ = true;
    return scan_;
}

} // namespace cbt
