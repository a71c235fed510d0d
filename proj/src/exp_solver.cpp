#include "cbt/exp_solver.hpp"

namespace cbt {

namespace {

constexpr double kTolFlat = 1e-4;   // far-boundary flatness requirement
constexpr double kTolRes = 1e-8;    // relative nodal residual requirement
constexpr double kBisectWidth = 1e-6;

void require_residual(const RealFn& a, const RealFn& drift, double rate, const RealFn& src,
                      double x_lo, double h, const std::vector<double>& g, const char* label) {
    const ResidualReport rep = residual_check(a, drift, rate, src, x_lo, h, g);
    if (rep.max_residual > kTolRes * std::max(rep.scale, 1e-30))
        throw numerics_error(std::string("StiffnessFailure: nodal residual ") +
                             std::to_string(rep.max_residual) + " exceeds tolerance for " + label);
}

} // namespace

std::vector<double> ThresholdValue::sample_shared() const {
    std::vector<double> out(outer_.v.size());
    const double h = outer_.h;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = outer_.x_lo + static_cast<double>(i) * h;
        out[i] = (has_inner() && x < b_) ? inner_.value(x) : outer_.v[i];
    }
    return out;
}

ExpSolver::ExpSolver(const Scenario& s) : s_(s) {
    n_ = std::lround(s_.x_max / s_.h);
    if (n_ < 40) throw config_error("InvariantViolation: grid is too coarse (x_max/h < 40)");
    x_hi_ = static_cast<double>(n_) * s_.h;

    const RealFn a = [this](double x) { return 0.5 * s_.sigma(x) * s_.sigma(x); };
    const RealFn drift = [this](double x) { return s_.drift_emit(x); };
    const double q = s_.q(), far = q / s_.delta;

    v3_ = bvp_sampled(a, drift, s_.delta, [](double) { return 0.0; }, 0.0, x_hi_, n_, 1.0, 0.0);
    u_ = bvp_sampled(a, drift, s_.delta, [q](double) { return q; }, 0.0, x_hi_, n_, 0.0, far);

    require_residual(a, drift, s_.delta, [](double) { return 0.0; }, 0.0, s_.h, v3_.v, "outer decay");
    require_residual(a, drift, s_.delta, [q](double) { return q; }, 0.0, s_.h, u_.v, "outer forced");

    const double flat3 = std::abs(v3_.d.back());
    const double flatu = std::abs(u_.d.back()) / std::max(1.0, std::abs(far));
    if (flat3 > kTolFlat || flatu > kTolFlat)
        throw numerics_error("TruncationTooSmall: outer solutions not flat at x_max (slopes " +
                             std::to_string(flat3) + ", " + std::to_string(flatu) + ")");
}

ExpSolver::Pieces ExpSolver::pieces(double b) const {
    if (!(b > 0.0) || b > x_hi_)
        throw numerics_error("OutOfDomain: threshold " + std::to_string(b) + " outside (0, x_max]");
    const RealFn a = [this](double x) { return 0.5 * s_.sigma(x) * s_.sigma(x); };
    const RealFn drift = [this](double x) { return s_.drift_idle(x); };
    const double Lam = s_.Lambda();

    const long nb = std::max<long>(6, std::lround(b / s_.h));
    const double hb = b / static_cast<double>(nb);

    auto phi_v = bvp_solve<double>(a, drift, s_.delta, [](double) { return 0.0; }, 0.0, b, nb, 0.0, 1.0);
    auto p_v = bvp_solve<double>(a, drift, s_.delta, [Lam](double) { return Lam; }, 0.0, b, nb, 0.0, 0.0);
    require_residual(a, drift, s_.delta, [](double) { return 0.0; }, 0.0, hb, phi_v, "inner homogeneous");
    require_residual(a, drift, s_.delta, [Lam](double) { return Lam; }, 0.0, hb, p_v, "inner forced");

    Pieces pc;
    pc.b = b;
    const double phip_b = end_slope(phi_v, hb), pp_b = end_slope(p_v, hb);
    const double phip_0 = start_slope(phi_v, hb), pp_0 = start_slope(p_v, hb);
    const double v3b = v3_.value(b), v3pb = v3_.slope(b);
    const double ub = u_.value(b), upb = u_.slope(b);

    const double den = v3b * phip_b - v3pb;
    if (den == 0.0 || !std::isfinite(den))
        throw numerics_error("SingularSystem: threshold matching degenerate at b = " + std::to_string(b));
    pc.C3 = (upb - pp_b - ub * phip_b) / den;
    pc.Vb = pc.C3 * v3b + ub;
    pc.hE = pc.C3 * v3pb + upb;
    pc.dV0 = pc.Vb * phip_0 + pp_0;
    pc.phi = make_sampled(0.0, hb, std::move(phi_v));
    pc.p = make_sampled(0.0, hb, std::move(p_v));
    return pc;
}

double ExpSolver::marginal_value(double b) const { return pieces(b).hE; }

double ExpSolver::slope_at_zero(double b) const { return pieces(b).dV0; }

ThresholdValue ExpSolver::value(double b) const {
    std::vector<double> outer_v(v3_.v.size()), outer_d(v3_.v.size());
    if (!(b > 0.0)) {
        // Degenerate threshold: the emitting region covers everything and the
        // value is the forced outer solution alone.
        for (std::size_t i = 0; i < outer_v.size(); ++i) {
            outer_v[i] = u_.v[i];
            outer_d[i] = u_.d[i];
        }
        SampledFn outer{0.0, s_.h, std::move(outer_v), std::move(outer_d)};
        return ThresholdValue(0.0, 0.0, 0.0, SampledFn{}, std::move(outer), far_value());
    }
    Pieces pc = pieces(b);
    for (std::size_t i = 0; i < outer_v.size(); ++i) {
        outer_v[i] = pc.C3 * v3_.v[i] + u_.v[i];
        outer_d[i] = pc.C3 * v3_.d[i] + u_.d[i];
    }
    SampledFn outer{0.0, s_.h, std::move(outer_v), std::move(outer_d)};

    std::vector<double> inner_v(pc.phi.v.size());
    for (std::size_t i = 0; i < inner_v.size(); ++i) inner_v[i] = pc.Vb * pc.phi.v[i] + pc.p.v[i];
    SampledFn inner = make_sampled(0.0, pc.phi.h, std::move(inner_v));
    return ThresholdValue(b, pc.Vb, pc.C3, std::move(inner), std::move(outer), far_value());
}

double ExpSolver::search_cap() const {
    if (!std::isnan(cap_)) return cap_;
    const double hard = x_hi_ - 10.0;
    const double mu0 = s_.drift_idle(0.0);
    cap_is_fallback_ = true;
    cap_ = hard;
    if (mu0 < 0.0) {
        // Origin-slope bound: thresholds beyond the first b whose origin slope
        // exceeds -Lambda / mu(0) cannot satisfy the boundary payoff relation.
        const double lim = -s_.Lambda() / (2.0 * mu0);
        for (double b = 0.05; b <= hard; b += 0.05) {
            if (0.5 * slope_at_zero(b) > lim) {
                cap_ = b;
                cap_is_fallback_ = false;
                break;
            }
        }
    }
    return cap_;
}

double ExpSolver::threshold() const {
    if (!std::isnan(bstar_)) return bstar_;
    const double m = s_.margin();
    const double cap = search_cap();
    const double step = 0.01;

    auto f = [&](double b) { return marginal_value(b) - m; };

    double prev_b = step / 10.0;
    double prev_f = f(prev_b);
    if (prev_f <= 0.0) {
        bstar_ = 0.0;
        return bstar_;
    }
    for (long k = 1;; ++k) {
        const double b = static_cast<double>(k) * step;
        if (b > cap) break;
        const double fb = f(b);
        if (prev_f > 0.0 && fb <= 0.0) {
            double lo = prev_b, hi = b;
            while (hi - lo > kBisectWidth) {
                const double mid = 0.5 * (lo + hi);
                (f(mid) > 0.0 ? lo : hi) = mid;
            }
            bstar_ = 0.5 * (lo + hi);
            return bstar_;
        }
        prev_b = b;
        prev_f = fb;
    }
    if (cap_is_fallback_)
        throw numerics_error("TruncationTooSmall: no threshold crossing below the truncation-limited cap");
    throw numerics_error("NoCrossingWithinBound: matched slope never falls to the payoff margin below b = " +
                         std::to_string(cap));
}

} // namespace cbt
