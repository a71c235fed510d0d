#include "cbt/brownian.hpp"

#include <cmath>

#include "cbt/errors.hpp"

namespace cbt {

namespace {

using LD = long double;
using CLD = std::complex<long double>;

struct Roots4 {
    LD t1 = 0, t2 = 0, t3 = 0, t4 = 0; // idle grow/decay, emitting grow/decay
};

Roots4 roots_at(const FlatModel& m, LD rate) {
    const LD s2 = static_cast<LD>(m.sigma) * m.sigma;
    const LD mu = m.mu;
    const LD me = mu - m.l_max;
    const LD d1 = sqrtl(mu * mu + 2 * s2 * rate);
    const LD d2 = sqrtl(me * me + 2 * s2 * rate);
    return {(-mu + d1) / s2, (mu + d1) / s2, (-me + d2) / s2, (me + d2) / s2};
}

// Matched exponential coefficients of the fixed-threshold value under plain
// discounting.  Shifted amplitudes (M1E1 = M1 e^{t1 b}, M4E4 = M4 e^{-t4 b})
// keep every stored quantity bounded for large thresholds.
struct ExpParts {
    Roots4 r;
    LD b = 0;
    LD M1 = 0, M2 = 0, M3 = 0, M1E1 = 0, M4E4 = 0, M4 = 0, M5 = 0;
};

ExpParts exp_parts(const FlatModel& m, LD b) {
    ExpParts P;
    P.b = b;
    P.r = roots_at(m, static_cast<LD>(m.delta));
    const LD s2 = static_cast<LD>(m.sigma) * m.sigma;
    const LD t1 = P.r.t1, t2 = P.r.t2, t4 = P.r.t4;
    const LD far = static_cast<LD>(m.q()) / m.delta;
    P.M3 = 2 * static_cast<LD>(m.Lambda) / (s2 * t1 * t2);
    P.M5 = far;
    if (b <= 0) {
        P.M4E4 = -far;
        P.M4 = -far;
        return P;
    }
    const LD E2 = expl(-t2 * b);
    const LD den = (t1 + t4) + (t2 - t4) * expl(-(t1 + t2) * b);
    P.M1E1 = (P.M3 * (t4 - t2) * E2 + t4 * (far - P.M3)) / den;
    P.M1 = P.M1E1 * expl(-t1 * b);
    P.M2 = -P.M1 - P.M3;
    P.M4E4 = P.M1E1 + P.M2 * E2 + P.M3 - far;
    P.M4 = P.M4E4 * expl(t4 * b);
    return P;
}

LD exp_value_at(const ExpParts& P, LD x) {
    if (x <= 0) return 0;
    if (x < P.b) return P.M1E1 * expl(P.r.t1 * (x - P.b)) + P.M2 * expl(-P.r.t2 * x) + P.M3;
    return P.M4E4 * expl(-P.r.t4 * (x - P.b)) + P.M5;
}

LD exp_slope_at(const ExpParts& P, LD x) {
    if (x < P.b)
        return P.r.t1 * P.M1E1 * expl(P.r.t1 * (x - P.b)) - P.r.t2 * P.M2 * expl(-P.r.t2 * x);
    return -P.r.t4 * P.M4E4 * expl(-P.r.t4 * (x - P.b));
}

// Biased-agent closed pieces.  The pre-switch operator runs at rate
// lambda+delta; the particular solutions absorb both the flow payoff and the
// continuation-value source term.
struct QhCtx {
    FlatModel m;
    ExpParts E;   // continuation coefficients at rate delta
    Roots4 rq;    // roots at rate lambda+delta
    LD c3 = 0, c5 = 0, s2 = 0;
};

QhCtx qh_ctx(const FlatModel& m, LD b) {
    QhCtx C;
    C.m = m;
    C.E = exp_parts(m, b);
    C.rq = roots_at(m, static_cast<LD>(m.lambda) + m.delta);
    C.s2 = static_cast<LD>(m.sigma) * m.sigma;
    const LD la = static_cast<LD>(m.lambda) * m.alpha;
    C.c3 = 2 * la / (C.s2 * (C.rq.t1 + C.rq.t2));
    C.c5 = 2 * la / (C.s2 * (C.rq.t3 + C.rq.t4));
    return C;
}

LD P3(const QhCtx& C, LD x) {
    const LD Lam = C.m.Lambda, la = static_cast<LD>(C.m.lambda) * C.m.alpha;
    const LD u1 = C.rq.t1, u2 = C.rq.t2;
    const LD h1 = C.E.r.t1, h2 = C.E.r.t2;
    const LD M1 = C.E.M1, M2 = C.E.M2, M3 = C.E.M3;
    LD t = -2 * Lam / C.s2 * (expl(u1 * x) - 1) / (u1 * (u1 + u2)) +
           2 * Lam / C.s2 * (1 - expl(-u2 * x)) / (u2 * (u1 + u2)) + 2 * la / (C.s2 * u1 * u2) * M3;
    t += -C.c3 * ((M1 / (u1 - h1) + M2 / (u1 + h2) + M3 / u1) * expl(u1 * x) +
                  (M1 / (h1 + u2) + M2 / (u2 - h2) + M3 / u2) * expl(-u2 * x));
    t += C.c3 * ((M1 / (u1 - h1) + M1 / (h1 + u2)) * expl(h1 * x) +
                 (M2 / (u1 + h2) + M2 / (u2 - h2)) * expl(-h2 * x));
    return t;
}

LD P3p(const QhCtx& C, LD x) {
    const LD Lam = C.m.Lambda;
    const LD u1 = C.rq.t1, u2 = C.rq.t2;
    const LD h1 = C.E.r.t1, h2 = C.E.r.t2;
    const LD M1 = C.E.M1, M2 = C.E.M2, M3 = C.E.M3;
    LD t = 2 * Lam / (C.s2 * (u1 + u2)) * (-expl(u1 * x) + expl(-u2 * x));
    t += -C.c3 * (u1 * M1 / (u1 - h1) + u1 * M2 / (u1 + h2) + M3) * expl(u1 * x);
    t += C.c3 * (u2 * M1 / (h1 + u2) + u2 * M2 / (u2 - h2) + M3) * expl(-u2 * x);
    t += C.c3 * ((M1 / (u1 - h1) + M1 / (h1 + u2)) * h1 * expl(h1 * x) -
                 (M2 / (u1 + h2) + M2 / (u2 - h2)) * h2 * expl(-h2 * x));
    return t;
}

LD P5(const QhCtx& C, LD x) {
    const LD q = C.m.q(), la = static_cast<LD>(C.m.lambda) * C.m.alpha;
    const LD u3 = C.rq.t3, u4 = C.rq.t4;
    const LD h4 = C.E.r.t4;
    const LD M4 = C.E.M4, M5 = C.E.M5;
    LD t = 2 * q / C.s2 / (u3 * (u3 + u4)) + 2 * q / C.s2 * (1 - expl(-u4 * x)) / (u4 * (u3 + u4)) +
           2 * la / (C.s2 * u3 * u4) * M5;
    t += -C.c5 * (M4 / (u4 - h4) + M5 / u4) * expl(-u4 * x);
    t += C.c5 * (M4 / (u3 + h4) + M4 / (u4 - h4)) * expl(-h4 * x);
    return t;
}

LD P5p(const QhCtx& C, LD x) {
    const LD q = C.m.q();
    const LD u3 = C.rq.t3, u4 = C.rq.t4;
    const LD h4 = C.E.r.t4;
    const LD M4 = C.E.M4, M5 = C.E.M5;
    LD t = 2 * q / (C.s2 * (u3 + u4)) * expl(-u4 * x);
    t += C.c5 * (u4 * M4 / (u4 - h4) + M5) * expl(-u4 * x);
    t += -C.c5 * (M4 / (u3 + h4) + M4 / (u4 - h4)) * h4 * expl(-h4 * x);
    return t;
}

// Interior amplitude and interface amplitude of the biased value.
struct QhMatch {
    LD N1 = 0;     // coefficient on (e^{u1 x} - e^{-u2 x})
    LD N4E4 = 0;   // exterior amplitude at the threshold: N4 e^{-u4 b}
    LD hbar = 0;   // matched slope at the threshold
};

QhMatch qh_match(const QhCtx& C, LD b) {
    QhMatch M;
    const LD u1 = C.rq.t1, u2 = C.rq.t2, u4 = C.rq.t4;
    if (b <= 0) {
        M.N4E4 = -P5(C, 0);
        M.hbar = NAN;
        return M;
    }
    const LD E1 = expl(u1 * b), E2 = expl(-u2 * b);
    const LD num = u4 * (P5(C, b) - P3(C, b)) + P5p(C, b) - P3p(C, b);
    const LD den = (u1 + u4) * E1 + (u2 - u4) * E2;
    M.N1 = num / den;
    M.N4E4 = M.N1 * (E1 - E2) + P3(C, b) - P5(C, b);
    M.hbar = -u4 * M.N4E4 + P5p(C, b);
    return M;
}

LD qh_value_at(const QhCtx& C, const QhMatch& M, LD b, LD x) {
    if (x <= 0) return 0;
    if (x < b) return M.N1 * (expl(C.rq.t1 * x) - expl(-C.rq.t2 * x)) + P3(C, x);
    return M.N4E4 * expl(-C.rq.t4 * (x - b)) + P5(C, x);
}

LD qh_slope_at(const QhCtx& C, const QhMatch& M, LD b, LD x) {
    if (x < b)
        return M.N1 * (C.rq.t1 * expl(C.rq.t1 * x) + C.rq.t2 * expl(-C.rq.t2 * x)) + P3p(C, x);
    return -C.rq.t4 * M.N4E4 * expl(-C.rq.t4 * (x - b)) + P5p(C, x);
}

} // namespace

FlatModel FlatModel::from(const Scenario& s) {
    if (s.kind != ModelKind::Constant)
        throw config_error("InvariantViolation: closed-form reference requires constant coefficients");
    FlatModel m;
    m.mu = s.mu_bar - s.l_base;
    m.sigma = s.sigma_const;
    m.delta = s.delta;
    m.l_max = s.l_max;
    m.margin = s.margin();
    m.Lambda = s.Lambda();
    m.lambda = s.lambda;
    m.alpha = s.alpha;
    return m;
}

RootPair char_roots(double drift, double sigma, double rate) {
    const LD s2 = static_cast<LD>(sigma) * sigma;
    const LD d = sqrtl(static_cast<LD>(drift) * drift + 2 * s2 * rate);
    return {static_cast<double>((-drift + d) / s2), static_cast<double>((drift + d) / s2)};
}

double flat_value(const FlatModel& m, double b, double x) {
    return static_cast<double>(exp_value_at(exp_parts(m, b), x));
}

double flat_slope(const FlatModel& m, double b, double x) {
    return static_cast<double>(exp_slope_at(exp_parts(m, b), x));
}

double flat_marginal(const FlatModel& m, double b) {
    const ExpParts P = exp_parts(m, b);
    return static_cast<double>(-P.r.t4 * P.M4E4);
}

double flat_threshold(const FlatModel& m) {
    auto f = [&](LD b) { const ExpParts P = exp_parts(m, b); return -P.r.t4 * P.M4E4 - m.margin; };
    if (f(1e-4L) <= 0) return 0.0;
    LD prev = 1e-4L;
    for (LD b = 1e-3L; b <= 300.0L; b += 1e-3L) {
        if (f(b) <= 0) {
            LD lo = prev, hi = b;
            for (int i = 0; i < 80; ++i) {
                const LD mid = 0.5L * (lo + hi);
                (f(mid) > 0 ? lo : hi) = mid;
            }
            return static_cast<double>(0.5L * (lo + hi));
        }
        prev = b;
    }
    throw numerics_error("NoCrossingWithinBound: closed-form threshold scan found no crossing");
}

double flat_value_biased(const FlatModel& m, double b, double x) {
    if (!m.biased()) return flat_value(m, b, x);
    const QhCtx C = qh_ctx(m, b);
    return static_cast<double>(qh_value_at(C, qh_match(C, b), b, x));
}

double flat_slope_biased(const FlatModel& m, double b, double x) {
    if (!m.biased()) return flat_slope(m, b, x);
    const QhCtx C = qh_ctx(m, b);
    return static_cast<double>(qh_slope_at(C, qh_match(C, b), b, x));
}

double flat_marginal_biased(const FlatModel& m, double b) {
    if (!m.biased()) return flat_marginal(m, b);
    const QhCtx C = qh_ctx(m, b);
    return static_cast<double>(qh_match(C, b).hbar);
}

FlatScan flat_threshold_biased(const FlatModel& m) {
    FlatScan out;
    if (!m.biased()) {
        out.b_star = flat_threshold(m);
        out.crossings = {out.b_star};
        return out;
    }
    const double cap = flat_threshold(m) + 0.01;
    auto f = [&](LD b) {
        const QhCtx C = qh_ctx(m, b);
        return qh_match(C, b).hbar - m.margin;
    };
    LD prev_b = 5e-5L;
    LD prev_f = f(prev_b);
    const bool starts_below = prev_f <= 0;
    double first_down = NAN;
    for (LD b = 5e-4L; b <= cap; b += 5e-4L) {
        const LD fb = f(b);
        if ((prev_f > 0) != (fb > 0)) {
            LD lo = prev_b, hi = b;
            const bool down = prev_f > 0;
            for (int i = 0; i < 60; ++i) {
                const LD mid = 0.5L * (lo + hi);
                ((f(mid) > 0) == down ? lo : hi) = mid;
            }
            const double root = static_cast<double>(0.5L * (lo + hi));
            out.crossings.push_back(root);
            if (down && std::isnan(first_down)) first_down = root;
        }
        prev_b = b;
        prev_f = fb;
    }
    if (starts_below) out.b_star = 0.0;
    else if (!std::isnan(first_down)) out.b_star = first_down;
    else throw numerics_error("NoCrossing: closed-form biased threshold scan found no crossing");
    return out;
}

std::complex<double> flat_transform(const FlatModel& m, double b, double x, std::complex<double> s) {
    const CLD sc(static_cast<LD>(s.real()), static_cast<LD>(s.imag()));
    const LD s2 = static_cast<LD>(m.sigma) * m.sigma;
    const LD mu = m.mu, me = mu - m.l_max;
    const CLD d1 = sqrt(CLD(mu * mu) + 2 * s2 * sc);
    const CLD r1 = (-mu + d1) / s2, r2 = (mu + d1) / s2;
    const CLD d4 = sqrt(CLD(me * me) + 2 * s2 * sc);
    const CLD r4 = (me + d4) / s2;
    if (x <= 0) return {1.0, 0.0};
    if (b <= 0) {
        const CLD v = exp(-r4 * CLD(x));
        return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }
    const CLD E1i = exp(-r1 * CLD(b)), E2 = exp(-r2 * CLD(b));
    const CLD det = E1i * (r4 - r2) * E2 - (r1 + r4);
    if (det == CLD(0))
        throw numerics_error("SingularSystem: transform matching degenerate");
    const CLD a1 = (r4 - r2) * E2 / det;
    const CLD a2 = -(r1 + r4) / det;
    CLD v;
    if (x < b) {
        v = a1 * exp(r1 * CLD(x - b)) + a2 * exp(-r2 * CLD(x));
    } else {
        const CLD Lb = a1 + a2 * E2;
        v = Lb * exp(-r4 * CLD(x - b));
    }
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

} // namespace cbt
