#include "cbt/mc.hpp"

#include <cmath>

#include "cbt/concurrency.hpp"

namespace cbt {

namespace {

struct FlatCoefs {
    double mu_idle, mu_emit, sig;
    double drift(double, bool emit) const { return emit ? mu_emit : mu_idle; }
    double sigma(double) const { return sig; }
};

struct OuCoefs {
    double kappa, theta, l_idle, l_emit, s0, s1;
    double drift(double x, bool emit) const { return kappa * (theta - x) - (emit ? l_emit : l_idle); }
    double sigma(double x) const { return std::sqrt(s0 + s1 * x); }
};

struct GenCoefs {
    const Scenario* s;
    double drift(double x, bool emit) const { return emit ? s->drift_emit(x) : s->drift_idle(x); }
    double sigma(double x) const { return s->sigma(x); }
};

template <class Fn>
void with_coefs(const Scenario& s, Fn&& fn) {
    switch (s.kind) {
        case ModelKind::Constant:
            fn(FlatCoefs{s.drift_idle(0.0), s.drift_emit(0.0), s.sigma_const});
            return;
        case ModelKind::Ou:
            fn(OuCoefs{s.kappa, s.theta, s.l_base, s.l_base + s.l_max, s.sigma0, s.sigma1});
            return;
        case ModelKind::Tabulated:
            fn(GenCoefs{&s});
            return;
    }
}

double pairwise_block(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_block(v, half) + pairwise_block(v + half, n - half);
}

McEstimate reduce(const std::vector<double>& vals) {
    McEstimate e;
    e.n = static_cast<long>(vals.size());
    if (e.n == 0) return e;
    e.mean = pairwise_sum(vals) / static_cast<double>(e.n);
    if (e.n > 1) {
        std::vector<double> sq(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double d = vals[i] - e.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / static_cast<double>(e.n - 1);
        e.std_error = std::sqrt(var / static_cast<double>(e.n));
    }
    return e;
}

} // namespace

double pairwise_sum(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_block(v.data(), v.size());
}

std::uint64_t path_stream_key(std::uint64_t seed, std::uint64_t path_index) {
    SplitMix64 g(seed + 0x9E3779B97F4A7C15ULL * path_index);
    return g.next();
}

double GaussStream::next() {
    if (has_spare) {
        has_spare = false;
        return spare;
    }
    double u, v, r2;
    do {
        u = 2.0 * g.u01() - 1.0;
        v = 2.0 * g.u01() - 1.0;
        r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare = v * f;
    has_spare = true;
    return u * f;
}

McEstimate mc_depletion_probability(const Scenario& s, double b, double x0, double T,
                                    const McOptions& opt) {
    std::vector<double> vals(static_cast<std::size_t>(opt.paths));
    with_coefs(s, [&](auto C) {
        const double dt = opt.dt;
        const double sq = std::sqrt(dt);
        parallel_for(opt.paths, opt.threads, [&](long i) {
            GaussStream rng(path_stream_key(opt.seed, static_cast<std::uint64_t>(i)));
            double X = x0, t = 0.0, hit = (x0 <= 0.0) ? 1.0 : 0.0;
            while (hit == 0.0 && t < T) {
                double step = dt, sqs = sq;
                if (t + dt > T) {
                    step = T - t;
                    sqs = std::sqrt(step);
                }
                const bool emit = X >= b;
                const double Xn = X + C.drift(X, emit) * step + C.sigma(X) * sqs * rng.next();
                if (Xn <= 0.0) {
                    const double tc = t + step * (X / (X - Xn));
                    if (tc <= T) hit = 1.0;
                    break;
                }
                X = Xn;
                t += step;
            }
            vals[static_cast<std::size_t>(i)] = hit;
        });
    });
    return reduce(vals);
}

McEstimate mc_value(const Scenario& s, double b, double x0, const McOptions& opt) {
    std::vector<double> vals(static_cast<std::size_t>(opt.paths));
    const double rate_emit = s.margin() * s.l_max + s.Lambda();
    const double rate_idle = s.Lambda();
    const double delta = s.delta;
    with_coefs(s, [&](auto C) {
        const double dt = opt.dt;
        const double sq = std::sqrt(dt);
        const double decay = std::exp(-delta * dt);
        const double mid = std::exp(-delta * dt / 2.0);
        parallel_for(opt.paths, opt.threads, [&](long i) {
            GaussStream rng(path_stream_key(opt.seed, static_cast<std::uint64_t>(i)));
            double X = x0, t = 0.0, disc = 1.0, V = 0.0;
            while (X > 0.0 && t < opt.t_max) {
                const bool emit = X >= b;
                const double rate = emit ? rate_emit : rate_idle;
                const double Xn = X + C.drift(X, emit) * dt + C.sigma(X) * sq * rng.next();
                if (Xn <= 0.0) {
                    const double th = X / (X - Xn);
                    V += disc * std::exp(-delta * th * dt / 2.0) * rate * th * dt;
                    break;
                }
                V += disc * mid * rate * dt;
                disc *= decay;
                X = Xn;
                t += dt;
            }
            vals[static_cast<std::size_t>(i)] = V;
        });
    });
    return reduce(vals);
}

McEstimate mc_value_biased(const Scenario& s, double b, double x0, const ThresholdValue& cont,
                           const McOptions& opt) {
    if (!s.biased()) return mc_value(s, b, x0, opt);
    std::vector<double> vals(static_cast<std::size_t>(opt.paths));
    const double rate_emit = s.margin() * s.l_max + s.Lambda();
    const double rate_idle = s.Lambda();
    const double delta = s.delta, lambda = s.lambda, alpha = s.alpha;
    with_coefs(s, [&](auto C) {
        const double dt = opt.dt;
        const double sq = std::sqrt(dt);
        const double decay = std::exp(-delta * dt);
        const double mid = std::exp(-delta * dt / 2.0);
        parallel_for(opt.paths, opt.threads, [&](long i) {
            GaussStream rng(path_stream_key(opt.seed, static_cast<std::uint64_t>(i)));
            const double eta = -std::log(rng.g.u01()) / lambda; // switch time, drawn first
            double X = x0, t = 0.0, disc = 1.0, V = 0.0;
            while (X > 0.0 && t < opt.t_max) {
                const bool emit = X >= b;
                const double rate = emit ? rate_emit : rate_idle;
                if (t + dt >= eta) {
                    const double step = eta - t;
                    if (step > 0.0) {
                        const double Xn =
                            X + C.drift(X, emit) * step + C.sigma(X) * std::sqrt(step) * rng.next();
                        if (Xn <= 0.0) {
                            const double th = X / (X - Xn);
                            V += disc * std::exp(-delta * th * step / 2.0) * rate * th * step;
                            break;
                        }
                        V += disc * std::exp(-delta * step / 2.0) * rate * step;
                        X = Xn;
                    }
                    V += std::exp(-delta * eta) * alpha * cont.value_clamped(X);
                    break;
                }
                const double Xn = X + C.drift(X, emit) * dt + C.sigma(X) * sq * rng.next();
                if (Xn <= 0.0) {
                    const double th = X / (X - Xn);
                    V += disc * std::exp(-delta * th * dt / 2.0) * rate * th * dt;
                    break;
                }
                V += disc * mid * rate * dt;
                disc *= decay;
                X = Xn;
                t += dt;
            }
            vals[static_cast<std::size_t>(i)] = V;
        });
    });
    return reduce(vals);
}

std::vector<PathPoint> simulate_path(const Scenario& s, double b, double x0, double T, double dt,
                                     std::uint64_t seed, std::uint64_t path_index) {
    std::vector<PathPoint> out;
    out.push_back({0.0, x0, x0 >= b});
    with_coefs(s, [&](auto C) {
        GaussStream rng(path_stream_key(seed, path_index));
        double X = x0, t = 0.0;
        while (X > 0.0 && t < T - 1e-12) {
            double step = std::min(dt, T - t);
            const bool emit = X >= b;
            const double Xn = X + C.drift(X, emit) * step + C.sigma(X) * std::sqrt(step) * rng.next();
            if (Xn <= 0.0) {
                const double tc = t + step * (X / (X - Xn));
                out.push_back({tc, 0.0, emit});
                return;
            }
            X = Xn;
            t += step;
            out.push_back({t, X, X >= b});
        }
    });
    return out;
}

} // namespace cbt
