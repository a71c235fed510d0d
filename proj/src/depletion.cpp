#include "cbt/depletion.hpp"

#include <cmath>
#include <numbers>

#include "cbt/ode.hpp"

namespace cbt {

namespace {
using CD = std::complex<double>;
constexpr double kAgreeTol = 1e-3; // inversion rules must agree this closely
constexpr double kReach = 60.0;    // exterior length kept beyond the deepest query
} // namespace

double talbot_invert(const LaplaceFn& F, double t, int M) {
    if (!(t > 0.0)) throw numerics_error("OutOfDomain: inversion time must be positive");
    const double r = 2.0 * M / (5.0 * t);
    double val = 0.5 * F(CD(r, 0.0)).real() * std::exp(r * t);
    for (int k = 1; k < M; ++k) {
        const double th = static_cast<double>(k) * std::numbers::pi / M;
        const double cot = std::cos(th) / std::sin(th);
        const CD s(r * th * cot, r * th);
        const double sg = th + (th * cot - 1.0) * cot;
        val += (std::exp(CD(t * s.real(), t * s.imag())) * F(s) * CD(1.0, sg)).real();
    }
    return val * r / M;
}

double euler_invert(const LaplaceFn& F, double t, double A, int N, int avg) {
    if (!(t > 0.0)) throw numerics_error("OutOfDomain: inversion time must be positive");
    const double re = A / (2.0 * t);
    const int K = N + avg;
    std::vector<double> partial(static_cast<std::size_t>(K) + 1);
    double run = 0.5 * F(CD(re, 0.0)).real();
    partial[0] = run;
    for (int k = 1; k <= K; ++k) {
        const double term = F(CD(re, static_cast<double>(k) * std::numbers::pi / t)).real();
        run += (k % 2 == 1) ? -term : term;
        partial[static_cast<std::size_t>(k)] = run;
    }
    const double scale = std::exp(A / 2.0) / t;
    double out = 0.0;
    double comb = 1.0; // C(avg, m), updated multiplicatively
    const double w = std::ldexp(1.0, -avg);
    for (int m = 0; m <= avg; ++m) {
        out += comb * w * scale * partial[static_cast<std::size_t>(N + m)];
        comb = comb * (avg - m) / (m + 1.0);
    }
    return out;
}

double gaver_stehfest_invert(const std::function<double(double)>& F, double t, int n) {
    if (!(t > 0.0)) throw numerics_error("OutOfDomain: inversion time must be positive");
    if (n % 2 != 0 || n < 2) throw numerics_error("SingularSystem: even stage count required");
    const int nh = n / 2;
    auto fact = [](int k) {
        long double f = 1.0L;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    const long double ln2 = 0.69314718055994530942L;
    long double acc = 0.0L;
    for (int k = 1; k <= n; ++k) {
        long double zeta = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, nh); ++j) {
            long double term = powl(static_cast<long double>(j), nh) * fact(2 * j);
            term /= fact(nh - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k);
            zeta += term;
        }
        if ((nh + k) % 2 != 0) zeta = -zeta;
        acc += zeta * F(static_cast<double>(k * ln2 / t));
    }
    return static_cast<double>(acc * ln2 / t);
}

DepletionSolver::DepletionSolver(const Scenario& s, double b) : s_(s), b_(b), h_(s.h) {
    if (b_ < 0.0 || b_ > s_.x_max)
        throw numerics_error("OutOfDomain: threshold outside [0, x_max]");
    if (b_ < 0.5 * h_) b_ = 0.0;
    x_cut_ = b_; // ensure_reach sets the real cut before first use
    ensure_reach(s_.x0);
}

void DepletionSolver::ensure_reach(double x) const {
    const double x_grid = std::lround(s_.x_max / h_) * h_;
    if (x > x_grid + 1e-9)
        throw numerics_error("OutOfDomain: transform queried beyond x_max");
    const double want = std::min(x_grid, std::max(b_, x) + kReach);
    if (want <= x_cut_ + 1e-12) return;
    n_out_ = std::max<long>(40, std::lround((want - b_) / h_));
    x_cut_ = b_ + static_cast<double>(n_out_) * h_;
    if (x_cut_ > x_grid + 1e-9) {
        n_out_ = std::lround((x_grid - b_) / h_);
        x_cut_ = b_ + static_cast<double>(n_out_) * h_;
    }
    cache_.clear();
}

const DepletionSolver::Basis& DepletionSolver::basis(CD s) const {
    const auto key = std::make_pair(s.real(), s.imag());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 256) cache_.clear();

    const RealFn a = [this](double x) { return 0.5 * s_.sigma(x) * s_.sigma(x); };
    const RealFn drift_in = [this](double x) { return s_.drift_idle(x); };
    const RealFn drift_out = [this](double x) { return s_.drift_emit(x); };
    const auto zero = [](double) { return CD(0.0, 0.0); };

    Basis bs;
    if (b_ > 0.0) {
        bs.nb = std::max<long>(6, std::lround(b_ / h_));
        bs.hb = b_ / static_cast<double>(bs.nb);
        bs.A = bvp_solve<CD>(a, drift_in, s, zero, 0.0, b_, bs.nb, CD(1.0), CD(0.0));
        bs.B = bvp_solve<CD>(a, drift_in, s, zero, 0.0, b_, bs.nb, CD(0.0), CD(1.0));
        bs.w = bvp_solve<CD>(a, drift_out, s, zero, b_, x_cut_, n_out_, CD(1.0), CD(0.0));
        const double hw = (x_cut_ - b_) / static_cast<double>(n_out_);
        const CD Ap = end_slope(bs.A, bs.hb), Bp = end_slope(bs.B, bs.hb);
        const CD wp = start_slope(bs.w, hw);
        const CD den = wp - Bp;
        if (den == CD(0.0)) throw numerics_error("SingularSystem: transform matching degenerate");
        bs.D = Ap / den;
    } else {
        bs.w = bvp_solve<CD>(a, drift_out, s, zero, 0.0, x_cut_, n_out_, CD(1.0), CD(0.0));
        bs.D = CD(1.0);
    }
    return cache_.emplace(key, std::move(bs)).first->second;
}

CD DepletionSolver::transform(double x, CD s) const {
    if (x <= 0.0) return {1.0, 0.0};
    ensure_reach(x);
    const Basis& bs = basis(s);
    if (b_ > 0.0 && x < b_) {
        return interp_uniform(0.0, bs.hb, bs.A, x) + bs.D * interp_uniform(0.0, bs.hb, bs.B, x);
    }
    const double hw = (x_cut_ - b_) / static_cast<double>(n_out_);
    if (x > x_cut_ + 1e-9)
        throw numerics_error("OutOfDomain: transform queried beyond the exterior cut");
    return bs.D * interp_uniform(b_, hw, bs.w, x);
}

double DepletionSolver::cdf(double x, double t) const {
    if (t <= 0.0) return 0.0;
    const Inversions both = invert_both(x, t);
    if (std::abs(both.primary - both.check) > kAgreeTol)
        throw numerics_error("InversionUnstable: inversion rules disagree by " +
                             std::to_string(std::abs(both.primary - both.check)) + " at t = " +
                             std::to_string(t));
    return std::min(1.0, std::max(0.0, both.primary));
}

DepletionSolver::Inversions DepletionSolver::invert_both(double x, double t) const {
    LaplaceFn F = [this, x](CD s) { return transform(x, s) / s; };
    Inversions out;
    out.primary = talbot_invert(F, t);
    out.check = euler_invert(F, t);
    return out;
}

} // namespace cbt
