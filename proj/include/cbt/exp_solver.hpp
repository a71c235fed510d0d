#pragma once

#include "cbt/ode.hpp"
#include "cbt/scenario.hpp"

namespace cbt {

// Value function of a fixed-threshold strategy, assembled from an inner
// representation on [0, b] (holding region) and an outer one on [b, x_max]
// (emitting region), glued with matched value and slope at b.
class ThresholdValue {
public:
    ThresholdValue() = default;
    ThresholdValue(double b, double Vb, double C3, SampledFn inner, SampledFn outer,
                   double far_value)
        : b_(b), Vb_(Vb), C3_(C3), inner_(std::move(inner)), outer_(std::move(outer)),
          far_(far_value) {}

    double b() const { return b_; }
    double at_threshold() const { return Vb_; }
    double outer_coefficient() const { return C3_; }
    double far_value() const { return far_; }
    double x_max() const { return outer_.x_hi(); }

    bool has_inner() const { return b_ > 0.0 && !inner_.v.empty(); }

    double value(double x) const {
        if (has_inner() && x < b_) return inner_.value(x);
        return outer_.value(x);
    }
    double slope(double x) const {
        if (has_inner() && x < b_) return inner_.slope(x);
        return outer_.slope(x);
    }
    // Continuation with the flat far field; used by path simulation where
    // excursions past the truncation level must not abort the run.
    double value_clamped(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= outer_.x_hi()) return outer_.v.back();
        return value(x);
    }

    // Values at the shared-grid nodes i*h, i = 0..n (outer grid layout).
    std::vector<double> sample_shared() const;

    const SampledFn& inner() const { return inner_; }
    const SampledFn& outer() const { return outer_; }

private:
    double b_ = 0.0, Vb_ = 0.0, C3_ = 0.0;
    SampledFn inner_, outer_;
    double far_ = 0.0;
};

// Fixed-threshold and equilibrium-threshold solver under exponential
// discounting.  Global basis solutions are computed once per scenario; each
// candidate threshold costs only two small solves on [0, b].
class ExpSolver {
public:
    explicit ExpSolver(const Scenario& s);

    const Scenario& scenario() const { return s_; }

    struct Pieces {
        double b = 0.0;
        double C3 = 0.0;     // coefficient on the decaying outer solution
        double Vb = 0.0;     // value at the threshold
        double hE = 0.0;     // matched slope at the threshold
        double dV0 = 0.0;    // slope at the origin
        SampledFn phi, p;    // inner basis: homogeneous (0 -> 1) and forced (0 -> 0)
    };
    Pieces pieces(double b) const;

    double marginal_value(double b) const;  // matched slope at b
    double slope_at_zero(double b) const;
    double threshold() const;               // equilibrium threshold (cached)
    double search_cap() const;              // scan ceiling from the origin-slope bound
    ThresholdValue value(double b) const;

    const SampledFn& outer_decay() const { return v3_; }
    const SampledFn& outer_forced() const { return u_; }
    double far_value() const { return s_.q() / s_.delta; }

    long grid_n() const { return n_; }
    double grid_h() const { return s_.h; }
    double grid_x_max() const { return x_hi_; }

private:
    Scenario s_;
    long n_ = 0;
    double x_hi_ = 0.0;
    SampledFn v3_, u_;
    mutable double bstar_ = NAN;
    mutable double cap_ = NAN;
    mutable bool cap_is_fallback_ = false;
};

} // namespace cbt
