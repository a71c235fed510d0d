#pragma once

#include "cbt/exp_solver.hpp"

namespace cbt {

struct ThresholdScan {
    double b_star = 0.0;             // smallest stable crossing of the threshold condition
    std::vector<double> crossings;   // every refined sign change over the scan range
    bool from_exp = false;           // degenerate bias parameters: plain threshold reused
};

// Fixed-threshold and equilibrium-threshold solver for the stochastic
// quasi-hyperbolic agent.  Wraps an ExpSolver for the post-switch
// continuation value and solves the pre-switch problem at rate lambda+delta
// with the continuation entering as a source term.
class QhSolver {
public:
    explicit QhSolver(const ExpSolver& ex);

    const Scenario& scenario() const { return ex_.scenario(); }
    const ExpSolver& continuation() const { return ex_; }

    double marginal_value(double b) const;   // matched slope at b for the biased agent
    const ThresholdScan& threshold() const;  // cached full-range scan
    ThresholdValue value(double b) const;

    const SampledFn& outer_decay() const { return v3b_; }
    double far_value() const;

private:
    struct Parts {
        double C3 = 0.0, Vb = 0.0, hbar = 0.0;
        SampledFn phi, p, ub;
    };
    Parts parts(double b) const;

    const ExpSolver& ex_;
    double rate_ = 0.0; // lambda + delta
    SampledFn v3b_;
    mutable ThresholdScan scan_;
    mutable bool scanned_ = false;
};

} // namespace cbt
