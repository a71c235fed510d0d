#pragma once

#include <complex>
#include <functional>
#include <map>

#include "cbt/exp_solver.hpp"

namespace cbt {

using LaplaceFn = std::function<std::complex<double>(std::complex<double>)>;

// Numerical inversion of a Laplace transform evaluated on demand.
double talbot_invert(const LaplaceFn& F, double t, int M = 32);
double euler_invert(const LaplaceFn& F, double t, double A = 18.4, int N = 15, int avg = 11);
// Real-node diagnostic inversion; inherently limited accuracy, never used as
// the production cross-check.
double gaver_stehfest_invert(const std::function<double(double)>& F, double t, int n = 14);

// Laplace-domain depletion-time machinery for a fixed threshold strategy.
// For each transform argument s the generator equation is solved as an
// interface problem: two interior basis solutions on [0, b] and one decaying
// exterior solution, glued by slope matching at the threshold.
class DepletionSolver {
public:
    DepletionSolver(const Scenario& s, double b);

    double b() const { return b_; }
    const Scenario& scenario() const { return s_; }

    // Transform of the depletion time started from x.
    std::complex<double> transform(double x, std::complex<double> s) const;
    double transform_real(double x, double s) const { return transform(x, {s, 0.0}).real(); }

    // Probability that depletion happens by time t, from state x.  Inverted
    // with the deformed-contour rule and independently cross-checked with the
    // alternating-series rule; disagreement beyond 1e-3 raises an error.
    double cdf(double x, double t) const;

    struct Inversions {
        double primary = 0.0, check = 0.0;
    };
    Inversions invert_both(double x, double t) const;

private:
    struct Basis {
        std::vector<std::complex<double>> A, B; // interior: 1->0 and 0->1 on [0, b]
        std::vector<std::complex<double>> w;    // exterior: 1 at b, 0 at the cut
        std::complex<double> D = 0.0;           // interface amplitude (transform value at b)
        double hb = 0.0;                        // interior step
        long nb = 0;
    };
    const Basis& basis(std::complex<double> s) const;
    void ensure_reach(double x) const;

    Scenario s_;
    double b_ = 0.0;
    double h_ = 0.0;
    mutable double x_cut_ = 0.0;  // exterior truncation (extended on demand)
    mutable long n_out_ = 0;
    mutable std::map<std::pair<double, double>, Basis> cache_;
};

} // namespace cbt
