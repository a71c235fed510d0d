#pragma once

#include <complex>
#include <vector>

#include "cbt/scenario.hpp"

namespace cbt {

// Constant-coefficient problem data.  Everything in this header is evaluated
// from explicit exponential formulas and serves as an independent check on
// the grid-based solvers.
struct FlatModel {
    double mu = 0.0;     // idle drift: natural inflow minus the committed flow
    double sigma = 1.0;
    double delta = 0.1;
    double l_max = 1.0;  // discretionary flow capacity (drift shifts by -l_max when emitting)
    double margin = 0.0; // per-unit payoff on the discretionary flow
    double Lambda = 0.0; // flow-independent payoff rate
    double lambda = 0.0;
    double alpha = 1.0;

    double q() const { return margin * l_max + Lambda; }
    bool biased() const { return lambda > 1e-10 && alpha < 1.0; }
    static FlatModel from(const Scenario& s);
};

// Characteristic exponents of a exp(up*x) growing and exp(-down*x) decaying
// solution of (sigma^2/2) g'' + drift g' = rate g.
struct RootPair {
    double up = 0.0, down = 0.0;
};
RootPair char_roots(double drift, double sigma, double rate);

// Exponential-discounting agent.
double flat_value(const FlatModel& m, double b, double x);
double flat_slope(const FlatModel& m, double b, double x);
double flat_marginal(const FlatModel& m, double b);
double flat_threshold(const FlatModel& m);

// Biased agent (pre-switch problem).
double flat_value_biased(const FlatModel& m, double b, double x);
double flat_slope_biased(const FlatModel& m, double b, double x);
double flat_marginal_biased(const FlatModel& m, double b);

struct FlatScan {
    double b_star = 0.0;
    std::vector<double> crossings;
};
FlatScan flat_threshold_biased(const FlatModel& m);

// Laplace transform of the depletion time of the fixed-threshold strategy.
std::complex<double> flat_transform(const FlatModel& m, double b, double x, std::complex<double> s);

} // namespace cbt
