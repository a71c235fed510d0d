#pragma once

#include <cstdint>
#include <vector>

#include "cbt/exp_solver.hpp"

namespace cbt {

// Counter-style generator: every path derives its own stream from (seed, path
// index) through an integer mix, so results are independent of scheduling and
// identical for any worker count.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t s) : state(s) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // Uniform in the open interval (0, 1).
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }
};

std::uint64_t path_stream_key(std::uint64_t seed, std::uint64_t path_index);

// Standard normals from the polar rule with the spare deviate cached.
struct GaussStream {
    SplitMix64 g;
    bool has_spare = false;
    double spare = 0.0;
    explicit GaussStream(std::uint64_t key) : g(key) {}
    double next();
};

struct McOptions {
    long paths = 100000;
    double dt = 1.0 / 365.0;
    double t_max = 400.0; // hard cap on simulated time for value estimates
    int threads = 0;      // <= 0: hardware concurrency
    std::uint64_t seed = 12345;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n = 0;
};

// Probability of depletion by time T from x0 under the fixed-threshold rule.
McEstimate mc_depletion_probability(const Scenario& s, double b, double x0, double T,
                                    const McOptions& opt);

// Discounted payoff of the fixed-threshold rule (plain discounting).
McEstimate mc_value(const Scenario& s, double b, double x0, const McOptions& opt);

// Pre-switch payoff of the biased agent: payoff flow until the exponential
// switch time, plus alpha times the supplied continuation value at the switch
// state.  `cont` must be the fixed-threshold continuation for the same b.
McEstimate mc_value_biased(const Scenario& s, double b, double x0, const ThresholdValue& cont,
                           const McOptions& opt);

struct PathPoint {
    double t = 0.0;
    double x = 0.0;
    bool emitting = false;
};

// Single trajectory under the fixed-threshold rule, recorded at every step
// until depletion or the horizon.  The noise stream depends only on
// (seed, path_index), never on the threshold.
std::vector<PathPoint> simulate_path(const Scenario& s, double b, double x0, double T, double dt,
                                     std::uint64_t seed, std::uint64_t path_index = 0);

// Deterministic fixed-tree reduction used by every estimator.
double pairwise_sum(const std::vector<double>& v);

} // namespace cbt
