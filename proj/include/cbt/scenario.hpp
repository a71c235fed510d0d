#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cbt/errors.hpp"

namespace cbt {

// Monotonicity-preserving piecewise-cubic interpolant (Fritsch–Carlson slope
// limiting).  Used for tabulated coefficient curves; extends as a constant
// beyond the data range.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    bool empty() const { return x_.empty(); }
    const std::vector<double>& knots() const { return x_; }

private:
    std::vector<double> x_, y_, m_;
};

enum class ModelKind { Constant, Ou, Tabulated };

// A fully specified problem instance: diffusion coefficients, payoff
// parameters, present-bias parameters, initial state, and the numerical grid.
struct Scenario {
    ModelKind kind = ModelKind::Constant;
    bool kind_set = false;

    // kind == Constant
    double mu_bar = NAN;      // constant natural inflow rate
    double sigma_const = NAN; // constant volatility

    // kind == Ou: inflow kappa*(theta - x), volatility sqrt(sigma0 + sigma1*x)
    double kappa = NAN, theta = NAN, sigma0 = NAN, sigma1 = NAN;

    // kind == Tabulated (programmatic use only; no text form)
    MonotoneCubic mu_tab, sigma_tab;

    double gamma = NAN;       // gross per-unit flow payoff
    double c_ind = NAN;       // proportional damage coefficient
    double c_tax = NAN;       // flat levy per unit flow
    std::optional<double> beta_override; // replaces c_ind*gamma + c_tax when set
    double l_base = NAN;      // committed baseline flow
    double l_max = NAN;       // discretionary excess flow capacity
    double Lambda_bar = NAN;  // flow-independent payoff rate
    double delta = NAN;       // discount rate

    double lambda = 0.0;      // arrival intensity of the future-self switch
    double alpha = 1.0;       // weight applied to post-switch continuation

    double x0 = NAN;          // initial budget level
    double T = 25.0;          // reporting horizon for depletion probabilities

    double h = 0.01;          // grid step
    double x_max = NAN;       // truncation level (resolved default: max(10*x0, 60))

    // Derived economic quantities.
    double beta() const { return beta_override ? *beta_override : c_ind * gamma + c_tax; }
    double margin() const { return gamma - beta(); }
    double Lambda() const { return Lambda_bar + margin() * l_base; }
    double q() const { return margin() * l_max + Lambda(); }

    // Diffusion coefficients.
    double drift_base(double x) const;            // natural inflow
    double drift_idle(double x) const { return drift_base(x) - l_base; }
    double drift_emit(double x) const { return drift_base(x) - l_base - l_max; }
    double sigma(double x) const;

    bool biased() const { return lambda > 1e-10 && alpha < 1.0; }

    // Mutation by config key (numbers only; model.kind handled separately).
    void set_numeric(const std::string& key, double value);
    void apply_text(const std::string& text);     // partial assignment over *this
    void require_complete() const;                // MissingKey checks
    void resolve_defaults();                      // fills x_max when unset
    void validate() const;                        // invariant checks

    std::string to_config_text() const;

    static Scenario defaults() { return Scenario{}; }
    static Scenario from_string(const std::string& text);
    static Scenario from_file(const std::string& path);
};

} // namespace cbt
