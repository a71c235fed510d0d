#include "cbt/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cbt {

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
    : x_(std::move(xs)), y_(std::move(ys)) {
    if (x_.size() != y_.size() || x_.size() < 2)
        throw config_error("InvariantViolation: tabulated curve needs matching x/y arrays of length >= 2");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1]))
            throw config_error("InvariantViolation: tabulated curve abscissae must be strictly increasing");

    const std::size_t n = x_.size();
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        m_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;

    // Fritsch–Carlson limiter keeps each cubic piece monotone.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m_[i] = m_[i + 1] = 0.0;
            continue;
        }
        const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m_[i] = tau * a * d[i];
            m_[i + 1] = tau * b * d[i];
        }
    }
}

double MonotoneCubic::operator()(double x) const {
    if (x_.empty()) throw config_error("InvariantViolation: empty tabulated curve evaluated");
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double hi = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / hi;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * y_[i] + h10 * hi * m_[i] + h01 * y_[i + 1] + h11 * hi * m_[i + 1];
}

double Scenario::drift_base(double x) const {
    switch (kind) {
        case ModelKind::Constant: return mu_bar;
        case ModelKind::Ou: return kappa * (theta - x);
        case ModelKind::Tabulated: return mu_tab(x);
    }
    return NAN;
}

double Scenario::sigma(double x) const {
    switch (kind) {
        case ModelKind::Constant: return sigma_const;
        case ModelKind::Ou: return std::sqrt(sigma0 + sigma1 * x);
        case ModelKind::Tabulated: return sigma_tab(x);
    }
    return NAN;
}

namespace {

double parse_number(const std::string& key, const std::string& tok) {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw config_error("ParseError: value '" + tok + "' for key '" + key + "' is not a number");
    return v;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

} // namespace

void Scenario::set_numeric(const std::string& key, double v) {
    if (key == "model.mu_bar") mu_bar = v;
    else if (key == "model.sigma") sigma_const = v;
    else if (key == "model.kappa") kappa = v;
    else if (key == "model.theta") theta = v;
    else if (key == "model.sigma0") sigma0 = v;
    else if (key == "model.sigma1") sigma1 = v;
    else if (key == "econ.gamma") gamma = v;
    else if (key == "econ.c_ind") c_ind = v;
    else if (key == "econ.c_tax") c_tax = v;
    else if (key == "econ.beta_override") beta_override = v;
    else if (key == "econ.l_base") l_base = v;
    else if (key == "econ.l_max") l_max = v;
    else if (key == "econ.Lambda_bar") Lambda_bar = v;
    else if (key == "econ.delta") delta = v;
    else if (key == "bias.lambda") lambda = v;
    else if (key == "bias.alpha") alpha = v;
    else if (key == "init.x0") x0 = v;
    else if (key == "init.T") T = v;
    else if (key == "grid.h") h = v;
    else if (key == "grid.x_max") x_max = v;
    else throw config_error("UnknownKey: '" + key + "' is not a recognized scalar setting");
}

void Scenario::apply_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("ParseError: line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw config_error("ParseError: line " + std::to_string(lineno) + " is missing a key or value");
        if (key == "model.kind") {
            const std::string k = strip_quotes(val);
            if (k == "constant") kind = ModelKind::Constant;
            else if (k == "ou") kind = ModelKind::Ou;
            else throw config_error("UnknownKey: model.kind value '" + k + "' (want constant or ou)");
            kind_set = true;
        } else {
            set_numeric(key, parse_number(key, val));
        }
    }
}

void Scenario::require_complete() const {
    auto need = [](double v, const char* key) {
        if (std::isnan(v)) throw config_error(std::string("MissingKey: ") + key);
    };
    if (!kind_set && kind != ModelKind::Tabulated)
        throw config_error("MissingKey: model.kind");
    if (kind == ModelKind::Constant) {
        need(mu_bar, "model.mu_bar");
        need(sigma_const, "model.sigma");
    } else if (kind == ModelKind::Ou) {
        need(kappa, "model.kappa");
        need(theta, "model.theta");
        need(sigma0, "model.sigma0");
        need(sigma1, "model.sigma1");
    } else if (mu_tab.empty() || sigma_tab.empty()) {
        throw config_error("MissingKey: tabulated coefficient curves not supplied");
    }
    need(gamma, "econ.gamma");
    need(c_ind, "econ.c_ind");
    need(c_tax, "econ.c_tax");
    need(l_base, "econ.l_base");
    need(l_max, "econ.l_max");
    need(Lambda_bar, "econ.Lambda_bar");
    need(delta, "econ.delta");
    need(x0, "init.x0");
}

void Scenario::resolve_defaults() {
    if (std::isnan(x_max)) x_max = std::max(10.0 * x0, 60.0);
}

void Scenario::validate() const {
    auto fail = [](const std::string& what) { throw config_error("InvariantViolation: " + what); };
    const double bf = c_ind * gamma + c_tax;
    if (beta_override && std::abs(*beta_override - bf) > 1e-12)
        std::fprintf(stderr, "note: econ.beta_override = %g replaces the composed value %g\n",
                     *beta_override, bf);
    if (!(margin() > 0.0)) fail("gamma - beta must be positive");
    if (!(Lambda() > 0.0)) fail("the flow-independent payoff rate must be positive");
    if (!(l_max > 0.0)) fail("econ.l_max must be positive");
    if (!(l_base >= 0.0)) fail("econ.l_base must be nonnegative");
    if (!(delta > 0.0)) fail("econ.delta must be positive");
    if (!(lambda >= 0.0)) fail("bias.lambda must be nonnegative");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("bias.alpha must lie in [0, 1]");
    if (!(x0 >= 0.0)) fail("init.x0 must be nonnegative");
    if (!(T > 0.0)) fail("init.T must be positive");
    if (!(h > 0.0)) fail("grid.h must be positive");
    if (!(x_max > x0)) fail("grid.x_max must exceed init.x0");
    if (!std::isfinite(x_max)) fail("grid.x_max must be finite");

    // Coefficient scan over the working grid: positivity of the volatility,
    // finiteness, and the mean-reversion speed bound that keeps discounted
    // values well defined.
    const long n = std::lround(x_max / h);
    if (n < 40) fail("grid is too coarse: x_max/h must be at least 40");
    double worst_slope = -INFINITY;
    for (long i = 0; i <= n; ++i) {
        const double x = i * h;
        const double s = sigma(x);
        const double m = drift_base(x);
        if (!std::isfinite(s) || !std::isfinite(m))
            throw config_error("NonfiniteCoefficient: model coefficients at x = " + std::to_string(x));
        if (!(s > 0.0)) fail("sigma(x) must be positive on the grid (x = " + std::to_string(x) + ")");
        if (i > 0) {
            const double slope = (m - drift_base(x - h)) / h;
            worst_slope = std::max(worst_slope, slope);
        }
    }
    if (worst_slope > delta + 1e-9)
        throw config_error("DriftSlopeExceedsDelta: sup mu'(x) = " + std::to_string(worst_slope) +
                           " exceeds delta = " + std::to_string(delta));
}

std::string Scenario::to_config_text() const {
    if (kind == ModelKind::Tabulated)
        throw config_error("InvariantViolation: tabulated coefficient models have no text form");
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string out;
    out += "model.kind = ";
    out += (kind == ModelKind::Constant) ? "constant\n" : "ou\n";
    if (kind == ModelKind::Constant) {
        out += "model.mu_bar = " + num(mu_bar) + "\n";
        out += "model.sigma = " + num(sigma_const) + "\n";
    } else {
        out += "model.kappa = " + num(kappa) + "\n";
        out += "model.theta = " + num(theta) + "\n";
        out += "model.sigma0 = " + num(sigma0) + "\n";
        out += "model.sigma1 = " + num(sigma1) + "\n";
    }
    out += "econ.gamma = " + num(gamma) + "\n";
    out += "econ.c_ind = " + num(c_ind) + "\n";
    out += "econ.c_tax = " + num(c_tax) + "\n";
    if (beta_override) out += "econ.beta_override = " + num(*beta_override) + "\n";
    out += "econ.l_base = " + num(l_base) + "\n";
    out += "econ.l_max = " + num(l_max) + "\n";
    out += "econ.Lambda_bar = " + num(Lambda_bar) + "\n";
    out += "econ.delta = " + num(delta) + "\n";
    out += "bias.lambda = " + num(lambda) + "\n";
    out += "bias.alpha = " + num(alpha) + "\n";
    out += "init.x0 = " + num(x0) + "\n";
    out += "init.T = " + num(T) + "\n";
    out += "grid.h = " + num(h) + "\n";
    if (!std::isnan(x_max)) out += "grid.x_max = " + num(x_max) + "\n";
    return out;
}

Scenario Scenario::from_string(const std::string& text) {
    Scenario s;
    s.apply_text(text);
    s.require_complete();
    s.resolve_defaults();
    s.validate();
    return s;
}

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

} // namespace cbt
