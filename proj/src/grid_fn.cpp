#include "cbt/grid_fn.hpp"

namespace cbt {

SampledFn make_sampled(double x_lo, double h, std::vector<double> values) {
    SampledFn f;
    f.x_lo = x_lo;
    f.h = h;
    f.d = table_derivative(values, h);
    f.v = std::move(values);
    return f;
}

} // namespace cbt
