#include "swb/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace swb {

Grid::Grid(double x_min_, double x_max_, int n_) : x_min(x_min_), x_max(x_max_), n(n_) {
    if (!(x_min < x_max)) throw std::invalid_argument("Grid: x_min must be < x_max");
    if (n < 3) throw std::invalid_argument("Grid: need at least 3 interior points");
    h = (x_max - x_min) / (n + 1);
}

std::vector<double> Grid::points() const {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = point(i);
    return xs;
}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.n)
        throw std::invalid_argument("Field: value count does not match grid");
    for (int i = 0; i < grid_.n; ++i)
        if (!std::isfinite(values_[i])) throw FieldError("non-finite field value", i);
}

Field sample(const Expr& e, const Grid& g, const Bindings& params) {
    std::vector<double> v(g.n);
    for (int i = 0; i < g.n; ++i) {
        try {
            v[i] = evaluate(e, g.point(i), params);
        } catch (const EvalError& err) {
            throw FieldError(err.what(), i);
        }
        if (!std::isfinite(v[i])) throw FieldError("non-finite sample", i);
    }
    return Field(g, std::move(v));
}

Field cumulative_integral(const Field& f) {
    const Grid& g = f.grid();
    std::vector<double> F(g.n);
    F[0] = 0.0;
    for (int i = 1; i < g.n; ++i) F[i] = F[i - 1] + 0.5 * g.h * (f[i - 1] + f[i]);
    return Field(g, std::move(F));
}

double quadrature(const Field& f) {
    const Grid& g = f.grid();
    const int n = g.n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += f[i];
    double left = 2.0 * f[0] - f[1];
    double right = 2.0 * f[n - 1] - f[n - 2];
    return g.h * (sum + 0.5 * (left + right));
}

double l2_norm(const Field& f) {
    double s = 0.0;
    for (double v : f.values()) s += v * v;
    return std::sqrt(f.grid().h * s);
}

}  // namespace swb
