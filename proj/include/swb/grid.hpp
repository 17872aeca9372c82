#pragma once

// Uniform 1-D grid with Dirichlet endpoints excluded, sampled fields and
// trapezoidal quadrature. Grids and Fields are immutable values.

#include <vector>

#include "swb/expr.hpp"

namespace swb {

struct Grid {
    Grid(double x_min, double x_max, int n);

    double x_min;
    double x_max;
    int n;       // number of interior points
    double h;    // spacing = (x_max - x_min)/(n + 1)

    // interior points x_i = x_min + (i+1) h, i = 0..n-1
    double point(int i) const { return x_min + (i + 1) * h; }
    std::vector<double> points() const;

    bool operator==(const Grid& o) const {
        return x_min == o.x_min && x_max == o.x_max && n == o.n;
    }
};

struct FieldError : std::runtime_error {
    FieldError(const std::string& msg, int index)
        : std::runtime_error(msg + " at grid index " + std::to_string(index)), index(index) {}
    int index;
};

class Field {
public:
    Field(Grid grid, std::vector<double> values);  // rejects NaN/Inf with index

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](int i) const { return values_[i]; }
    int size() const { return static_cast<int>(values_.size()); }

private:
    Grid grid_;
    std::vector<double> values_;
};

// Pointwise evaluation of e on the grid; domain errors carry the grid index.
Field sample(const Expr& e, const Grid& g, const Bindings& params = {});

// Trapezoidal cumulative integral with F(x_1) = 0 (lower limit fixed at the
// first interior point).
Field cumulative_integral(const Field& f);

// Trapezoidal total over [x_min, x_max]; endpoint values are linearly
// extrapolated from the two nearest interior points, which keeps the rule
// exact on linear fields.
double quadrature(const Field& f);

// l2 norm with the flat grid measure: sqrt(h * sum f_i^2).
double l2_norm(const Field& f);

}  // namespace swb
