#pragma once

// Second-derivative SUSY: factorization pairs xi_1 = at d/dx + b1,
// xi_2 = at d/dx + b2, the three quasi-Hamiltonian classifications, the
// Hamiltonian triplet, supercharges and the identity residuals.

#include "swb/operators.hpp"

namespace swb {

struct FactorPair {
    Expr a_tilde;
    Expr b1;
    Expr b2;
    Bindings params;
};

class QuasiSpec {
public:
    enum class Kind { PerfectSquare, SplitC, General };

    static QuasiSpec perfect_square(double lambda);
    static QuasiSpec split_c(double c);
    static QuasiSpec general(double lambda, double mu);  // requires lambda^2 > mu

    Kind kind() const { return kind_; }
    double lambda_value() const { return lambda_; }
    double c_value() const { return c_; }
    double mu_value() const { return mu_; }

    // factorization energies (e1, e2) entering the triplet potentials
    std::pair<double, double> energies() const;
    // constraint shifts (s1, s2): xi1 xi1^T + s1 = xi2^T xi2 + s2
    std::pair<double, double> shifts() const;
    // quadratic polynomial t^2 + b t + c with A+A- = poly(h+), A-A+ = poly(h-)
    std::pair<double, double> poly_coeffs() const;

private:
    QuasiSpec() = default;
    Kind kind_ = Kind::PerfectSquare;
    double lambda_ = 0.0, c_ = 0.0, mu_ = 0.0;
};

struct ConstraintCheck {
    Expr residual;  // [potential of xi1 xi1^T + s1] - [potential of xi2^T xi2 + s2]
    Expr perfect_square_form;  // at at'' - [at (b1+b2)' - at' (b1-b2) + (b1-b2)(b1+b2)]
    double grid_max = 0.0;     // max |residual| on the probe grid
    double grid_argmax_x = 0.0;
    bool identically_zero = false;  // literal 0 after simplify, or below tolerance
};

// Compatibility constraint between the two first-order factorizations; a
// violation is a reported measurement, never an error.
ConstraintCheck constraint_residual(const FactorPair& p, const QuasiSpec& q, const Grid& g);

struct Triplet {
    Expr mass;  // at^2, shared by all three
    Expr v_plus, v_bar, v_minus;
    double e1 = 0.0, e2 = 0.0;
    Bindings params;

    BandedOperator matrix_plus(const Grid& g) const;
    BandedOperator matrix_bar(const Grid& g) const;
    BandedOperator matrix_minus(const Grid& g) const;
};

// V+ = b1^2 - (at b1)' + e1 ; Vbar = b2^2 - (at b2)' + e2 ;
// V- = at (b2 - at')' + b2 (b2 - at') + e2. Constraint violations do not
// block construction.
Triplet build_triplet(const FactorPair& p, const QuasiSpec& q);

// A- = xi2 xi1 (pentadiagonal), A+ = transpose(A-) exactly.
std::pair<BandedOperator, BandedOperator> supercharge_matrices(const FactorPair& p,
                                                               const Grid& g);

// Probe-action norm of A hp - hm A normalized by the action of A hp.
double intertwining_residual(const BandedOperator& a, const BandedOperator& hp,
                             const BandedOperator& hm, int buffer = kDefaultBoundaryBuffer);

// Residuals of A+A- - poly(h+) and A-A+ - poly(h-).
std::pair<double, double> quasi_hamiltonian_residual(const FactorPair& p, const QuasiSpec& q,
                                                     const Grid& g,
                                                     int buffer = kDefaultBoundaryBuffer);

// poly(h) = h^2 + pb h + pc I per the classification.
BandedOperator quasi_polynomial(const BandedOperator& h, const QuasiSpec& q);

// 2n x 2n supercharge blocks Q+ = [[0,0],[A-,0]], Q- = [[0,A+],[0,0]].
std::pair<Block2, Block2> supercharge_blocks(const FactorPair& p, const Grid& g);

// || Q^2 || over both charges; exactly zero by block structure.
double nilpotency_check(const FactorPair& p, const Grid& g);

}  // namespace swb
