#include "swb/ssusy.hpp"

#include <cmath>
#include <stdexcept>

namespace swb {

QuasiSpec QuasiSpec::perfect_square(double lambda) {
    QuasiSpec q;
    q.kind_ = Kind::PerfectSquare;
    q.lambda_ = lambda;
    q.mu_ = lambda * lambda;
    return q;
}

QuasiSpec QuasiSpec::split_c(double c) {
    QuasiSpec q;
    q.kind_ = Kind::SplitC;
    q.c_ = c;
    q.mu_ = -c * c / 4.0;
    return q;
}

QuasiSpec QuasiSpec::general(double lambda, double mu) {
    if (!(lambda * lambda > mu))
        throw std::invalid_argument("QuasiSpec::general requires lambda^2 > mu");
    QuasiSpec q;
    q.kind_ = Kind::General;
    q.lambda_ = lambda;
    q.mu_ = mu;
    return q;
}

std::pair<double, double> QuasiSpec::energies() const {
    switch (kind_) {
        case Kind::PerfectSquare: return {lambda_, lambda_};
        case Kind::SplitC: return {c_ / 2.0, -c_ / 2.0};
        case Kind::General: {
            double r = std::sqrt(lambda_ * lambda_ - mu_);
            return {lambda_ + r, lambda_ - r};
        }
    }
    return {0.0, 0.0};
}

std::pair<double, double> QuasiSpec::shifts() const {
    switch (kind_) {
        case Kind::PerfectSquare: return {0.0, 0.0};
        case Kind::SplitC: return {c_ / 2.0, -c_ / 2.0};
        case Kind::General: {
            double r = std::sqrt(lambda_ * lambda_ - mu_);
            return {r, -r};
        }
    }
    return {0.0, 0.0};
}

std::pair<double, double> QuasiSpec::poly_coeffs() const {
    switch (kind_) {
        case Kind::PerfectSquare: return {-2.0 * lambda_, lambda_ * lambda_};
        case Kind::SplitC: return {0.0, -c_ * c_ / 4.0};
        case Kind::General: return {-2.0 * lambda_, mu_};
    }
    return {0.0, 0.0};
}

namespace {

// potential of xi xi^T = at (b - at')' + b (b - at')
Expr left_product_potential(const Expr& at, const Expr& b) {
    Expr at_p = differentiate(at, 1);
    Expr rest = simplify(b - at_p);
    return simplify(at * differentiate(rest, 1) + b * rest);
}

// potential of xi^T xi = b^2 - (at b)'
Expr right_product_potential(const Expr& at, const Expr& b) {
    return simplify(b * b - differentiate(simplify(at * b), 1));
}

}  // namespace

ConstraintCheck constraint_residual(const FactorPair& p, const QuasiSpec& q, const Grid& g) {
    auto [s1, s2] = q.shifts();
    Expr pot1 = left_product_potential(p.a_tilde, p.b1);
    Expr pot2 = right_product_potential(p.a_tilde, p.b2);
    ConstraintCheck out;
    out.residual = simplify(pot1 + constant(s1) - pot2 - constant(s2));

    Expr at_p = differentiate(p.a_tilde, 1);
    Expr at_pp = differentiate(p.a_tilde, 2);
    Expr sum = simplify(p.b1 + p.b2);
    Expr dif = simplify(p.b1 - p.b2);
    out.perfect_square_form = simplify(
        p.a_tilde * at_pp -
        (p.a_tilde * differentiate(sum, 1) - at_p * dif + dif * sum));

    Field r = sample(out.residual, g, p.params);
    for (int i = 0; i < g.n; ++i) {
        double v = std::fabs(r[i]);
        if (v > out.grid_max) {
            out.grid_max = v;
            out.grid_argmax_x = g.point(i);
        }
    }
    if (is_constant(out.residual, 0.0)) {
        out.identically_zero = true;
    } else {
        Triplet t = build_triplet(p, q);
        Field vp = sample(t.v_plus, g, p.params);
        double vmax = 0.0;
        for (int i = 0; i < g.n; ++i) vmax = std::max(vmax, std::fabs(vp[i]));
        out.identically_zero = out.grid_max <= 1e-12 * (1.0 + vmax);
    }
    return out;
}

Triplet build_triplet(const FactorPair& p, const QuasiSpec& q) {
    auto [e1, e2] = q.energies();
    Triplet t;
    t.mass = simplify(p.a_tilde * p.a_tilde);
    t.v_plus = simplify(right_product_potential(p.a_tilde, p.b1) + constant(e1));
    t.v_bar = simplify(right_product_potential(p.a_tilde, p.b2) + constant(e2));
    t.v_minus = simplify(left_product_potential(p.a_tilde, p.b2) + constant(e2));
    t.e1 = e1;
    t.e2 = e2;
    t.params = p.params;
    return t;
}

BandedOperator Triplet::matrix_plus(const Grid& g) const {
    return sturm_liouville_matrix(mass, sample(v_plus, g, params), g, params);
}
BandedOperator Triplet::matrix_bar(const Grid& g) const {
    return sturm_liouville_matrix(mass, sample(v_bar, g, params), g, params);
}
BandedOperator Triplet::matrix_minus(const Grid& g) const {
    return sturm_liouville_matrix(mass, sample(v_minus, g, params), g, params);
}

std::pair<BandedOperator, BandedOperator> supercharge_matrices(const FactorPair& p,
                                                               const Grid& g) {
    LadderSpec xi1{p.a_tilde, p.b1, p.params};
    LadderSpec xi2{p.a_tilde, p.b2, p.params};
    BandedOperator a_minus = compose(ladder_matrix(xi2, g), ladder_matrix(xi1, g));
    BandedOperator a_plus = transpose(a_minus);
    return {a_minus, a_plus};
}

double intertwining_residual(const BandedOperator& a, const BandedOperator& hp,
                             const BandedOperator& hm, int buffer) {
    if (!a.same_grid(hp) || !a.same_grid(hm))
        throw std::invalid_argument("intertwining_residual: grid mismatch");
    BandedOperator ahp = compose(a, hp);
    BandedOperator residual = subtract(ahp, compose(hm, a));
    return action_residual(residual, ahp, buffer);
}

BandedOperator quasi_polynomial(const BandedOperator& h, const QuasiSpec& q) {
    auto [pb, pc] = q.poly_coeffs();
    BandedOperator h2 = compose(h, h);
    return add_scalar(add(h2, h.scaled(pb)), pc);
}

std::pair<double, double> quasi_hamiltonian_residual(const FactorPair& p, const QuasiSpec& q,
                                                     const Grid& g, int buffer) {
    auto [a_minus, a_plus] = supercharge_matrices(p, g);
    Triplet t = build_triplet(p, q);
    BandedOperator hp = t.matrix_plus(g);
    BandedOperator hm = t.matrix_minus(g);
    BandedOperator prod_pm = compose(a_plus, a_minus);
    BandedOperator prod_mp = compose(a_minus, a_plus);
    double r_plus = action_residual(subtract(prod_pm, quasi_polynomial(hp, q)), prod_pm, buffer);
    double r_minus = action_residual(subtract(prod_mp, quasi_polynomial(hm, q)), prod_mp, buffer);
    return {r_plus, r_minus};
}

std::pair<Block2, Block2> supercharge_blocks(const FactorPair& p, const Grid& g) {
    auto [a_minus, a_plus] = supercharge_matrices(p, g);
    Block2 q_plus(g), q_minus(g);
    q_plus.block(1, 0) = a_minus;
    q_minus.block(0, 1) = a_plus;
    return {q_plus, q_minus};
}

double nilpotency_check(const FactorPair& p, const Grid& g) {
    auto [q_plus, q_minus] = supercharge_blocks(p, g);
    double n1 = compose(q_plus, q_plus).max_abs_entry();
    double n2 = compose(q_minus, q_minus).max_abs_entry();
    return std::max(n1, n2);
}

}  // namespace swb
