#include "swb/pseudo.hpp"

#include <algorithm>
#include <cmath>

namespace swb {

namespace {

Field reciprocal(const Field& w) {
    std::vector<double> inv(w.size());
    for (int i = 0; i < w.size(); ++i) inv[i] = 1.0 / w[i];
    return Field(w.grid(), std::move(inv));
}

}  // namespace

PseudoSector build_pseudo_sector(const SwansonModel& m, const FactorPair& p, const QuasiSpec& q,
                                 const Grid& g) {
    Field rho = m.rho_weight(g);
    Field rho_inv = reciprocal(rho);
    auto [a_minus, a_plus] = supercharge_matrices(p, g);
    Triplet t = build_triplet(p, q);
    PseudoSector s{rho,
                   conjugate_by_weight(a_minus, rho_inv),
                   conjugate_by_weight(a_plus, rho_inv),
                   conjugate_by_weight(t.matrix_plus(g), rho_inv),
                   conjugate_by_weight(t.matrix_minus(g), rho_inv)};
    double lo = rho[0], hi = rho[0];
    for (int i = 0; i < rho.size(); ++i) {
        lo = std::min(lo, rho[i]);
        hi = std::max(hi, rho[i]);
    }
    s.rho_condition = hi / lo;
    return s;
}

double pseudo_adjoint_residual(const PseudoSector& s) {
    const Grid& g = s.rho.grid();
    std::vector<double> zeta(g.n);
    for (int i = 0; i < g.n; ++i) zeta[i] = s.rho[i] * s.rho[i];
    Field zeta_inv = reciprocal(Field(g, std::move(zeta)));
    BandedOperator lhs = conjugate_by_weight(transpose(s.theta_minus), zeta_inv);
    double num = subtract(lhs, s.theta_plus).max_abs_entry();
    double den = s.theta_plus.max_abs_entry();
    return den == 0.0 ? num : num / den;
}

std::pair<double, double> pseudo_intertwining_residual(const PseudoSector& s, int buffer) {
    // references mirror the Hermitian-sector convention so the rho == 1
    // sector reproduces those residuals exactly
    BandedOperator ref_p = compose(s.theta_plus, s.h_minus_nh);
    BandedOperator res_p = subtract(compose(s.h_plus_nh, s.theta_plus), ref_p);
    BandedOperator ref_m = compose(s.theta_minus, s.h_plus_nh);
    BandedOperator res_m = subtract(compose(s.h_minus_nh, s.theta_minus), ref_m);
    return {action_residual(res_p, ref_p, buffer), action_residual(res_m, ref_m, buffer)};
}

std::pair<double, double> pseudo_quasi_residual(const PseudoSector& s, const QuasiSpec& q,
                                                int buffer) {
    BandedOperator prod_pm = compose(s.theta_plus, s.theta_minus);
    BandedOperator prod_mp = compose(s.theta_minus, s.theta_plus);
    double r_plus =
        action_residual(subtract(prod_pm, quasi_polynomial(s.h_plus_nh, q)), prod_pm, buffer);
    double r_minus =
        action_residual(subtract(prod_mp, quasi_polynomial(s.h_minus_nh, q)), prod_mp, buffer);
    return {r_plus, r_minus};
}

}  // namespace swb
