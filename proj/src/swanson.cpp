#include "swb/swanson.hpp"

#include <cmath>
#include <stdexcept>

namespace swb {

SwansonParams::SwansonParams(double omega_, double alpha_, double beta_)
    : omega(omega_), alpha(alpha_), beta(beta_), omega_tilde(omega_ - alpha_ - beta_) {
    if (!(omega_tilde > 0.0))
        throw std::invalid_argument("SwansonParams: omega - alpha - beta must be positive");
}

SwansonModel::SwansonModel(SwansonParams params, LadderSpec ladder)
    : params_(params), ladder_(std::move(ladder)) {
    const double al = params_.alpha, be = params_.beta, om = params_.omega;
    const double omt = params_.omega_tilde;
    const double sq_omt = std::sqrt(omt);

    const Expr& a = ladder_.a;
    const Expr& b = ladder_.b;
    Expr ap = differentiate(a, 1);
    Expr bp = differentiate(b, 1);

    a_tilde_ = simplify(constant(sq_omt) * a);
    a_tilde_sq_ = simplify(constant(omt) * a * a);
    b_tilde_ = simplify(constant(al - be) * a * (constant(2.0) * b - ap));

    // ct = -omega (a b)' + (alpha + omega) b^2 + alpha a b' - beta a (b - a')'
    //      + beta (b - a')^2 + omega/2
    Expr ab_p = differentiate(simplify(a * b), 1);
    Expr b_minus_ap = simplify(b - ap);
    Expr b_minus_ap_p = differentiate(b_minus_ap, 1);
    c_tilde_ = simplify(constant(-om) * ab_p + constant(al + om) * b * b +
                        constant(al) * a * bp - constant(be) * a * b_minus_ap_p +
                        constant(be) * b_minus_ap * b_minus_ap + constant(om / 2.0));

    // V_plus, direct transcription
    Expr at_p = differentiate(a_tilde_, 1);
    Expr at_pp = differentiate(a_tilde_, 2);
    double p1 = (al - be) * (al - be) / omt + omt + 2.0 * (al + be);
    double q1 = omt + (al + be);
    v_plus_ = simplify(
        constant(p1) * b * (b - at_p / constant(sq_omt)) -
        constant(q1) * (a_tilde_ * bp / constant(sq_omt)) +
        constant((al + be) / (2.0 * omt)) * a_tilde_ * at_pp +
        constant(((al - be) * (al - be) / omt + 2.0 * (al + be)) / (4.0 * omt)) * at_p * at_p +
        constant((omt + al + be) / 2.0));

    Expr bt_p = differentiate(b_tilde_, 1);
    v_plus_sim_ = simplify(c_tilde_ + b_tilde_ * b_tilde_ / (constant(4.0) * a_tilde_sq_) -
                           bt_p / constant(2.0));
}

BandedOperator SwansonModel::nonhermitian_matrix(const Grid& g) const {
    Field ct = sample(c_tilde_, g, ladder_.params);
    BandedOperator h = sturm_liouville_matrix(a_tilde_sq_, ct, g, ladder_.params);
    Field bt = sample(b_tilde_, g, ladder_.params);
    const double inv2h = 1.0 / (2.0 * g.h);
    double bmax = 0.0;
    for (int i = 0; i < g.n; ++i) bmax = std::max(bmax, std::fabs(bt[i]));
    if (bmax == 0.0) return h;  // alpha == beta collapse: H equals h exactly
    for (int i = 0; i < g.n; ++i) {
        if (i + 1 < g.n) h.diagonal(+1)[i] += bt[i] * inv2h;
        if (i - 1 >= 0) h.diagonal(-1)[i] -= bt[i] * inv2h;
    }
    h.set_symmetric_flag(false);
    return h;
}

BandedOperator SwansonModel::hermitian_matrix(const Grid& g) const {
    Field vp = sample(v_plus_, g, ladder_.params);
    return sturm_liouville_matrix(a_tilde_sq_, vp, g, ladder_.params);
}

Field SwansonModel::rho_weight(const Grid& g) const {
    Expr integrand = simplify(b_tilde_ / a_tilde_sq_);
    // 3-point Gauss-Legendre per cell, cumulative from the first grid point
    static const double gl_node = std::sqrt(3.0 / 5.0);
    static const double gl_w0 = 8.0 / 9.0, gl_w1 = 5.0 / 9.0;
    std::vector<double> logrho(g.n);
    logrho[0] = 0.0;
    double acc = 0.0;
    for (int i = 1; i < g.n; ++i) {
        double xm = 0.5 * (g.point(i - 1) + g.point(i));
        double half = 0.5 * g.h;
        double s = gl_w0 * evaluate(integrand, xm, ladder_.params) +
                   gl_w1 * evaluate(integrand, xm - gl_node * half, ladder_.params) +
                   gl_w1 * evaluate(integrand, xm + gl_node * half, ladder_.params);
        acc += half * s;
        double lr = -0.5 * acc;
        if (std::fabs(lr) > 700.0)
            throw std::runtime_error(
                "rho_weight: |log rho| exceeds 700; truncate the domain (tighter x_min/x_max) to "
                "keep the weight representable");
        logrho[i] = lr;
    }
    std::vector<double> rho(g.n);
    for (int i = 0; i < g.n; ++i) rho[i] = std::exp(logrho[i]);
    return Field(g, std::move(rho));
}

double SwansonModel::metric_residual(const Grid& g, int buffer) const {
    BandedOperator h = nonhermitian_matrix(g);
    Field rho = rho_weight(g);
    std::vector<double> zeta(g.n);
    for (int i = 0; i < g.n; ++i) zeta[i] = rho[i] * rho[i];
    BandedOperator conj = conjugate_by_weight(h, Field(g, std::move(zeta)));
    BandedOperator residual = subtract(conj, transpose(h));
    return action_residual(residual, h, buffer);
}

}  // namespace swb
