#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "swb/spectral.hpp"
#include "swb/swanson.hpp"

using namespace swb;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SwansonModel oscillator_ladder(double omega, double alpha, double beta) {
    LadderSpec l{constant(kInvSqrt2), simplify(parse("x") * constant(kInvSqrt2)), {}};
    return SwansonModel(SwansonParams(omega, alpha, beta), l);
}

}  // namespace

TEST_CASE("omega_tilde must be positive") {
    CHECK_THROWS(SwansonParams(1.0, 0.6, 0.5));
    SwansonParams ok(1.0, 0.1, -0.1);
    CHECK(ok.omega_tilde == doctest::Approx(1.0));
}

TEST_CASE("oscillator coefficients") {
    SwansonModel m = oscillator_ladder(1.0, 0.0, 0.0);
    CHECK(evaluate(m.a_tilde_sq(), 1.7) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(is_constant(m.b_tilde(), 0.0));  // alpha == beta collapses symbolically
    for (double x : {0.0, 0.5, 2.0})
        CHECK(evaluate(m.c_tilde(), x) == doctest::Approx(x * x / 2.0).epsilon(1e-13));
}

TEST_CASE("alpha == beta collapses the drift for a generic ladder") {
    LadderSpec l{parse("1 + x^2"), parse("x + sin(x)"), {}};
    SwansonModel m(SwansonParams(2.0, 0.3, 0.3), l);
    CHECK(is_constant(m.b_tilde(), 0.0));
    // matrix equality: the non-Hermitian build collapses to the SL form
    Grid g(-3.0, 3.0, 60);
    BandedOperator h = m.nonhermitian_matrix(g);
    CHECK(h.symmetric_flag());
    Field rho = m.rho_weight(g);
    for (int i = 0; i < g.n; ++i) CHECK(rho[i] == 1.0);
}

TEST_CASE("isotonic-style coefficients match a hand expansion") {
    // a = x^2, b = 1/x + c x/(x^2+d) at x = 1, c = d = 1
    LadderSpec l{parse("x^2"), parse("1/x + c*x/(x^2+d)"), {{"c", 1.0}, {"d", 1.0}}};
    SwansonModel m(SwansonParams(1.3, 0.2, 0.1), l);
    const double al = 0.2, be = 0.1, om = 1.3, omt = 1.0;
    const double x = 1.0;
    // b~ = (al-be) a (2b - a')
    double a = x * x, b = 1.0 / x + x / (x * x + 1.0), ap = 2.0 * x;
    double expect_bt = (al - be) * a * (2.0 * b - ap);
    CHECK(evaluate(m.b_tilde(), x, l.params) == doctest::Approx(expect_bt).epsilon(1e-12));
    CHECK(evaluate(m.a_tilde_sq(), x, l.params) == doctest::Approx(omt * a * a).epsilon(1e-12));
    // c~ by direct substitution
    double bp = -1.0 / (x * x) + (1.0 - x * x) / std::pow(x * x + 1.0, 2);
    double abp = 1.0 + 1.0 * (x * x * x * x + 3.0 * x * x) / std::pow(x * x + 1.0, 2);
    double bma = b - ap, bmap = bp - 2.0;
    double expect_ct = -om * abp + (al + om) * b * b + al * a * bp - be * a * bmap +
                       be * bma * bma + om / 2.0;
    CHECK(evaluate(m.c_tilde(), x, l.params) == doctest::Approx(expect_ct).epsilon(1e-10));
}

TEST_CASE("oscillator hermitian potential reduces to a pure quadratic") {
    // the x^2 coefficient combines to (omega^2 - 4 alpha beta)/(2 omega~)
    SwansonModel m = oscillator_ladder(1.0, 0.1, -0.1);
    double coef = (1.0 - 4.0 * 0.1 * (-0.1)) / (2.0 * 1.0);
    for (double x : {0.0, 1.0, 2.5})
        CHECK(evaluate(m.hermitian_potential(), x) ==
              doctest::Approx(coef * x * x).epsilon(1e-12));
}

TEST_CASE("alpha = beta = 0 reduction of the hermitian potential") {
    LadderSpec l{parse("1 + 0.3*x^2"), parse("x"), {}};
    SwansonModel m(SwansonParams(1.4, 0.0, 0.0), l);
    // omega [b (b - a') - a b'] + omega/2
    for (double x : {0.2, 1.1}) {
        double a = 1.0 + 0.3 * x * x, ap = 0.6 * x, b = x, bp = 1.0;
        double expect = 1.4 * (b * (b - ap) - a * bp) + 0.7;
        CHECK(evaluate(m.hermitian_potential(), x) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("direct potential agrees with the similarity route") {
    SwansonModel m = oscillator_ladder(1.0, 0.15, -0.05);
    for (double x : {0.0, 0.7, 1.9})
        CHECK(evaluate(m.hermitian_potential(), x) ==
              doctest::Approx(evaluate(m.hermitian_potential_similarity_route(), x))
                  .epsilon(1e-11));
    LadderSpec iso{parse("x^2"), parse("1/x + c*x/(x^2+d)"), {{"c", 0.8}, {"d", 1.2}}};
    SwansonModel m2(SwansonParams(1.2, 0.2, 0.05), iso);
    for (double x : {0.5, 1.0, 2.0})
        CHECK(evaluate(m2.hermitian_potential(), x, iso.params) ==
              doctest::Approx(evaluate(m2.hermitian_potential_similarity_route(), x, iso.params))
                  .epsilon(1e-10));
}

TEST_CASE("symmetric couplings give the shifted oscillator ladder spectrum") {
    // omega (eta^T eta + 1/2) with a canonical ladder: levels omega (n + 1/2)
    SwansonModel m = oscillator_ladder(1.0, 0.0, 0.0);
    Grid g(-10.0, 10.0, 2000);
    BandedOperator h = m.nonhermitian_matrix(g);
    REQUIRE(h.symmetric_flag());
    SpectrumResult s = eigen_symmetric(h, 4);
    for (int n = 0; n < 4; ++n)
        CHECK(std::fabs(s.eigenvalues[n] - (n + 0.5)) < 1e-4);
}

TEST_CASE("symmetric couplings collapse the two matrix routes") {
    LadderSpec l{parse("1 + 0.2*x^2"), parse("x"), {}};
    SwansonModel m(SwansonParams(1.5, 0.2, 0.2), l);
    Grid g(-4.0, 4.0, 200);
    BandedOperator direct = m.nonhermitian_matrix(g);
    BandedOperator herm = m.hermitian_matrix(g);
    double scale = herm.max_abs_entry();
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o)
            CHECK(std::fabs(direct.entry_at(i, o) - herm.entry_at(i, o)) <= 1e-12 * scale);
}

TEST_CASE("nonhermitian matrix symmetry tracks the coupling asymmetry") {
    Grid g(-6.0, 6.0, 200);
    BandedOperator sym = oscillator_ladder(1.0, 0.2, 0.2).nonhermitian_matrix(g);
    CHECK(sym.asymmetry() == 0.0);
    BandedOperator ns = oscillator_ladder(1.0, 0.2, -0.2).nonhermitian_matrix(g);
    CHECK(ns.asymmetry() > 0.0);
}

TEST_CASE("oscillator weight is a gaussian in x") {
    SwansonModel m = oscillator_ladder(1.0, 0.1, -0.1);
    Grid g(-5.0, 5.0, 400);
    Field rho = m.rho_weight(g);
    double s = 0.2, x1 = g.point(0);
    for (int i = 0; i < g.n; i += 37) {
        double x = g.point(i);
        double expect = std::exp(-s * (x * x - x1 * x1) / 2.0);
        CHECK(rho[i] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("weight overflow suggests domain truncation") {
    SwansonModel m = oscillator_ladder(1.0, 0.45, -0.45);
    CHECK_THROWS_WITH_AS(static_cast<void>(m.rho_weight(Grid(-90.0, 90.0, 4000))),
                         doctest::Contains("truncate the domain"), std::runtime_error);
}

TEST_CASE("oscillator spectra: nonhermitian via similarity vs hermitian matrix") {
    SwansonModel m = oscillator_ladder(1.0, 0.1, -0.1);
    Grid g(-10.0, 10.0, 2000);
    BandedOperator h = m.hermitian_matrix(g);
    Field rho = m.rho_weight(g);
    std::vector<double> inv(g.n);
    for (int i = 0; i < g.n; ++i) inv[i] = 1.0 / rho[i];
    // non-Hermitian image by exact conjugation shares the spectrum to roundoff
    BandedOperator ht = conjugate_by_weight(h, Field(g, std::move(inv)));
    SpectrumResult via = eigen_via_similarity(ht, rho, 5);
    SpectrumResult direct = eigen_symmetric(h, 5);
    for (int j = 0; j < 5; ++j)
        CHECK(via.eigenvalues[j] ==
              doctest::Approx(direct.eigenvalues[j]).epsilon(1e-12));
}

TEST_CASE("independent discretization matches the conjugated one at second order") {
    SwansonModel m = oscillator_ladder(1.0, 0.1, -0.1);
    auto interior_gap = [&](int n) {
        Grid g(-10.0, 10.0, n);
        BandedOperator direct = m.nonhermitian_matrix(g);
        Field rho = m.rho_weight(g);
        std::vector<double> inv(g.n);
        for (int i = 0; i < g.n; ++i) inv[i] = 1.0 / rho[i];
        BandedOperator conj = conjugate_by_weight(m.hermitian_matrix(g), Field(g, std::move(inv)));
        return action_residual(subtract(direct, conj), direct);
    };
    double r1 = interior_gap(1000), r2 = interior_gap(2000);
    CHECK(r1 / r2 > 3.3);
    CHECK(r1 / r2 < 4.7);
}

TEST_CASE("metric residual vanishes for alpha == beta") {
    SwansonModel m = oscillator_ladder(1.0, 0.2, 0.2);
    CHECK(m.metric_residual(Grid(-6.0, 6.0, 300)) <= 1e-15);
}

TEST_CASE("metric residual converges at second order") {
    SwansonModel m = oscillator_ladder(1.0, 0.1, -0.1);
    double r1 = m.metric_residual(Grid(-10.0, 10.0, 1000));
    double r2 = m.metric_residual(Grid(-10.0, 10.0, 2000));
    CHECK(r1 / r2 > 3.5);
    CHECK(r1 / r2 < 4.5);
}

TEST_CASE("metric residual of an arbitrary small model is finite") {
    LadderSpec l{parse("1 + 0.1*x^2"), parse("x + 0.2*sin(x)"), {}};
    SwansonModel m(SwansonParams(1.5, 0.2, -0.1), l);
    double r = m.metric_residual(Grid(-4.0, 4.0, 300));
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
}
