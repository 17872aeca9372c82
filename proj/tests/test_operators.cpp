#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "swb/operators.hpp"
#include "swb/spectral.hpp"

using namespace swb;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("ladder stencil rows") {
    Grid g(0.5, 2.0, 30);
    LadderSpec s{parse("x^2"), parse("0"), {}};
    BandedOperator eta = ladder_matrix(s, g);
    double inv2h = 1.0 / (2.0 * g.h);
    for (int i = 1; i + 1 < g.n; ++i) {
        double xi = g.point(i);
        CHECK(eta.entry_at(i, -1) == doctest::Approx(-xi * xi * inv2h));
        CHECK(eta.entry_at(i, 0) == 0.0);
        CHECK(eta.entry_at(i, +1) == doctest::Approx(xi * xi * inv2h));
    }
}

TEST_CASE("derivative of a linear field is 1 away from the boundary") {
    Grid g(0.0, 1.0, 50);
    LadderSpec s{parse("1"), parse("0"), {}};
    BandedOperator eta = ladder_matrix(s, g);
    std::vector<double> f = sample(parse("x"), g).values();
    std::vector<double> out = eta.apply(f);
    for (int i = 1; i + 1 < g.n; ++i) CHECK(out[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("adjoint ladder is the exact transpose") {
    Grid g(-3.0, 3.0, 40);
    LadderSpec s{parse("1 + 0.1*x^2"), parse("sin(x)"), {}};
    BandedOperator eta = ladder_matrix(s, g, LadderSide::Eta);
    BandedOperator etat = ladder_matrix(s, g, LadderSide::EtaAdjoint);
    BandedOperator tr = transpose(eta);
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o) CHECK(etat.entry_at(i, o) == tr.entry_at(i, o));
    // involution, bitwise
    BandedOperator back = transpose(tr);
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o) CHECK(back.entry_at(i, o) == eta.entry_at(i, o));
}

TEST_CASE("oscillator ladder commutator rows sum to one") {
    Grid g(-6.0, 6.0, 200);
    LadderSpec s{constant(kInvSqrt2), simplify(parse("x") * constant(kInvSqrt2)), {}};
    BandedOperator eta = ladder_matrix(s, g);
    BandedOperator etat = ladder_matrix(s, g, LadderSide::EtaAdjoint);
    BandedOperator comm = subtract(compose(eta, etat), compose(etat, eta));
    // the commutator acts as multiplication by 1 on smooth fields
    for (int i = 2; i + 2 < g.n; ++i) {
        double row = 0.0;
        for (int o = -2; o <= 2; ++o) row += comm.entry_at(i, o);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("commutator symbol examples") {
    LadderSpec osc{constant(kInvSqrt2), simplify(parse("x") * constant(kInvSqrt2)), {}};
    Expr c1 = commutator_symbol(osc);
    CHECK(evaluate(c1, 0.37) == doctest::Approx(1.0).epsilon(1e-14));

    LadderSpec lin{parse("1"), parse("x"), {}};
    CHECK(evaluate(commutator_symbol(lin), 2.5) == doctest::Approx(2.0).epsilon(1e-14));

    LadderSpec iso{parse("x^2"), parse("1/x + c*x/(x^2+d)"), {{"c", 1.3}, {"d", 0.7}}};
    Expr sym = commutator_symbol(iso);
    for (double x : {0.4, 1.0, 2.2}) {
        double c = 1.3, d = 0.7;
        double expect = -2.0 - 2.0 * x * x +
                        2.0 * c * x * x * (d - x * x) / std::pow(x * x + d, 2);
        CHECK(evaluate(sym, x, iso.params) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("commutator residual converges at second order") {
    LadderSpec osc{constant(kInvSqrt2), simplify(parse("x") * constant(kInvSqrt2)), {}};
    double r1 = commutator_residual(osc, Grid(-8.0, 8.0, 1000));
    double r2 = commutator_residual(osc, Grid(-8.0, 8.0, 2001));
    CHECK(r1 / r2 > 3.5);
    CHECK(r1 / r2 < 4.5);
}

TEST_CASE("sturm-liouville matrix is exactly symmetric") {
    Grid g(0.5, 4.0, 60);
    Field v = sample(parse("x^2 + 1/x"), g);
    BandedOperator L = sturm_liouville_matrix(parse("1 + x^2"), v, g);
    CHECK(L.symmetric_flag());
    for (int i = 0; i + 1 < g.n; ++i) CHECK(L.entry_at(i, +1) == L.entry_at(i + 1, -1));
}

TEST_CASE("sturm-liouville rejects nonpositive mass") {
    Grid g(-1.0, 1.0, 20);
    Field v = sample(parse("0"), g);
    CHECK_THROWS_AS(sturm_liouville_matrix(parse("x"), v, g), FieldError);
}

TEST_CASE("constant mass scales the kinetic band exactly") {
    Grid g(0.0, 1.0, 25);
    Field v = sample(parse("0"), g);
    BandedOperator l1 = sturm_liouville_matrix(parse("1"), v, g);
    BandedOperator l3 = sturm_liouville_matrix(parse("3"), v, g);
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o)
            CHECK(l3.entry_at(i, o) ==
                  doctest::Approx(3.0 * l1.entry_at(i, o)).epsilon(1e-15));
}

TEST_CASE("dirichlet laplacian spectrum") {
    Grid g(0.0, M_PI, 2000);
    BandedOperator L = sturm_liouville_matrix(parse("1"), sample(parse("0"), g), g);
    SpectrumResult s = eigen_symmetric(L, 4);
    for (int k = 1; k <= 4; ++k)
        CHECK(s.eigenvalues[k - 1] == doctest::Approx(k * k).epsilon(5e-3));
}

TEST_CASE("compose with identity and bandwidth bookkeeping") {
    Grid g(0.0, 1.0, 30);
    LadderSpec s{parse("1"), parse("x"), {}};
    BandedOperator eta = ladder_matrix(s, g);
    BandedOperator id = BandedOperator::identity(g);
    BandedOperator same = compose(id, eta);
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o) CHECK(same.entry_at(i, o) == eta.entry_at(i, o));
    BandedOperator prod = compose(eta, eta);
    CHECK(prod.half_bandwidth() == 2);
    CHECK(compose(prod, prod).half_bandwidth() == 4);
}

TEST_CASE("compose rejects grid mismatch") {
    LadderSpec s{parse("1"), parse("0"), {}};
    BandedOperator a = ladder_matrix(s, Grid(0.0, 1.0, 20));
    BandedOperator b = ladder_matrix(s, Grid(0.0, 2.0, 20));
    CHECK_THROWS(compose(a, b));
}

TEST_CASE("product with the transpose is positive semidefinite") {
    Grid g(-2.0, 2.0, 80);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BandedOperator x(g, 1, false);
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o)
            if (i + o >= 0 && i + o < g.n) x.set_entry(i, o, u(rng));
    BandedOperator gram = symmetrize(compose(transpose(x), x));
    SpectrumResult s = eigen_symmetric(gram, 1);
    CHECK(s.eigenvalues[0] >= -1e-10 * gram.inf_norm());
}

TEST_CASE("conjugation by a unit weight is the identity map") {
    Grid g(0.0, 1.0, 25);
    LadderSpec s{parse("1"), parse("x"), {}};
    BandedOperator a = ladder_matrix(s, g);
    Field w = sample(parse("1"), g);
    BandedOperator c = conjugate_by_weight(a, w);
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o) CHECK(c.entry_at(i, o) == a.entry_at(i, o));
}

TEST_CASE("conjugation is an exact similarity") {
    Grid g(-4.0, 4.0, 400);
    BandedOperator L = sturm_liouville_matrix(parse("1"), sample(parse("x^2"), g), g);
    Field w = sample(parse("exp(0.2*x)"), g);
    BandedOperator m = conjugate_by_weight(L, w);
    // recover the symmetric operator by the inverse weight and compare spectra
    std::vector<double> winv(g.n);
    for (int i = 0; i < g.n; ++i) winv[i] = 1.0 / w[i];
    SpectrumResult via = eigen_via_similarity(m, Field(g, winv), 4);
    SpectrumResult direct = eigen_symmetric(L, 4);
    for (int j = 0; j < 4; ++j)
        CHECK(via.eigenvalues[j] ==
              doctest::Approx(direct.eigenvalues[j]).epsilon(1e-10));
}

TEST_CASE("transpose of a conjugated symmetric matrix equals conjugation by the inverse") {
    Grid g(0.0, 2.0, 40);
    BandedOperator L = sturm_liouville_matrix(parse("1"), sample(parse("x"), g), g);
    Field w = sample(parse("exp(x)"), g);
    std::vector<double> winv(g.n);
    for (int i = 0; i < g.n; ++i) winv[i] = 1.0 / w[i];
    BandedOperator lhs = transpose(conjugate_by_weight(L, w));
    BandedOperator rhs = conjugate_by_weight(L, Field(g, winv));
    for (int i = 0; i < g.n; ++i)
        for (int o = -1; o <= 1; ++o)
            CHECK(lhs.entry_at(i, o) == doctest::Approx(rhs.entry_at(i, o)).epsilon(1e-14));
}

TEST_CASE("conjugation rejects nonpositive weights") {
    Grid g(-1.0, 1.0, 5);
    BandedOperator id = BandedOperator::identity(g);
    CHECK_THROWS_AS(conjugate_by_weight(id, sample(parse("x"), g)), FieldError);
}

TEST_CASE("matrix dump lists one line per diagonal") {
    Grid g(0.0, 1.0, 4);
    BandedOperator id = BandedOperator::identity(g);
    std::ostringstream os;
    id.dump(os);
    CHECK(os.str() == "offset 0: 1 1 1 1\n");
}
