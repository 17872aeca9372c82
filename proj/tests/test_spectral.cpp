#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "swb/operators.hpp"
#include "swb/spectral.hpp"

using namespace swb;

namespace {

BandedOperator schroedinger(const Grid& g, const std::string& potential,
                            const std::string& mass = "1") {
    return sturm_liouville_matrix(parse(mass), sample(parse(potential), g), g);
}

}  // namespace

TEST_CASE("harmonic oscillator levels") {
    // n = 4000: the n = 2000 grid leaves level 9 about 2.6e-4 off, beyond
    // the 1e-4 target (second-order truncation; see the convergence test)
    Grid g(-10.0, 10.0, 4000);
    SpectrumResult s = eigen_symmetric(schroedinger(g, "x^2"), 5);
    for (int n = 0; n < 5; ++n)
        CHECK(std::fabs(s.eigenvalues[n] - (2.0 * n + 1.0)) < 1e-4);
}

TEST_CASE("empty and invalid requests") {
    Grid g(0.0, 1.0, 50);
    BandedOperator L = schroedinger(g, "0");
    SpectrumResult s = eigen_symmetric(L, 0);
    CHECK(s.eigenvalues.empty());
    CHECK_THROWS(eigen_symmetric(L, 51));
    BandedOperator ns(g, 1, false);
    CHECK_THROWS(eigen_symmetric(ns, 1));
}

TEST_CASE("sturm counts are monotone and bracket the spectrum") {
    Grid g(-5.0, 5.0, 300);
    BandedOperator L = schroedinger(g, "x^2");
    SpectrumResult s = eigen_symmetric(L, 6);
    double prev = -1e9;
    int last = -1;
    for (double lambda : {-10.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 1e5}) {
        int c = sturm_count(L, lambda);
        CHECK(c >= last);
        last = c;
        (void)prev;
    }
    // each returned eigenvalue is certified by counts on both sides
    double scale = L.inf_norm();
    for (int j = 0; j < 6; ++j) {
        double ev = s.eigenvalues[j];
        CHECK(sturm_count(L, ev - 1e-10 * scale) <= j);
        CHECK(sturm_count(L, ev + 1e-10 * scale) >= j + 1);
    }
}

TEST_CASE("eigenvector residuals pass the acceptance bound") {
    Grid g(-8.0, 8.0, 800);
    BandedOperator L = schroedinger(g, "x^2");
    SpectrumResult s = eigen_symmetric(L, 3, true);
    REQUIRE(s.residuals.size() == 3);
    for (double r : s.residuals) CHECK(r <= 1e-8);
}

TEST_CASE("pentadiagonal operators go through the dense path") {
    Grid g(-5.0, 5.0, 240);
    BandedOperator L = schroedinger(g, "x^2");
    BandedOperator L2 = symmetrize(compose(L, L));
    SpectrumResult s = eigen_symmetric(L2, 3);
    CHECK(s.method == "householder+sturm-bisection");
    // spectrum of H^2 is the square of the spectrum of H, up to the bracket
    // width of the large-scale problem (1e-13 * gershgorin bound)
    SpectrumResult base = eigen_symmetric(L, 3);
    double tol = 1e-12 * L2.inf_norm();
    for (int j = 0; j < 3; ++j)
        CHECK(std::fabs(s.eigenvalues[j] - base.eigenvalues[j] * base.eigenvalues[j]) <= tol);
}

TEST_CASE("dense path refuses very large pentadiagonal problems") {
    Grid g(-5.0, 5.0, 3100);
    BandedOperator L = schroedinger(g, "x^2");
    BandedOperator L2 = symmetrize(compose(L, L));
    CHECK_THROWS(eigen_symmetric(L2, 2));
}

TEST_CASE("similarity spectra: identity weight equals the symmetric path") {
    Grid g(-6.0, 6.0, 500);
    BandedOperator L = schroedinger(g, "x^2");
    Field one = sample(parse("1"), g);
    SpectrumResult a = eigen_via_similarity(L, one, 4);
    SpectrumResult b = eigen_symmetric(L, 4);
    for (int j = 0; j < 4; ++j)
        CHECK(a.eigenvalues[j] == doctest::Approx(b.eigenvalues[j]).epsilon(1e-13));
}

TEST_CASE("similarity spectra: wrong weight raises a symmetrization error") {
    Grid g(-6.0, 6.0, 300);
    BandedOperator L = schroedinger(g, "x^2");
    Field w = sample(parse("exp(0.5*x)"), g);
    BandedOperator m = conjugate_by_weight(L, w);
    Field wrong = sample(parse("exp(0.1*x^2)"), g);
    CHECK_THROWS_AS(eigen_via_similarity(m, wrong, 3), SymmetrizationError);
}

TEST_CASE("spectrum comparison with one missing edge state") {
    SpectrumResult s1, s2;
    s1.eigenvalues = {-1.0, 1.0, 3.0, 5.0, 7.0};
    s2.eigenvalues = {1.0, 3.0, 5.0, 7.0};
    SpectrumComparison c = spectrum_compare(s1, s2, 1e-9, 1);
    CHECK(c.skipped_first == 1);
    CHECK(c.skipped_second == 0);
    CHECK(c.within_tol);
    CHECK(c.matched.size() == 4);
    // index-aligned offsets expose the constant gap
    for (double off : c.index_offsets) CHECK(off == doctest::Approx(2.0));
}

TEST_CASE("spectrum comparison of identical and disjoint lists") {
    SpectrumResult s1, s2;
    s1.eigenvalues = {1.0, 2.0, 3.0};
    s2.eigenvalues = {1.0, 2.0, 3.0};
    SpectrumComparison same = spectrum_compare(s1, s2, 1e-12, 0);
    CHECK(same.within_tol);
    CHECK(same.max_matched_deviation == 0.0);

    s2.eigenvalues = {100.0, 200.0, 300.0};
    SpectrumComparison disjoint = spectrum_compare(s1, s2, 1e-3, 1);
    CHECK_FALSE(disjoint.within_tol);
    CHECK(disjoint.max_matched_deviation > 1.0);
}

TEST_CASE("convergence study estimates second order") {
    std::vector<Grid> grids = {Grid(-10.0, 10.0, 1000), Grid(-10.0, 10.0, 2000),
                               Grid(-10.0, 10.0, 4000)};
    ConvergenceReport rep = convergence_study(
        [&](const Grid& g) { return schroedinger(g, "x^2"); }, grids, 5);
    for (double p : rep.orders) {
        CHECK(p > 1.7);
        CHECK(p < 2.3);
    }
}

TEST_CASE("convergence study input validation") {
    std::vector<Grid> two = {Grid(0.0, 1.0, 100), Grid(0.0, 1.0, 200)};
    CHECK_THROWS(convergence_study([](const Grid& g) {
        return sturm_liouville_matrix(parse("1"), sample(parse("0"), g), g);
    }, two, 2));
    std::vector<Grid> shifted = {Grid(0.0, 1.0, 100), Grid(0.0, 2.0, 200), Grid(0.0, 1.0, 400)};
    CHECK_THROWS(convergence_study([](const Grid& g) {
        return sturm_liouville_matrix(parse("1"), sample(parse("0"), g), g);
    }, shifted, 2));
}
