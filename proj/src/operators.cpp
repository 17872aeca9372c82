#include "swb/operators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace swb {

BandedOperator ladder_matrix(const LadderSpec& s, const Grid& g, LadderSide side) {
    Field av = sample(s.a, g, s.params);
    Field bv = sample(s.b, g, s.params);
    BandedOperator eta(g, 1, false);
    const double inv2h = 1.0 / (2.0 * g.h);
    for (int i = 0; i < g.n; ++i) {
        eta.diagonal(0)[i] = bv[i];
        if (i + 1 < g.n) eta.diagonal(+1)[i] = av[i] * inv2h;
        if (i - 1 >= 0) eta.diagonal(-1)[i] = -av[i] * inv2h;
    }
    if (side == LadderSide::EtaAdjoint) return transpose(eta);
    return eta;
}

BandedOperator sturm_liouville_matrix(const Expr& mass, const Field& potential, const Grid& g,
                                      const Bindings& params) {
    if (!(potential.grid() == g))
        throw std::invalid_argument("sturm_liouville_matrix: potential grid mismatch");
    const int n = g.n;
    const double h2 = g.h * g.h;
    // mass at half points x_min + (i + 1/2) h, i = 0..n
    std::vector<double> mh(n + 1);
    for (int i = 0; i <= n; ++i) {
        double xh = g.x_min + (i + 0.5) * g.h;
        double m = evaluate(mass, xh, params);
        if (!(m > 0.0))
            throw FieldError("sturm_liouville_matrix: nonpositive mass at half-point", i);
        mh[i] = m;
    }
    BandedOperator L(g, 1, true);
    for (int i = 0; i < n; ++i) {
        L.diagonal(0)[i] = (mh[i] + mh[i + 1]) / h2 + potential[i];
        if (i + 1 < n) {
            double off = -mh[i + 1] / h2;
            L.diagonal(+1)[i] = off;
            L.diagonal(-1)[i + 1] = off;
        }
    }
    return L;
}

Expr commutator_symbol(const LadderSpec& s) {
    Expr bp = differentiate(s.b, 1);
    Expr app = differentiate(s.a, 2);
    return simplify(constant(2.0) * s.a * bp - s.a * app);
}

std::vector<std::vector<double>> probe_fields(const Grid& g) {
    const double c = 0.5 * (g.x_min + g.x_max);
    const double w = g.x_max - g.x_min;
    std::vector<std::vector<double>> probes(3, std::vector<double>(g.n));
    for (int i = 0; i < g.n; ++i) {
        double u = 8.0 * (g.point(i) - c) / w;
        double bump = std::exp(-u * u);
        probes[0][i] = bump;
        probes[1][i] = u * bump;
        probes[2][i] = std::sin(3.0 * u) * bump;
    }
    return probes;
}

double action_max(const BandedOperator& op, int buffer) {
    auto probes = probe_fields(op.grid());
    const int n = op.size();
    int lo = buffer, hi = n - buffer;
    if (lo >= hi) throw std::invalid_argument("action_max: buffer leaves no interior rows");
    double m = 0.0;
    for (const auto& p : probes) {
        std::vector<double> out = op.apply(p);
        for (int i = lo; i < hi; ++i) m = std::max(m, std::fabs(out[i]));
    }
    return m;
}

double action_residual(const BandedOperator& residual, const BandedOperator& reference,
                       int buffer) {
    double num = action_max(residual, buffer);
    double den = action_max(reference, buffer);
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

double commutator_residual(const LadderSpec& s, const Grid& g, int buffer) {
    BandedOperator eta = ladder_matrix(s, g, LadderSide::Eta);
    BandedOperator etat = ladder_matrix(s, g, LadderSide::EtaAdjoint);
    BandedOperator comm = subtract(compose(eta, etat), compose(etat, eta));
    Field symbol = sample(commutator_symbol(s), g, s.params);
    BandedOperator diag(g, 0, true);
    BandedOperator ref(g, 0, true);
    for (int i = 0; i < g.n; ++i) {
        diag.diagonal(0)[i] = symbol[i];
        ref.diagonal(0)[i] = 1.0 + std::fabs(symbol[i]);
    }
    return action_residual(subtract(comm, diag), ref, buffer);
}

}  // namespace swb
