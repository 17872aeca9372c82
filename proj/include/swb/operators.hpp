#pragma once

// Discrete first-order ladder operators and Sturm-Liouville operators, plus
// the probe-field residual metric shared by all operator-identity checks.

#include "swb/banded.hpp"

namespace swb {

// eta = a d/dx + b. The discrete adjoint of eta is defined as the exact
// matrix transpose of its discretization (not a re-discretization of the
// analytic adjoint -a d/dx + (b - a')), so factorization identities hold
// at the matrix level.
struct LadderSpec {
    Expr a;
    Expr b;
    Bindings params;
};

enum class LadderSide { Eta, EtaAdjoint };

// eta: central-difference first derivative plus diagonal b, Dirichlet
// closure; eta-adjoint: exact transpose of the eta matrix.
BandedOperator ladder_matrix(const LadderSpec& s, const Grid& g,
                             LadderSide side = LadderSide::Eta);

// -d/dx mass d/dx + V with half-point mass sampling; exactly symmetric.
BandedOperator sturm_liouville_matrix(const Expr& mass, const Field& potential, const Grid& g,
                                      const Bindings& params = {});

// [eta, eta-adjoint] = 2 a b' - a a'' as an Expr, built via differentiate.
Expr commutator_symbol(const LadderSpec& s);

// Deterministic smooth probe fields (gaussian bump and two modulations),
// effectively supported away from the Dirichlet boundary.
std::vector<std::vector<double>> probe_fields(const Grid& g);

// Residuals of operator identities are measured through the action on the
// probe set: max interior |(R p)_i| over probes p, normalized by the same
// quantity for a reference operator. Rows within `buffer` of either end are
// excluded (Dirichlet closure pollutes edge rows of compositions).
double action_residual(const BandedOperator& residual, const BandedOperator& reference,
                       int buffer = 5);

// Same numerator with an externally supplied normalization.
double action_max(const BandedOperator& op, int buffer = 5);

// Probe-action defect of the discrete commutator eta eta^T - eta^T eta
// against the sampled symbol 2 a b' - a a''; O(h^2) under refinement.
double commutator_residual(const LadderSpec& s, const Grid& g, int buffer = 5);

constexpr int kDefaultBoundaryBuffer = 5;

}  // namespace swb
