#pragma once

// The generalized Swanson model on a ladder operator eta = a d/dx + b:
// non-Hermitian operator H = -d/dx at^2 d/dx + bt d/dx + ct, the positive
// weight rho removing the first-derivative term, the equivalent Hermitian
// operator with potential V_plus, and the metric pseudo-Hermiticity check.

#include "swb/operators.hpp"

namespace swb {

struct SwansonParams {
    SwansonParams(double omega, double alpha, double beta);

    double omega;
    double alpha;
    double beta;
    double omega_tilde;  // omega - alpha - beta, > 0 enforced
};

class SwansonModel {
public:
    SwansonModel(SwansonParams params, LadderSpec ladder);

    const SwansonParams& params() const { return params_; }
    const LadderSpec& ladder() const { return ladder_; }
    const Bindings& bindings() const { return ladder_.params; }

    // coefficient functions: (at^2, bt, ct); bt is built in the factored form
    // (alpha - beta) a (2b - a'), which vanishes identically at alpha == beta
    const Expr& a_tilde() const { return a_tilde_; }
    const Expr& a_tilde_sq() const { return a_tilde_sq_; }
    const Expr& b_tilde() const { return b_tilde_; }
    const Expr& c_tilde() const { return c_tilde_; }

    // equivalent Hermitian potential V_plus (direct transcription)
    const Expr& hermitian_potential() const { return v_plus_; }
    // independent route: ct + bt^2/(4 at^2) - bt'/2, from conjugating H by rho
    const Expr& hermitian_potential_similarity_route() const { return v_plus_sim_; }

    BandedOperator nonhermitian_matrix(const Grid& g) const;
    BandedOperator hermitian_matrix(const Grid& g) const;

    // rho = exp(-1/2 int bt/at^2), normalized so rho(x_1) = 1. The integral
    // is accumulated per grid cell with 3-point Gauss-Legendre on the
    // symbolic integrand. Fails with a domain-truncation hint if |log rho|
    // exceeds 700 anywhere.
    Field rho_weight(const Grid& g) const;

    // Probe-action norm of D(rho^2) H D(rho^2)^-1 - H^T, normalized by the
    // probe-action norm of H; O(h^2) under refinement.
    double metric_residual(const Grid& g, int buffer = kDefaultBoundaryBuffer) const;

private:
    SwansonParams params_;
    LadderSpec ladder_;
    Expr a_tilde_, a_tilde_sq_, b_tilde_, c_tilde_, v_plus_, v_plus_sim_;
};

}  // namespace swb
