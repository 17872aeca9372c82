#pragma once

// Built-in model families: the isotonic-oscillator choice (a = x^2 with a
// rational b) and the CPRS family reached through the coordinate transform
// z(x) = int dx/at. Includes parameter derivations, closed-form potentials,
// wavefunction transport, reference spectra, the Riccati equation for the
// b-correction term, and consistency audits of the closed forms. Audit
// deviations are measurements, never assertions.

#include <functional>
#include <optional>

#include "swb/ssusy.hpp"
#include "swb/swanson.hpp"

namespace swb {

// ---------------------------------------------------------------- isotonic

struct IsotonicChoice {
    double alpha = 0.0;
    double beta = 0.0;
    double c = 0.0;
    double d = 1.0;  // > 0
};

struct IsotonicParams {
    double omega_tilde;
    double p, q, r, s, t;
    double c1, c2, c3;
    double k1, k2, k3;
};

IsotonicParams derive_isotonic_params(const IsotonicChoice& ch, double omega);

// Closed-form V+ = p/x^2 + q x^2 + c (r x^2 + s)/(x^2+d)^2 + t; usable even
// when the factor pair cannot be built (p = 0 with c != 0).
Expr isotonic_potential_plus_closed(const IsotonicParams& ip, const IsotonicChoice& ch);

struct IsotonicFamily {
    SwansonModel model;
    FactorPair pair;
    IsotonicParams params;
    double lambda;  // factorization energy entering the closed forms
    Expr v_plus_closed, v_minus_closed, v_bar_closed;
    Expr rho_closed;
};

IsotonicFamily isotonic_family(const IsotonicChoice& ch, double omega, double lambda = 0.0);

struct FormulaAudit {
    std::string formula_id;
    double max_dev = 0.0;
    double argmax_x = 0.0;
};

struct AuditReport {
    std::vector<FormulaAudit> formulas;
};

// Per-formula max interior deviation between each closed form and its
// defining-formula route. The rho comparison is relative after aligning one
// global multiplicative constant; the q comparison extracts the x^2
// coefficient by least squares on the grid.
AuditReport isotonic_audit(const IsotonicChoice& ch, double omega, const Grid& g,
                           double lambda = 0.0);

// -------------------------------------------------------------------- CPRS

struct CPRSChoice {
    CPRSChoice(double kappa, double alpha);

    double kappa;   // in [0, 1)
    double alpha;   // 16 alpha^2 <= 1
    double omega_tilde;  // (1 + sqrt(1 - 16 alpha^2))/2
    double epsilon0 = -3.0;
};

// Reference potential U(y) = y^2 + 8(2y^2-1)/(2y^2+1)^2 (in the transformed
// coordinate, written in the DSL variable).
Expr cprs_reference_potential();

struct SuperpotentialSpec {
    Expr w;
    double epsilon0;
};

// W(y) = y + 4y/(2y^2+1) with factorization energy -3; satisfies
// W^2 - W' + eps0 = U pointwise.
SuperpotentialSpec cprs_superpotential();

// Route A: V+ = -(at at''/2 + at'^2/4) + U(z(x)); always self-consistent.
Expr cprs_potential_route_a(const CPRSChoice& ch);

struct CPRSFamily {
    FactorPair pair;          // transcribed b1, b2
    Expr b_closed;            // drift coefficient without the Riccati term
    Expr b1_paper, b2_paper;  // transcribed forms
    Expr v_plus_minus_paper;  // shared V+/V- closed form
    Expr v_bar_paper;
    Expr b1_exact;            // at'/2 + W(z(x)) with the exact superpotential
};

CPRSFamily cprs_family(const CPRSChoice& ch);

AuditReport cprs_audit(const CPRSChoice& ch, const Grid& g);

struct CPRSReference {
    int level;                     // 0 or >= 3
    double energy;                 // -3 + 2 n
    std::vector<double> p_coeffs;  // ascending powers of y

    double p_eval(double y) const;
    double wavefunction(double y) const;  // P_n(y) exp(-y^2/2)/(2y^2+1)
};

// Levels n = 1, 2 are absent from the family and rejected.
CPRSReference cprs_reference(int n);

// ------------------------------------------------- transforms & integration

// z(x) = cumulative trapezoid of 1/at from the first grid point.
Field coordinate_map(const Expr& a_tilde, const Grid& g, const Bindings& params = {});

struct CoordinateMapResult {
    Field z;          // aligned so z(x_1) matches the closed form
    Expr closed_form;  // x^(1-kappa)/(sqrt(omega_tilde)(1-kappa))
    double max_dev;
};

CoordinateMapResult cprs_coordinate_map(const CPRSChoice& ch, const Grid& g);

// psi(x) = phi(z(x)) / sqrt(at(x)), normalized to unit l2 norm (flat
// measure in x).
Field transport_wavefunction(const std::function<double(double)>& phi, const Field& z,
                             const Expr& a_tilde, const Bindings& params = {});

struct RiccatiResult {
    Field varrho;      // zero outside [first_valid, last_valid]
    int first_valid;   // inclusive index range of the integrated solution
    int last_valid;
    std::optional<double> blow_up_x;
    double residual;   // max centered-difference defect on the valid range
};

// 4th-order one-step integration of the correction-term equation
// r' = r^2 + 2 Wz(x) r + (3 + sqrt(omega_tilde)/2) from (x0, varrho0), both
// directions across the grid; |r| > 1e12 truncates with a flagged location.
RiccatiResult riccati_integrate(const CPRSChoice& ch, double x0, double varrho0, const Grid& g);

}  // namespace swb
