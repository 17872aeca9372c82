#pragma once

// Pseudo-SUSY sector: rho-conjugated supercharges theta+/-, non-Hermitian
// partners, pseudo-adjoint verification and the pseudo quasi-Hamiltonian.
// Everything here is built by exact conjugation of Hermitian-sector
// matrices, so the sector identities hold to roundoff and genuine
// discretization error stays in the Hermitian sector.

#include "swb/ssusy.hpp"
#include "swb/swanson.hpp"

namespace swb {

struct PseudoSector {
    Field rho;
    BandedOperator theta_minus;
    BandedOperator theta_plus;
    BandedOperator h_plus_nh;   // D(rho)^-1 h+ D(rho)
    BandedOperator h_minus_nh;  // D(rho)^-1 h- D(rho)
    double rho_condition = 1.0;  // max rho / min rho
};

PseudoSector build_pseudo_sector(const SwansonModel& m, const FactorPair& p, const QuasiSpec& q,
                                 const Grid& g);

// || D(rho^2)^-1 theta-^T D(rho^2) - theta+ || / || theta+ || (max-entry);
// zero up to roundoff by construction.
double pseudo_adjoint_residual(const PseudoSector& s);

// Probe-action residuals of H+ theta+ - theta+ H- and H- theta- - theta- H+.
std::pair<double, double> pseudo_intertwining_residual(const PseudoSector& s,
                                                       int buffer = kDefaultBoundaryBuffer);

// Residuals of theta+ theta- - poly(H+) and theta- theta+ - poly(H-).
std::pair<double, double> pseudo_quasi_residual(const PseudoSector& s, const QuasiSpec& q,
                                                int buffer = kDefaultBoundaryBuffer);

}  // namespace swb
