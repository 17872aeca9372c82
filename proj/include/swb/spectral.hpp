#pragma once

// Symmetric eigensolvers (Sturm-sequence bisection on tridiagonal form),
// spectra of pseudo-Hermitian operators via diagonal similarity, spectrum
// comparison and convergence studies.

#include <functional>
#include <optional>
#include <string>

#include "swb/banded.hpp"

namespace swb {

struct SpectrumResult {
    std::vector<double> eigenvalues;  // sorted ascending
    int k = 0;
    Grid grid{0.0, 1.0, 3};
    std::string method;
    std::vector<double> residuals;               // per-pair ||Av - lv|| / (||A|| ||v||)
    std::vector<std::vector<double>> eigenvectors;  // opt-in
};

struct SymmetrizationError : std::runtime_error {
    SymmetrizationError(double asym, double tol)
        : std::runtime_error("similarity conjugation is not symmetric: asymmetry " +
                             std::to_string(asym) + " exceeds tolerance " + std::to_string(tol)),
          asymmetry(asym),
          tolerance(tol) {}
    double asymmetry;
    double tolerance;
};

// k lowest eigenvalues of a symmetric banded operator. Tridiagonal input is
// solved by bisection with Sturm-sequence counting; wider bands are reduced
// densely (Householder) for n <= 3000 and rejected above that. Eigenvectors
// (inverse iteration, 3 steps) are opt-in.
SpectrumResult eigen_symmetric(const BandedOperator& a, int k, bool want_vectors = false);

// Number of eigenvalues of a symmetric tridiagonal operator strictly below
// lambda (Sturm count). Certified, exact in exact arithmetic.
int sturm_count(const BandedOperator& a, double lambda);

// Spectrum of D(rho) A D(rho)^-1 after verifying it is symmetric within
// 1e-8 * ||A||; raises SymmetrizationError otherwise.
SpectrumResult eigen_via_similarity(const BandedOperator& a_nonsym, const Field& rho, int k,
                                    bool want_vectors = false);

struct SpectrumComparison {
    int skipped_first = 0;   // unmatched edge states dropped from list 1
    int skipped_second = 0;  // and from list 2
    double max_matched_deviation = 0.0;
    bool within_tol = false;
    std::vector<std::pair<double, double>> matched;
    std::vector<double> index_offsets;  // s2[i] - s1[i] before edge alignment
};

// Greedy matching of sorted eigenvalue lists allowing up to `allow_missing`
// unmatched edge states in total (factorization-energy states).
SpectrumComparison spectrum_compare(const SpectrumResult& s1, const SpectrumResult& s2,
                                    double tol, int allow_missing);

struct ConvergenceReport {
    std::vector<double> orders;                   // per-eigenvalue Richardson estimate
    std::vector<std::vector<double>> eigenvalues;  // per grid
};

// Requires >= 3 grids over the same domain with spacing ratios in [1.5, 3].
ConvergenceReport convergence_study(const std::function<BandedOperator(const Grid&)>& builder,
                                    const std::vector<Grid>& grids, int k);

}  // namespace swb
