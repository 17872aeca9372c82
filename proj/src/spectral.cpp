#include "swb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swb {

namespace {

struct Tridiag {
    std::vector<double> d;  // diagonal
    std::vector<double> e;  // off-diagonal, e[i] couples i and i+1
};

Tridiag tridiag_of(const BandedOperator& a) {
    const int n = a.size();
    Tridiag t;
    t.d.resize(n);
    t.e.resize(n - 1);
    for (int i = 0; i < n; ++i) t.d[i] = a.entry_at(i, 0);
    for (int i = 0; i + 1 < n; ++i) t.e[i] = a.entry_at(i, +1);
    return t;
}

int sturm_count_td(const Tridiag& t, double lambda) {
    const int n = static_cast<int>(t.d.size());
    const double tiny = 1e-300;
    int count = 0;
    double q = t.d[0] - lambda;
    if (q < 0) ++count;
    for (int i = 1; i < n; ++i) {
        if (q == 0.0) q = tiny;
        q = t.d[i] - lambda - t.e[i - 1] * t.e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

std::pair<double, double> gershgorin(const Tridiag& t) {
    const int n = static_cast<int>(t.d.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::fabs(t.e[i - 1]);
        if (i + 1 < n) r += std::fabs(t.e[i]);
        lo = std::min(lo, t.d[i] - r);
        hi = std::max(hi, t.d[i] + r);
    }
    return {lo, hi};
}

// k lowest eigenvalues by bisection; each bracket closes to <= 1e-13 * scale.
std::vector<double> bisect_lowest(const Tridiag& t, int k) {
    auto [glo, ghi] = gershgorin(t);
    double scale = std::max({std::fabs(glo), std::fabs(ghi), 1.0});
    const double width_tol = 1e-13 * scale;
    std::vector<double> ev(k);
    for (int j = 0; j < k; ++j) {
        double lo = glo, hi = ghi;
        while (hi - lo > width_tol) {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            if (sturm_count_td(t, mid) <= j)
                lo = mid;
            else
                hi = mid;
        }
        ev[j] = 0.5 * (lo + hi);
    }
    return ev;
}

// Householder reduction of a dense symmetric matrix to tridiagonal form
// (eigenvalues only).
Tridiag householder_tridiag(std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    Tridiag t;
    t.d.assign(n, 0.0);
    t.e.assign(n > 1 ? n - 1 : 0, 0.0);
    std::vector<double> p(n), q(n);
    for (int k = 0; k < n - 2; ++k) {
        double sigma = 0.0;
        for (int i = k + 1; i < n; ++i) sigma += a[i][k] * a[i][k];
        if (sigma == 0.0) continue;
        double alpha = std::sqrt(sigma);
        if (a[k + 1][k] > 0) alpha = -alpha;
        double beta = sigma - alpha * a[k + 1][k];
        // v = column below diagonal with a[k+1][k] -= alpha
        std::vector<double> v(n, 0.0);
        v[k + 1] = a[k + 1][k] - alpha;
        for (int i = k + 2; i < n; ++i) v[i] = a[i][k];
        // p = A v / beta
        for (int i = k + 1; i < n; ++i) {
            double s = 0.0;
            for (int j = k + 1; j < n; ++j) s += a[i][j] * v[j];
            p[i] = s / beta;
        }
        double vp = 0.0;
        for (int i = k + 1; i < n; ++i) vp += v[i] * p[i];
        double mu = vp / (2.0 * beta);
        for (int i = k + 1; i < n; ++i) q[i] = p[i] - mu * v[i];
        // A <- A - v q^T - q v^T  (trailing block)
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j <= i; ++j) {
                double upd = a[i][j] - v[i] * q[j] - q[i] * v[j];
                a[i][j] = upd;
                a[j][i] = upd;
            }
        a[k + 1][k] = alpha;
        a[k][k + 1] = alpha;
        for (int i = k + 2; i < n; ++i) {
            a[i][k] = 0.0;
            a[k][i] = 0.0;
        }
    }
    for (int i = 0; i < n; ++i) t.d[i] = a[i][i];
    for (int i = 0; i + 1 < n; ++i) t.e[i] = a[i + 1][i];
    return t;
}

// Banded LU with partial pivoting for (A - sigma I); used by inverse
// iteration. Band storage with fill-in up to 2*bw superdiagonals.
class ShiftedBandSolver {
public:
    ShiftedBandSolver(const BandedOperator& a, double sigma)
        : n_(a.size()), bw_(a.half_bandwidth()), width_(3 * bw_ + 1), m_(n_ * width_, 0.0),
          perm_(n_) {
        for (int i = 0; i < n_; ++i) {
            for (int o = -bw_; o <= bw_; ++o) {
                int j = i + o;
                if (j < 0 || j >= n_) continue;
                at(i, j) = a.entry_at(i, o) - (o == 0 ? sigma : 0.0);
            }
            perm_[i] = i;
        }
        factor();
    }

    std::vector<double> solve(std::vector<double> b) const {
        // apply row swaps and L
        for (int k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            int rmax = std::min(n_ - 1, k + bw_);
            for (int r = k + 1; r <= rmax; ++r) b[r] -= l_[idx(r, k)] * b[k];
        }
        // back substitution
        for (int i = n_ - 1; i >= 0; --i) {
            double s = b[i];
            int jmax = std::min(n_ - 1, i + 2 * bw_);
            for (int j = i + 1; j <= jmax; ++j) s -= atc(i, j) * b[j];
            b[i] = s / atc(i, i);
        }
        return b;
    }

private:
    double& at(int i, int j) { return m_[i * width_ + (j - i + bw_)]; }
    double atc(int i, int j) const {
        int c = j - i + bw_;
        if (c < 0 || c >= width_) return 0.0;
        return m_[i * width_ + c];
    }
    int idx(int r, int k) const { return r * width_ + (k - r + bw_); }

    void factor() {
        piv_.assign(n_, 0);
        l_.assign(n_ * width_, 0.0);
        const double tiny = 1e-307;
        for (int k = 0; k < n_; ++k) {
            int pmax = std::min(n_ - 1, k + bw_);
            int p = k;
            double best = std::fabs(atc(k, k));
            for (int r = k + 1; r <= pmax; ++r)
                if (std::fabs(atc(r, k)) > best) {
                    best = std::fabs(atc(r, k));
                    p = r;
                }
            piv_[k] = p;
            if (p != k) swap_rows(k, p);
            double pivval = atc(k, k);
            if (std::fabs(pivval) < tiny) {
                at(k, k) = (pivval >= 0 ? tiny : -tiny);
                pivval = atc(k, k);
            }
            for (int r = k + 1; r <= pmax; ++r) {
                double l = atc(r, k) / pivval;
                l_[idx(r, k)] = l;
                if (l == 0.0) continue;
                int jmax = std::min(n_ - 1, k + 2 * bw_);
                for (int j = k; j <= jmax; ++j) {
                    double upd = atc(r, j) - l * atc(k, j);
                    at(r, j) = upd;
                }
            }
        }
    }

    void swap_rows(int r1, int r2) {
        int jlo = std::max(0, r1 - bw_);
        int jhi = std::min(n_ - 1, r1 + 2 * bw_);
        for (int j = jlo; j <= jhi; ++j) {
            double v1 = atc(r1, j);
            double v2 = atc(r2, j);
            int c1 = j - r1 + bw_;
            int c2 = j - r2 + bw_;
            if (c1 >= 0 && c1 < width_) m_[r1 * width_ + c1] = v2;
            if (c2 >= 0 && c2 < width_) m_[r2 * width_ + c2] = v1;
        }
    }

    int n_, bw_, width_;
    std::vector<double> m_;
    std::vector<double> l_;
    std::vector<int> perm_;
    std::vector<int> piv_;
};

std::vector<double> inverse_iteration(const BandedOperator& a, double lambda) {
    const int n = a.size();
    double shift = lambda + 1e-11 * std::max(1.0, std::fabs(lambda));
    ShiftedBandSolver lu(a, shift);
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(n));
    for (int it = 0; it < 3; ++it) {
        v = lu.solve(std::move(v));
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

double pair_residual(const BandedOperator& a, const std::vector<double>& v, double lambda) {
    std::vector<double> av = a.apply(v);
    double num = 0.0, vn = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        double r = av[i] - lambda * v[i];
        num += r * r;
        vn += v[i] * v[i];
    }
    double anorm = a.inf_norm();
    return std::sqrt(num) / (anorm * std::sqrt(vn));
}

}  // namespace

int sturm_count(const BandedOperator& a, double lambda) {
    if (a.half_bandwidth() != 1)
        throw std::invalid_argument("sturm_count: tridiagonal operator required");
    if (!a.symmetric_flag()) throw std::invalid_argument("sturm_count: symmetric input required");
    return sturm_count_td(tridiag_of(a), lambda);
}

SpectrumResult eigen_symmetric(const BandedOperator& a, int k, bool want_vectors) {
    if (!a.symmetric_flag())
        throw std::invalid_argument("eigen_symmetric: non-symmetric input");
    const int n = a.size();
    if (k > n) throw std::invalid_argument("eigen_symmetric: k exceeds matrix size");
    SpectrumResult res;
    res.k = k;
    res.grid = a.grid();
    if (k == 0) {
        res.method = "none";
        return res;
    }
    Tridiag t;
    if (a.half_bandwidth() <= 1) {
        t = tridiag_of(a);
        res.method = "sturm-bisection";
    } else {
        if (n > 3000)
            throw std::invalid_argument(
                "eigen_symmetric: dense reduction limited to n <= 3000 for banded inputs wider "
                "than tridiagonal; use a coarser grid for operator-product spectra");
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int o = -a.half_bandwidth(); o <= a.half_bandwidth(); ++o) {
                int j = i + o;
                if (j >= 0 && j < n) dense[i][j] = a.entry_at(i, o);
            }
        t = householder_tridiag(dense);
        res.method = "householder+sturm-bisection";
    }
    res.eigenvalues = bisect_lowest(t, k);
    if (want_vectors) {
        res.eigenvectors.reserve(k);
        res.residuals.reserve(k);
        for (double lambda : res.eigenvalues) {
            std::vector<double> v = inverse_iteration(a, lambda);
            res.residuals.push_back(pair_residual(a, v, lambda));
            res.eigenvectors.push_back(std::move(v));
        }
    }
    return res;
}

SpectrumResult eigen_via_similarity(const BandedOperator& a_nonsym, const Field& rho, int k,
                                    bool want_vectors) {
    BandedOperator m = conjugate_by_weight(a_nonsym, rho);
    double asym = m.asymmetry();
    double tol = 1e-8 * a_nonsym.inf_norm();
    if (asym > tol) throw SymmetrizationError(asym, tol);
    BandedOperator s = symmetrize(m);
    SpectrumResult res = eigen_symmetric(s, k, want_vectors);
    res.method = "similarity+" + res.method;
    return res;
}

SpectrumComparison spectrum_compare(const SpectrumResult& s1, const SpectrumResult& s2,
                                    double tol, int allow_missing) {
    const auto& a = s1.eigenvalues;
    const auto& b = s2.eigenvalues;
    SpectrumComparison best;
    best.max_matched_deviation = std::numeric_limits<double>::infinity();
    for (int k1 = 0; k1 <= allow_missing; ++k1) {
        for (int k2 = 0; k1 + k2 <= allow_missing; ++k2) {
            int m = std::min(static_cast<int>(a.size()) - k1, static_cast<int>(b.size()) - k2);
            if (m <= 0) continue;
            double dev = 0.0;
            for (int i = 0; i < m; ++i)
                dev = std::max(dev, std::fabs(a[k1 + i] - b[k2 + i]));
            // prefer fewer skips at equal deviation
            if (dev < best.max_matched_deviation - 1e-300 ||
                (dev <= best.max_matched_deviation && k1 + k2 < best.skipped_first + best.skipped_second)) {
                best.skipped_first = k1;
                best.skipped_second = k2;
                best.max_matched_deviation = dev;
                best.matched.clear();
                for (int i = 0; i < m; ++i) best.matched.emplace_back(a[k1 + i], b[k2 + i]);
            }
        }
    }
    if (!std::isfinite(best.max_matched_deviation)) best.max_matched_deviation = 0.0;
    best.within_tol = best.max_matched_deviation <= tol;
    int m0 = static_cast<int>(std::min(a.size(), b.size()));
    best.index_offsets.resize(m0);
    for (int i = 0; i < m0; ++i) best.index_offsets[i] = b[i] - a[i];
    return best;
}

ConvergenceReport convergence_study(const std::function<BandedOperator(const Grid&)>& builder,
                                    const std::vector<Grid>& grids, int k) {
    if (grids.size() < 3)
        throw std::invalid_argument("convergence_study: need at least 3 grids");
    for (size_t i = 1; i < grids.size(); ++i) {
        if (grids[i].x_min != grids[0].x_min || grids[i].x_max != grids[0].x_max)
            throw std::invalid_argument("convergence_study: grids must share the domain");
        double r = grids[i - 1].h / grids[i].h;
        if (r < 1.5 || r > 3.0)
            throw std::invalid_argument(
                "convergence_study: grids must form a refinement chain (spacing ratio in "
                "[1.5, 3])");
    }
    ConvergenceReport rep;
    for (const Grid& g : grids)
        rep.eigenvalues.push_back(eigen_symmetric(builder(g), k).eigenvalues);
    const size_t m = grids.size();
    double h1 = grids[m - 3].h, h2 = grids[m - 2].h, h3 = grids[m - 1].h;
    for (int j = 0; j < k; ++j) {
        double e1 = rep.eigenvalues[m - 3][j];
        double e2 = rep.eigenvalues[m - 2][j];
        double e3 = rep.eigenvalues[m - 1][j];
        double num = e1 - e2, den = e2 - e3;
        if (den == 0.0 || num / den <= 0.0) {
            rep.orders.push_back(0.0);
            continue;
        }
        double target = num / den;
        auto f = [&](double p) {
            return (std::pow(h1, p) - std::pow(h2, p)) / (std::pow(h2, p) - std::pow(h3, p));
        };
        double lo = 0.1, hi = 8.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (f(mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        rep.orders.push_back(0.5 * (lo + hi));
    }
    return rep;
}

}  // namespace swb
