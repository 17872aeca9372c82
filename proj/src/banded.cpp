#include "swb/banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace swb {

BandedOperator::BandedOperator(Grid grid, int half_bandwidth, bool symmetric)
    : grid_(grid), bw_(half_bandwidth), symmetric_(symmetric) {
    if (bw_ < 0 || bw_ >= grid_.n)
        throw std::invalid_argument("BandedOperator: bad half bandwidth");
    diags_.assign(2 * bw_ + 1, std::vector<double>(grid_.n, 0.0));
}

BandedOperator BandedOperator::identity(const Grid& g) {
    BandedOperator id(g, 0, true);
    std::fill(id.diags_[0].begin(), id.diags_[0].end(), 1.0);
    return id;
}

void BandedOperator::set_entry(int row, int offset, double v) {
    int col = row + offset;
    if (offset < -bw_ || offset > bw_ || row < 0 || row >= grid_.n || col < 0 || col >= grid_.n)
        throw std::out_of_range("BandedOperator::set_entry outside band");
    diags_[offset + bw_][row] = v;
}

std::vector<double> BandedOperator::apply(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != grid_.n)
        throw std::invalid_argument("BandedOperator::apply: size mismatch");
    const int n = grid_.n;
    std::vector<double> out(n, 0.0);
    for (int o = -bw_; o <= bw_; ++o) {
        const std::vector<double>& d = diags_[o + bw_];
        int lo = std::max(0, -o);
        int hi = std::min(n, n - o);
        for (int i = lo; i < hi; ++i) out[i] += d[i] * v[i + o];
    }
    return out;
}

BandedOperator BandedOperator::scaled(double factor) const {
    BandedOperator r = *this;
    for (auto& d : r.diags_)
        for (double& v : d) v *= factor;
    return r;
}

double BandedOperator::max_abs_entry() const {
    double m = 0.0;
    for (const auto& d : diags_)
        for (double v : d) m = std::max(m, std::fabs(v));
    return m;
}

double BandedOperator::inf_norm() const {
    const int n = grid_.n;
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int o = -bw_; o <= bw_; ++o) s += std::fabs(entry_at(i, o));
        m = std::max(m, s);
    }
    return m;
}

double BandedOperator::asymmetry() const {
    const int n = grid_.n;
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int o = 1; o <= bw_; ++o) {
            if (i + o >= n) break;
            m = std::max(m, std::fabs(entry_at(i, o) - entry_at(i + o, -o)));
        }
    return m;
}

void BandedOperator::dump(std::ostream& os) const {
    for (int o = -bw_; o <= bw_; ++o) {
        os << "offset " << o << ":";
        const auto& d = diags_[o + bw_];
        char buf[32];
        for (double v : d) {
            std::snprintf(buf, sizeof(buf), " %.17g", v);
            os << buf;
        }
        os << "\n";
    }
}

BandedOperator compose(const BandedOperator& a, const BandedOperator& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("compose: grid mismatch");
    const int n = a.size();
    int bw = std::min(a.half_bandwidth() + b.half_bandwidth(), n - 1);
    BandedOperator c(a.grid(), bw, false);
    for (int oc = -bw; oc <= bw; ++oc) {
        auto& dest = c.diagonal(oc);
        int lo = std::max(0, -oc);
        int hi = std::min(n, n - oc);
        for (int i = lo; i < hi; ++i) {
            double s = 0.0;
            for (int oa = -a.half_bandwidth(); oa <= a.half_bandwidth(); ++oa) {
                int k = i + oa;
                if (k < 0 || k >= n) continue;
                int ob = oc - oa;
                if (ob < -b.half_bandwidth() || ob > b.half_bandwidth()) continue;
                s += a.entry_at(i, oa) * b.entry_at(k, ob);
            }
            dest[i] = s;
        }
    }
    return c;
}

BandedOperator transpose(const BandedOperator& a) {
    const int n = a.size();
    BandedOperator t(a.grid(), a.half_bandwidth(), a.symmetric_flag());
    for (int o = -a.half_bandwidth(); o <= a.half_bandwidth(); ++o) {
        auto& dest = t.diagonal(o);
        int lo = std::max(0, -o);
        int hi = std::min(n, n - o);
        for (int i = lo; i < hi; ++i) dest[i] = a.entry_at(i + o, -o);
    }
    return t;
}

BandedOperator add(const BandedOperator& a, const BandedOperator& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("add: grid mismatch");
    int bw = std::max(a.half_bandwidth(), b.half_bandwidth());
    BandedOperator c(a.grid(), bw, a.symmetric_flag() && b.symmetric_flag());
    const int n = a.size();
    for (int o = -bw; o <= bw; ++o) {
        auto& dest = c.diagonal(o);
        int lo = std::max(0, -o);
        int hi = std::min(n, n - o);
        for (int i = lo; i < hi; ++i) dest[i] = a.entry_at(i, o) + b.entry_at(i, o);
    }
    return c;
}

BandedOperator subtract(const BandedOperator& a, const BandedOperator& b) {
    return add(a, b.scaled(-1.0));
}

BandedOperator add_scalar(const BandedOperator& a, double s) {
    BandedOperator c = a;
    auto& d = c.diagonal(0);
    for (double& v : d) v += s;
    return c;
}

BandedOperator symmetrize(const BandedOperator& a) {
    BandedOperator t = transpose(a);
    BandedOperator c = add(a, t).scaled(0.5);
    c.set_symmetric_flag(true);
    return c;
}

BandedOperator conjugate_by_weight(const BandedOperator& a, const Field& w) {
    if (!(a.grid() == w.grid()))
        throw std::invalid_argument("conjugate_by_weight: grid mismatch");
    const int n = a.size();
    for (int i = 0; i < n; ++i)
        if (!(w[i] > 0.0)) throw FieldError("conjugate_by_weight: nonpositive weight", i);
    BandedOperator c(a.grid(), a.half_bandwidth(), false);
    bool diagonal_only = true;
    for (int o = -a.half_bandwidth(); o <= a.half_bandwidth(); ++o) {
        auto& dest = c.diagonal(o);
        int lo = std::max(0, -o);
        int hi = std::min(n, n - o);
        for (int i = lo; i < hi; ++i) {
            dest[i] = w[i] * a.entry_at(i, o) / w[i + o];
            if (o != 0 && dest[i] != a.entry_at(i, o)) diagonal_only = false;
        }
    }
    // w == const leaves the matrix unchanged, including its symmetry flag
    c.set_symmetric_flag(a.symmetric_flag() && diagonal_only);
    return c;
}

double Block2::max_abs_entry() const {
    double m = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (b_[i][j]) m = std::max(m, b_[i][j]->max_abs_entry());
    return m;
}

Block2 compose(const Block2& a, const Block2& b) {
    Block2 c(a.grid());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            std::optional<BandedOperator> acc;
            for (int k = 0; k < 2; ++k) {
                if (!a.block(i, k) || !b.block(k, j)) continue;
                BandedOperator p = compose(*a.block(i, k), *b.block(k, j));
                acc = acc ? add(*acc, p) : std::optional<BandedOperator>(std::move(p));
            }
            c.block(i, j) = std::move(acc);
        }
    return c;
}

Block2 add(const Block2& a, const Block2& b) {
    Block2 c(a.grid());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const auto& x = a.block(i, j);
            const auto& y = b.block(i, j);
            if (x && y)
                c.block(i, j) = add(*x, *y);
            else if (x)
                c.block(i, j) = *x;
            else if (y)
                c.block(i, j) = *y;
        }
    return c;
}

}  // namespace swb
