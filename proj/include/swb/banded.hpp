#pragma once

// Real banded matrices on a uniform grid: the common currency of all
// operator-identity checks and eigensolves. Immutable after construction;
// compose/transpose return new values.

#include <optional>
#include <ostream>
#include <vector>

#include "swb/grid.hpp"

namespace swb {

class BandedOperator {
public:
    BandedOperator(Grid grid, int half_bandwidth, bool symmetric = false);

    static BandedOperator identity(const Grid& g);

    const Grid& grid() const { return grid_; }
    int size() const { return grid_.n; }
    int half_bandwidth() const { return bw_; }
    bool symmetric_flag() const { return symmetric_; }
    void set_symmetric_flag(bool s) { symmetric_ = s; }

    // A(i, i+offset); zero outside the band or the matrix.
    double entry_at(int row, int offset) const {
        if (offset < -bw_ || offset > bw_) return 0.0;
        int col = row + offset;
        if (row < 0 || row >= grid_.n || col < 0 || col >= grid_.n) return 0.0;
        return diags_[offset + bw_][row];
    }
    void set_entry(int row, int offset, double v);

    // Stored diagonal for a given offset (row-indexed).
    const std::vector<double>& diagonal(int offset) const { return diags_[offset + bw_]; }
    std::vector<double>& diagonal(int offset) { return diags_[offset + bw_]; }

    std::vector<double> apply(const std::vector<double>& v) const;

    BandedOperator scaled(double factor) const;
    double max_abs_entry() const;
    double inf_norm() const;  // max absolute row sum

    // max |A(i,j) - A(j,i)|
    double asymmetry() const;

    // One line per stored diagonal: "offset <o>: v0 v1 ..."
    void dump(std::ostream& os) const;

    bool same_grid(const BandedOperator& o) const { return grid_ == o.grid_; }

private:
    Grid grid_;
    int bw_;
    bool symmetric_;
    std::vector<std::vector<double>> diags_;  // [offset + bw][row]
};

BandedOperator compose(const BandedOperator& a, const BandedOperator& b);
BandedOperator transpose(const BandedOperator& a);
BandedOperator add(const BandedOperator& a, const BandedOperator& b);
BandedOperator subtract(const BandedOperator& a, const BandedOperator& b);
// a + s*I
BandedOperator add_scalar(const BandedOperator& a, double s);
// (A + A^T)/2, symmetric-flagged
BandedOperator symmetrize(const BandedOperator& a);

// D(w) A D(w)^-1 with D diagonal; w must be strictly positive.
BandedOperator conjugate_by_weight(const BandedOperator& a, const Field& w);

// 2x2 block matrix of banded operators; absent blocks are structural zeros,
// so products of structural zeros never touch floating point.
class Block2 {
public:
    Block2(Grid grid) : grid_(grid) {}
    std::optional<BandedOperator>& block(int i, int j) { return b_[i][j]; }
    const std::optional<BandedOperator>& block(int i, int j) const { return b_[i][j]; }
    const Grid& grid() const { return grid_; }

    double max_abs_entry() const;

private:
    Grid grid_;
    std::optional<BandedOperator> b_[2][2];
};

Block2 compose(const Block2& a, const Block2& b);
Block2 add(const Block2& a, const Block2& b);

}  // namespace swb
