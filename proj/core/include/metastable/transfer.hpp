#ifndef METASTABLE_TRANSFER_HPP
#define METASTABLE_TRANSFER_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "metastable/maps.hpp"

namespace metastable {

// Piecewise-constant function on a uniform grid over [-1,1]: values are cell
// averages over grid_n cells of width 2/grid_n.  Grids are kept even so that
// 0 is always a node and block indicators are exactly representable.
class Density {
public:
    Density() = default;
    Density(int grid_n, std::vector<double> values);

    static Density constant(int grid_n, double value);
    /// Uniform probability density on [-1,1] (value 1/2 everywhere).
    static Density uniform(int grid_n) { return constant(grid_n, 0.5); }
    /// Piecewise-constant over the blocks delimited by `boundaries`
    /// (boundaries[0] = -1, boundaries.back() = 1); each cell takes the value
    /// of the block containing its center.
    static Density block_constant(int grid_n, const std::vector<double>& boundaries,
                                  const std::vector<double>& block_values);

    int grid_n() const { return grid_n_; }
    double cell_width() const { return 2.0 / grid_n_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double integral() const;
    double l1_norm() const;
    /// Total variation of the step function (interior jumps only).
    double variation() const;

    /// Integral restricted to [lo, hi]; exact when lo/hi are grid nodes.
    double integral_on(double lo, double hi) const;

    Density& operator*=(double c);
    Density& operator-=(const Density& other);
    double l1_distance(const Density& other) const;

private:
    int grid_n_ = 0;
    std::vector<double> values_;
};

inline double integral(const Density& f) { return f.integral(); }
inline double l1_norm(const Density& f) { return f.l1_norm(); }
inline double variation(const Density& f) { return f.variation(); }

// Sparse column-stochastic Ulam discretization of the Perron-Frobenius
// operator of a piecewise-affine map: M[i][j] = Leb(cell_j n T^{-1}(cell_i)) /
// Leb(cell_j), every entry computed by closed-form affine inversion of the
// branches (no sampling).  Stored compressed-column.
class UlamOperator {
public:
    static UlamOperator build(const PiecewiseLinearMap& map, int grid_n);

    int grid_n() const { return grid_n_; }
    std::size_t nnz() const { return values_.size(); }

    /// Matrix-vector product M f on matching grids.
    Density apply(const Density& f) const;
    /// In-place product into a caller-provided buffer (hot path for cocycles).
    void apply_inplace(const std::vector<double>& in, std::vector<double>& out) const;

    double entry(int row, int col) const;
    double column_sum(int col) const;
    std::vector<std::vector<double>> to_dense() const;

    const std::vector<std::int64_t>& col_ptr() const { return col_ptr_; }
    const std::vector<int>& row_idx() const { return row_idx_; }
    const std::vector<double>& entries() const { return values_; }

    friend UlamOperator load_ulam_csv(std::istream& in);

private:
    int grid_n_ = 0;
    std::vector<std::int64_t> col_ptr_;
    std::vector<int> row_idx_;
    std::vector<double> values_;
};

/// Free-function form of the operator constructor.
inline UlamOperator ulam_matrix(const PiecewiseLinearMap& map, int grid_n) {
    return UlamOperator::build(map, grid_n);
}
inline Density apply(const UlamOperator& op, const Density& f) { return op.apply(f); }

// One record of the Lasota-Yorke check: after an even number 2n of cocycle
// steps the observed variation is compared with (3/4)^n Var(f) + 26 |f|_1
// where |.|_1 is taken w.r.t. normalized Lebesgue on [-1,1].
struct LyRecord {
    int trial;
    int steps;  // even horizon 2n
    double var_start;
    double var_observed;
    double bound;
    double slack;  // bound - observed; negative means violation
};

struct LyReport {
    std::vector<LyRecord> records;
    int violations = 0;
    double min_slack = 0.0;
    double max_slack = 0.0;
};

/// Push `trials` random piecewise-constant densities through the Ulam cocycle
/// of the given fiber maps and check the iterated variation bound at every
/// even horizon.  Deterministic for a fixed seed.
LyReport verify_ly(const std::vector<PiecewiseLinearMap>& cocycle, int trials,
                   int grid_n, std::uint64_t seed);

// Plain-text serialization for golden-file regression tests.
void save_density_csv(const Density& f, std::ostream& out);
Density load_density_csv(std::istream& in);
void save_ulam_csv(const UlamOperator& op, std::ostream& out);
UlamOperator load_ulam_csv(std::istream& in);

/// Deterministic uniform double in [0,1): top 53 bits of mt19937_64 output.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace metastable

#endif
