#ifndef METASTABLE_MAPS_HPP
#define METASTABLE_MAPS_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "metastable/driving.hpp"

namespace metastable {

// One affine branch y = slope*x + intercept on [lo, hi].  image_min/image_max
// are the exact endpoint values fixed at construction; evaluation clamps to
// them so that float rounding never pushes a branch image past a block
// boundary it only touches.
struct AffineBranch {
    double lo, hi, slope, intercept;
    double image_min, image_max;

    double operator()(double x) const {
        double y = slope * x + intercept;
        if (y < image_min) return image_min;
        if (y > image_max) return image_max;
        return y;
    }
};

/// An isolated point with a pinned value (measure zero, kept out of every
/// open branch so it never enters operator construction).
struct PinnedPoint {
    double x, value;
};

// Piecewise-affine self-map of [-1,1] given as an ordered branch list whose
// closures tile the interval.  Every branch is uniformly expanding
// (|slope| > 1) and maps into [-1,1].  boundary_points() lists the endpoints
// of the initially invariant blocks; at leak parameter 0 each block maps
// into itself.
class PiecewiseLinearMap {
public:
    // Two expanding tent blocks on [-1,0] and [0,1] with cross leakage:
    //   2(1+b)(x+1)-1   on [-1,-1/2]
    //   -2(1+b)x-1      on [-1/2,0)
    //   0               at x = 0
    //   -2(1+a)x+1      on (0,1/2]
    //   2(1+a)(x-1)+1   on [1/2,1]
    // a and b are the full leak parameters (epsilon already folded in).
    static PiecewiseLinearMap paired_tent(double a, double b);

    // m tent blocks on equal-length intervals, block i leaking into its
    // neighbors with the prescribed (left, right) parameters.  leaks[0][0]
    // and leaks[m-1][1] must be zero (nothing beyond the ends).  Blocks
    // alternate orientation (upright, inverted, ...) so that m = 2
    // reproduces paired_tent branch-for-branch.
    static PiecewiseLinearMap chain_tent(int m,
                                         const std::vector<std::array<double, 2>>& leaks);

    /// Map evaluation.  Pinned points win; otherwise the branch whose closure
    /// contains x, with the left branch winning at shared endpoints.
    double operator()(double x) const;

    const std::vector<AffineBranch>& branches() const { return branches_; }
    const std::vector<double>& critical_set() const { return critical_; }
    const std::vector<double>& boundary_points() const { return boundary_; }
    const std::vector<PinnedPoint>& pinned_points() const { return pinned_; }

    /// Number of initially invariant blocks (boundary_points().size() - 1).
    std::size_t block_count() const { return boundary_.size() - 1; }

private:
    PiecewiseLinearMap() = default;
    void validate() const;

    std::vector<AffineBranch> branches_;
    std::vector<double> critical_;
    std::vector<double> boundary_;
    std::vector<PinnedPoint> pinned_;
};

/// A closed interval of points leaking from block `source` into block `target`
/// in one step.  May be degenerate (lo == hi) when a branch only touches the
/// boundary, which recovers the infinitesimal holes of the zero-leak map.
struct HoleInterval {
    double lo, hi;
    std::size_t source, target;
};

/// Holes grouped by source block; within one source the intervals are
/// disjoint, sorted, and merged when adjacent.
struct HoleSet {
    std::vector<std::vector<HoleInterval>> by_source;
};

/// Generic hole computation: intersect each branch's preimage of the block
/// complement with the block, by exact affine inversion.
HoleSet holes(const PiecewiseLinearMap& map);

/// Measure of the union of holes leaving `source`, under the block's
/// reference measure (Lebesgue normalized to the block, which is the ACIM of
/// the unperturbed tent block).
double hole_measure(const PiecewiseLinearMap& map, std::size_t source);

}  // namespace metastable

#endif
