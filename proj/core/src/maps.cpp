#include "metastable/maps.hpp"

#include <algorithm>
#include <cmath>

namespace metastable {

void PiecewiseLinearMap::validate() const {
    if (branches_.empty())
        throw validation_error("map: no branches");
    if (branches_.front().lo != -1.0 || branches_.back().hi != 1.0)
        throw validation_error("map: branches must tile [-1,1]");
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const AffineBranch& b = branches_[i];
        if (!(b.lo < b.hi))
            throw validation_error("map: degenerate branch");
        if (i + 1 < branches_.size() && branches_[i + 1].lo != b.hi)
            throw validation_error("map: branches must be contiguous");
        if (!(std::abs(b.slope) > 1.0))
            throw validation_error("map: branch slope must exceed 1 in modulus");
        if (b.image_min < -1.0 || b.image_max > 1.0 || b.image_min > b.image_max)
            throw validation_error("map: branch image escapes [-1,1]");
    }
    if (boundary_.size() < 2 || boundary_.front() != -1.0 || boundary_.back() != 1.0)
        throw validation_error("map: boundary points must span [-1,1]");
}

PiecewiseLinearMap PiecewiseLinearMap::paired_tent(double a, double b) {
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
        throw validation_error("paired_tent: parameters must lie in [0,1]");
    PiecewiseLinearMap m;
    const double sl = 2.0 * (1.0 + b);  // left-block slope magnitude
    const double sr = 2.0 * (1.0 + a);  // right-block slope magnitude
    m.branches_ = {
        {-1.0, -0.5, sl, sl - 1.0, -1.0, b},  // 2(1+b)(x+1)-1
        {-0.5, 0.0, -sl, -1.0, -1.0, b},      // -2(1+b)x-1
        {0.0, 0.5, -sr, 1.0, -a, 1.0},        // -2(1+a)x+1
        {0.5, 1.0, sr, 1.0 - sr, -a, 1.0},    // 2(1+a)(x-1)+1
    };
    m.critical_ = {-1.0, -0.5, 0.0, 0.5, 1.0};
    m.boundary_ = {-1.0, 0.0, 1.0};
    m.pinned_ = {{0.0, 0.0}};
    m.validate();
    return m;
}

PiecewiseLinearMap PiecewiseLinearMap::chain_tent(
    int m, const std::vector<std::array<double, 2>>& leaks) {
    if (m < 2)
        throw validation_error("chain_tent: m must be >= 2");
    if (leaks.size() != static_cast<std::size_t>(m))
        throw validation_error("chain_tent: leak table must have m rows");
    for (const auto& row : leaks)
        for (double t : row)
            if (!(t >= 0.0 && t <= 1.0))
                throw validation_error("chain_tent: leak parameters must lie in [0,1]");
    if (leaks.front()[0] != 0.0)
        throw validation_error("chain_tent: block 1 cannot leak left");
    if (leaks.back()[1] != 0.0)
        throw validation_error("chain_tent: block m cannot leak right");

    PiecewiseLinearMap map;
    const double w = 2.0 / m;
    for (int i = 0; i < m; ++i) {
        const double u = (i == 0) ? -1.0 : -1.0 + i * w;
        const double v = (i + 1 == m) ? 1.0 : -1.0 + (i + 1) * w;
        const double mid = u + (v - u) / 2.0;
        const double tl = leaks[static_cast<std::size_t>(i)][0];
        const double tr = leaks[static_cast<std::size_t>(i)][1];
        const double s = 2.0 * (1.0 + tl + tr);
        double bottom = std::max(u - w * tl, -1.0);  // undershoot into left neighbor
        double top = std::min(v + w * tr, 1.0);      // overshoot into right neighbor
        if (tl == 0.0) bottom = u;
        if (tr == 0.0) top = v;
        if (i % 2 == 0) {
            // upright: endpoints map to bottom, peak (at mid) to top
            map.branches_.push_back({u, mid, s, bottom - s * u, bottom, top});
            map.branches_.push_back({mid, v, -s, bottom + s * v, bottom, top});
        } else {
            // inverted: endpoints map to top, valley (at mid) to bottom
            map.branches_.push_back({u, mid, -s, top + s * u, bottom, top});
            map.branches_.push_back({mid, v, s, top - s * v, bottom, top});
        }
        map.critical_.push_back(u);
        map.critical_.push_back(mid);
        map.boundary_.push_back(u);
        if (i > 0) map.pinned_.push_back({u, u});  // interior junctions are fixed
    }
    map.critical_.push_back(1.0);
    map.boundary_.push_back(1.0);
    map.validate();
    return map;
}

double PiecewiseLinearMap::operator()(double x) const {
    if (!(x >= -1.0 && x <= 1.0))
        throw validation_error("evaluate: point outside [-1,1]");
    for (const PinnedPoint& p : pinned_)
        if (x == p.x) return p.value;
    // first branch whose hi >= x: at shared endpoints the left branch wins
    std::size_t lo = 0, hi = branches_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (branches_[mid].hi >= x) hi = mid; else lo = mid + 1;
    }
    return branches_[lo](x);
}

HoleSet holes(const PiecewiseLinearMap& map) {
    const auto& bd = map.boundary_points();
    const std::size_t nblocks = map.block_count();
    HoleSet hs;
    hs.by_source.resize(nblocks);

    for (const AffineBranch& br : map.branches()) {
        // block containing this branch (branches never straddle boundaries)
        std::size_t blk = 0;
        while (blk + 1 < nblocks && br.lo >= bd[blk + 1]) ++blk;
        const double lo_b = bd[blk], hi_b = bd[blk + 1];

        // preimage within this branch of values beyond one block boundary
        auto emit = [&](double y_cut, bool above) {
            const double xc = std::clamp((y_cut - br.intercept) / br.slope, br.lo, br.hi);
            const bool increasing = br.slope > 0.0;
            double p, q;
            if (above == increasing) {
                p = xc; q = br.hi;
            } else {
                p = br.lo; q = xc;
            }
            if (q >= p)
                hs.by_source[blk].push_back({p, q, blk, above ? blk + 1 : blk - 1});
        };

        if (br.image_max >= hi_b && blk + 1 < nblocks) emit(hi_b, true);
        if (br.image_min <= lo_b && blk > 0) emit(lo_b, false);
    }

    for (auto& v : hs.by_source) {
        std::sort(v.begin(), v.end(),
                  [](const HoleInterval& x, const HoleInterval& y) { return x.lo < y.lo; });
        std::vector<HoleInterval> merged;
        for (const HoleInterval& h : v) {
            if (!merged.empty() && merged.back().target == h.target &&
                h.lo <= merged.back().hi) {
                merged.back().hi = std::max(merged.back().hi, h.hi);
            } else {
                merged.push_back(h);
            }
        }
        v = std::move(merged);
    }
    return hs;
}

double hole_measure(const PiecewiseLinearMap& map, std::size_t source) {
    const auto& bd = map.boundary_points();
    if (source + 1 >= bd.size())
        throw validation_error("hole_measure: source block out of range");
    HoleSet hs = holes(map);
    double len = 0.0;
    for (const HoleInterval& h : hs.by_source[source]) len += h.hi - h.lo;
    return len / (bd[source + 1] - bd[source]);
}

}  // namespace metastable
