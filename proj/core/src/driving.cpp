#include "metastable/driving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace metastable {

namespace {

double fractional(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;  // guards against floor rounding at integers
    return f;
}

// Uniform double in [0,1) from the top 53 bits of the generator output.
// std::uniform_real_distribution is implementation-defined; this is not.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_values(const std::vector<double>& v, std::size_t dim, const char* what) {
    if (v.size() != dim)
        throw validation_error(std::string(what) + ": value vectors must all have equal length");
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0))
            throw validation_error(std::string(what) + ": observable values must lie in [0,1]");
}

}  // namespace

double golden_mean_angle() {
    // (sqrt(5)-1)/2 to full double precision.
    return 0.61803398874989484820;
}

DrivingSystem DrivingSystem::rotation(double angle, std::vector<Arc> arcs, double omega0) {
    if (!(angle > 0.0 && angle < 1.0))
        throw validation_error("rotation: angle must lie in (0,1)");
    if (arcs.empty())
        throw validation_error("rotation: at least one arc required");
    if (arcs.front().start != 0.0)
        throw validation_error("rotation: first arc must start at 0");
    for (std::size_t i = 0; i + 1 < arcs.size(); ++i)
        if (!(arcs[i].start < arcs[i + 1].start))
            throw validation_error("rotation: arc starts must be strictly increasing");
    if (arcs.back().start >= 1.0)
        throw validation_error("rotation: arc starts must lie in [0,1)");

    DrivingSystem ds;
    ds.kind_ = DrivingKind::rotation;
    ds.angle_ = angle;
    ds.omega0_ = fractional(omega0);
    ds.value_dim_ = arcs.front().values.size();
    if (ds.value_dim_ == 0)
        throw validation_error("rotation: empty value vectors");
    for (const Arc& a : arcs) check_values(a.values, ds.value_dim_, "rotation");

    ds.arc_lengths_.resize(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        double next = (i + 1 < arcs.size()) ? arcs[i + 1].start : 1.0;
        ds.arc_lengths_[i] = next - arcs[i].start;
    }
    ds.arcs_ = std::move(arcs);
    ds.window_radius_ = std::numeric_limits<long>::max() / 4;
    return ds;
}

DrivingSystem DrivingSystem::shift(std::vector<Symbol> alphabet, std::uint64_t seed,
                                   long window_radius) {
    if (alphabet.empty())
        throw validation_error("shift: empty alphabet");
    if (window_radius < 1)
        throw validation_error("shift: window_radius must be >= 1");
    double total = 0.0;
    for (const Symbol& s : alphabet) {
        if (!(s.prob >= 0.0))
            throw validation_error("shift: symbol probabilities must be nonnegative");
        total += s.prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw validation_error("shift: symbol probabilities must sum to 1 within 1e-12");

    DrivingSystem ds;
    ds.kind_ = DrivingKind::two_sided_shift;
    ds.value_dim_ = alphabet.front().values.size();
    if (ds.value_dim_ == 0)
        throw validation_error("shift: empty value vectors");
    for (const Symbol& s : alphabet) check_values(s.values, ds.value_dim_, "shift");

    ds.window_radius_ = window_radius;
    ds.alphabet_ = std::move(alphabet);

    // Materialize the whole window now so any query order sees the same symbols.
    std::mt19937_64 rng(seed);
    const std::size_t len = static_cast<std::size_t>(2 * window_radius + 1);
    ds.window_.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        double u = next_unit(rng);
        double acc = 0.0;
        std::size_t sym = ds.alphabet_.size() - 1;
        for (std::size_t j = 0; j < ds.alphabet_.size(); ++j) {
            acc += ds.alphabet_[j].prob;
            if (u < acc) { sym = j; break; }
        }
        ds.window_[i] = sym;
    }
    return ds;
}

double DrivingSystem::orbit_point(long k) const {
    if (kind_ != DrivingKind::rotation)
        throw validation_error("orbit_point: only defined for rotation driving");
    return fractional(omega0_ + static_cast<double>(k) * angle_);
}

const std::vector<double>& DrivingSystem::fiber_params(long k) const {
    if (kind_ == DrivingKind::rotation) {
        double x = orbit_point(k);
        // last arc whose start is <= x
        std::size_t lo = 0, hi = arcs_.size();
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (arcs_[mid].start <= x) lo = mid; else hi = mid;
        }
        return arcs_[lo].values;
    }
    if (k < -window_radius_ || k > window_radius_)
        throw window_error("fiber_params: index outside materialized shift window",
                           std::abs(k));
    return alphabet_[window_[static_cast<std::size_t>(k + window_radius_)]].values;
}

double DrivingSystem::average_observable(std::size_t component) const {
    if (component >= value_dim_)
        throw validation_error("average_observable: component out of range");
    double avg = 0.0;
    if (kind_ == DrivingKind::rotation) {
        for (std::size_t i = 0; i < arcs_.size(); ++i)
            avg += arc_lengths_[i] * arcs_[i].values[component];
    } else {
        for (const Symbol& s : alphabet_) avg += s.prob * s.values[component];
    }
    return avg;
}

double DrivingSystem::sup_observable(std::size_t component) const {
    if (component >= value_dim_)
        throw validation_error("sup_observable: component out of range");
    double sup = 0.0;
    if (kind_ == DrivingKind::rotation) {
        for (const Arc& a : arcs_) sup = std::max(sup, a.values[component]);
    } else {
        for (const Symbol& s : alphabet_)
            if (s.prob > 0.0) sup = std::max(sup, s.values[component]);
    }
    return sup;
}

}  // namespace metastable
