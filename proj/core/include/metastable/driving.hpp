#ifndef METASTABLE_DRIVING_HPP
#define METASTABLE_DRIVING_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace metastable {

/// Raised when a construction argument violates a structural invariant.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a fiber index falls outside the materialized orbit window.
class window_error : public std::out_of_range {
public:
    explicit window_error(const std::string& what, long required = 0)
        : std::out_of_range(what), required_window(required) {}
    long required_window;
};

enum class DrivingKind { rotation, two_sided_shift };

/// Piecewise-constant observable on the circle: the arc [start, next_start)
/// carries one value vector.
struct Arc {
    double start = 0.0;
    std::vector<double> values;
};

/// One symbol of a Bernoulli alphabet: a value vector drawn with probability `prob`.
struct Symbol {
    double prob = 0.0;
    std::vector<double> values;
};

// Invertible ergodic base system with a finite-range fiber observable.
//
// Two concrete bases are provided: an irrational circle rotation (angle given
// as a high-precision rational surrogate of the golden mean or any other value
// in (0,1)) and a two-sided Bernoulli shift whose symbol window is materialized
// up front from a seed.  Queries are read-only and index-based: fiber k means
// the fiber over sigma^k(omega0), with k allowed to be negative.  Immutable
// after construction and safe to share across threads.
class DrivingSystem {
public:
    /// Empty system; only useful as a target for assignment.
    DrivingSystem() = default;

    /// Circle rotation x -> x + angle (mod 1) with arc observables.
    /// Arcs must start at 0, have strictly increasing starts, and all carry
    /// value vectors of equal length with entries in [0, 1].
    static DrivingSystem rotation(double angle, std::vector<Arc> arcs,
                                  double omega0 = 0.0);

    /// Two-sided Bernoulli shift.  A window of 2*window_radius+1 symbols is
    /// generated deterministically from the seed; queries outside the window
    /// throw window_error.
    static DrivingSystem shift(std::vector<Symbol> alphabet, std::uint64_t seed,
                               long window_radius);

    DrivingKind kind() const { return kind_; }

    /// Number of components in every value vector.
    std::size_t value_dim() const { return value_dim_; }

    /// Value vector of the observable at fiber sigma^k(omega0).
    const std::vector<double>& fiber_params(long k) const;

    /// Exact P-average of one observable component, computed from arc lengths
    /// or symbol probabilities (never from orbit sampling).
    double average_observable(std::size_t component) const;

    /// Exact P-supremum of one component over the finite range.
    double sup_observable(std::size_t component) const;

    /// Orbit point on the circle at index k (rotation only).
    double orbit_point(long k) const;

    /// Largest |k| answerable without error.  Rotation windows are unbounded.
    long window_radius() const { return window_radius_; }

    double rotation_angle() const { return angle_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<Symbol>& alphabet() const { return alphabet_; }
    const std::vector<std::size_t>& symbol_window() const { return window_; }

private:
    DrivingKind kind_ = DrivingKind::rotation;
    std::size_t value_dim_ = 0;
    long window_radius_ = 0;

    // rotation state
    double angle_ = 0.0;
    double omega0_ = 0.0;
    std::vector<Arc> arcs_;
    std::vector<double> arc_lengths_;

    // shift state
    std::vector<Symbol> alphabet_;
    std::vector<std::size_t> window_;  // symbol indices for k in [-R, R]
};

/// High-precision fractional part of the golden mean, (sqrt(5)-1)/2.
/// Used as the default irrational-rotation surrogate.
double golden_mean_angle();

}  // namespace metastable

#endif
