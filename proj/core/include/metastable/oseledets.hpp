#ifndef METASTABLE_OSELEDETS_HPP
#define METASTABLE_OSELEDETS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "metastable/transfer.hpp"

namespace metastable {

enum class MapFamily { paired_tent, chain_tent };

/// Which fiber maps to build from the driving observables.  paired_tent reads
/// value vectors (a, b); chain_tent reads 2m leak components per fiber.
struct MapFamilySpec {
    MapFamily family = MapFamily::paired_tent;
    int m = 2;
};

// Lazily built, cached Ulam operators along a driving orbit for one
// (epsilon, grid) pair.  The driving observable has finite range, so the
// cache stays small; lookups are keyed by the fiber parameter vector and are
// safe for concurrent readers.
class CocycleOperators {
public:
    CocycleOperators(const DrivingSystem& ds, MapFamilySpec family, double epsilon,
                     int grid_n);

    const DrivingSystem& driving() const { return ds_; }
    double epsilon() const { return epsilon_; }
    int grid_n() const { return grid_n_; }

    PiecewiseLinearMap map_at_fiber(long k) const;
    const UlamOperator& at_fiber(long k) const;
    std::size_t cache_size() const;

private:
    DrivingSystem ds_;  // owned copy
    MapFamilySpec family_;
    double epsilon_;
    int grid_n_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<double>, std::unique_ptr<UlamOperator>> cache_;
};

// One cocycle computation request: pull-back depth, grid, renormalization
// cadence.  horizon_N is the starting depth for the adaptive doubling test;
// depths are capped at horizon_cap (hitting the cap raises a flag, never a
// silent result).
struct CocycleRun {
    double epsilon = 0.0;
    int grid_n = 1024;
    long horizon_N = 256;
    int renorm_every = 1;
    double doubling_tol = 1e-8;
    long horizon_cap = 65536;

    void validate() const;
};

struct PullbackResult {
    Density phi;
    double lambda1 = 0.0;  // Birkhoff average of log renormalization factors
    long horizon_used = 0;
    bool converged = false;
};

struct SecondSpaceResult {
    Density psi;
    double lambda2 = 0.0;
    double rho_log_sum = 0.0;  // sum of log contraction factors past burn-in
    long horizon_used = 0;
    bool converged = false;
    bool sign_defined = true;  // false when |int_{I_L} psi| < 1e-12
};

/// Random invariant density at fiber_k approximated by pulling the uniform
/// density back through the cocycle, deepening until the doubling test holds.
PullbackResult pullback_density(const CocycleOperators& ops, const CocycleRun& run,
                                long fiber_k);

/// Second Oseledets function and exponent at fiber_k: a zero-mean seed is
/// iterated through the cocycle (the zero-mean subspace is invariant because
/// the operators preserve integrals), renormalized in L1, and sign-fixed so
/// that its integral over I_L is positive.  lambda2 is the Birkhoff average
/// of the log contraction factors after a burn-in of a quarter horizon.
SecondSpaceResult second_function(const CocycleOperators& ops, const CocycleRun& run,
                                  long fiber_k);

/// Averaged limit of the invariant density for two-block maps driven by
/// (a, b) observables: (avg a) 1_{I_L} + (avg b) 1_{I_R}, normalized.
Density theoretical_phi0(const DrivingSystem& ds, int grid_n);

/// Limit of the second Oseledets function: (1/2) 1_{I_L} - (1/2) 1_{I_R}.
Density theoretical_psi0(int grid_n);

struct SweepRow {
    double epsilon;
    long fiber;
    int grid_n;
    long horizon;
    double l1_phi_dist;
    double l1_psi_dist;
    double lambda2;
    double lambda1;       // checked against 0, not part of the CSV schema
    double psi_integral;  // likewise: must vanish to 1e-10
    std::string flags;    // semicolon-joined tokens, empty when clean
};

struct SweepOptions {
    long horizon_N = 256;
    int renorm_every = 1;
    double doubling_tol = 1e-8;
    long horizon_cap = 65536;
    int threads = 1;
};

/// Full convergence sweep over (epsilon, fiber) cells: distances of the
/// computed phi/psi to their averaged limits plus both exponents.  Rows are
/// ordered by the given eps_list, then by fiber, regardless of scheduling.
std::vector<SweepRow> convergence_sweep(const DrivingSystem& ds, MapFamilySpec family,
                                        const std::vector<double>& eps_list,
                                        const std::vector<int>& grid_ns,
                                        const std::vector<long>& fibers,
                                        const SweepOptions& opts);

}  // namespace metastable

#endif
