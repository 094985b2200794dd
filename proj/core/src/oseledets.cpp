#include "metastable/oseledets.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace metastable {

CocycleOperators::CocycleOperators(const DrivingSystem& ds, MapFamilySpec family,
                                   double epsilon, int grid_n)
    : ds_(ds), family_(family), epsilon_(epsilon), grid_n_(grid_n) {
    if (epsilon < 0.0)
        throw validation_error("cocycle: epsilon must be >= 0");
    if (grid_n < 2 || grid_n % 2 != 0)
        throw validation_error("cocycle: grid_n must be even and >= 2");
    if (family.family == MapFamily::paired_tent && ds.value_dim() < 2)
        throw validation_error("cocycle: paired_tent driving needs (a,b) observables");
    if (family.family == MapFamily::chain_tent &&
        ds.value_dim() != 2 * static_cast<std::size_t>(family.m))
        throw validation_error("cocycle: chain_tent driving needs 2m leak components");
}

PiecewiseLinearMap CocycleOperators::map_at_fiber(long k) const {
    const std::vector<double>& v = ds_.fiber_params(k);
    if (family_.family == MapFamily::paired_tent)
        return PiecewiseLinearMap::paired_tent(epsilon_ * v[0], epsilon_ * v[1]);
    std::vector<std::array<double, 2>> leaks(static_cast<std::size_t>(family_.m));
    for (std::size_t i = 0; i < leaks.size(); ++i)
        leaks[i] = {epsilon_ * v[2 * i], epsilon_ * v[2 * i + 1]};
    return PiecewiseLinearMap::chain_tent(family_.m, leaks);
}

const UlamOperator& CocycleOperators::at_fiber(long k) const {
    const std::vector<double>& key = ds_.fiber_params(k);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    auto op = std::make_unique<UlamOperator>(
        UlamOperator::build(map_at_fiber(k), grid_n_));
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(op));
    return *it->second;
}

std::size_t CocycleOperators::cache_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

void CocycleRun::validate() const {
    if (horizon_N < 1)
        throw validation_error("run: horizon_N must be >= 1");
    if (renorm_every < 1 || horizon_N % renorm_every != 0)
        throw validation_error("run: renorm_every must divide horizon_N");
    if (horizon_cap < horizon_N)
        throw validation_error("run: horizon cap below initial horizon");
    if (grid_n < 2 || grid_n % 2 != 0)
        throw validation_error("run: grid_n must be even and >= 2");
}

namespace {

struct IterationStats {
    double log_sum_total = 0.0;
    double log_sum_burnin = 0.0;
};

// Pull a seed through N operators ending at fiber_k.  normalize_mass: rescale
// to integral 1 and record log factors (top space).  Otherwise rescale to L1
// norm 1 and re-project onto the zero-mean subspace, which the operators
// preserve exactly; the projection only removes float drift.
Density iterate_cocycle(const CocycleOperators& ops, long fiber_k, long N,
                        int renorm_every, bool normalize_mass, Density seed,
                        IterationStats* stats) {
    std::vector<double> cur = seed.values();
    std::vector<double> next(cur.size());
    const int grid_n = seed.grid_n();
    const double h = 2.0 / grid_n;
    const long burnin = N / 4;

    for (long step = 1; step <= N; ++step) {
        ops.at_fiber(fiber_k - (N - step) - 1).apply_inplace(cur, next);
        cur.swap(next);
        if (step % renorm_every != 0 && step != N) continue;

        double mass = 0.0, l1 = 0.0;
        for (double x : cur) {
            mass += x;
            l1 += std::abs(x);
        }
        mass *= h;
        l1 *= h;
        const double factor = normalize_mass ? mass : l1;
        if (!(factor > 0.0))
            throw validation_error("cocycle iteration collapsed to zero");
        if (stats) {
            stats->log_sum_total += std::log(factor);
            if (step <= burnin) stats->log_sum_burnin += std::log(factor);
        }
        const double inv = 1.0 / factor;
        if (normalize_mass) {
            for (double& x : cur) x *= inv;
        } else {
            const double mean = (mass / 2.0) * inv;  // total mass / measure of [-1,1]
            for (double& x : cur) x = x * inv - mean;
        }
    }
    return Density(grid_n, std::move(cur));
}

double signed_left_mass(const Density& f) { return f.integral_on(-1.0, 0.0); }

void fix_sign(Density& psi, bool& sign_defined) {
    const double left = signed_left_mass(psi);
    if (std::abs(left) < 1e-12) {
        sign_defined = false;
        return;
    }
    sign_defined = true;
    if (left < 0.0) psi *= -1.0;
}

}  // namespace

PullbackResult pullback_density(const CocycleOperators& ops, const CocycleRun& run,
                                long fiber_k) {
    run.validate();
    const Density seed = Density::uniform(run.grid_n);

    long N = run.horizon_N;
    Density prev = iterate_cocycle(ops, fiber_k, N, run.renorm_every, true, seed,
                                   nullptr);
    while (true) {
        const long N2 = 2 * N;
        if (N2 > run.horizon_cap) {
            PullbackResult r{std::move(prev), 0.0, N, false};
            return r;
        }
        IterationStats stats;
        Density next = iterate_cocycle(ops, fiber_k, N2, run.renorm_every, true, seed,
                                       &stats);
        const double dist = next.l1_distance(prev);
        if (dist <= run.doubling_tol) {
            const double lambda1 = stats.log_sum_total / static_cast<double>(N2);
            return {std::move(next), lambda1, N2, true};
        }
        prev = std::move(next);
        N = N2;
    }
}

SecondSpaceResult second_function(const CocycleOperators& ops, const CocycleRun& run,
                                  long fiber_k) {
    run.validate();
    const Density seed = theoretical_psi0(run.grid_n);

    long N = run.horizon_N;
    Density prev = iterate_cocycle(ops, fiber_k, N, run.renorm_every, false, seed,
                                   nullptr);
    bool prev_sign = true;
    fix_sign(prev, prev_sign);
    while (true) {
        const long N2 = 2 * N;
        if (N2 > run.horizon_cap) {
            SecondSpaceResult r{std::move(prev), 0.0, 0.0, N, false, prev_sign};
            return r;
        }
        IterationStats stats;
        Density next = iterate_cocycle(ops, fiber_k, N2, run.renorm_every, false, seed,
                                       &stats);
        bool sign_defined = true;
        fix_sign(next, sign_defined);
        const double dist = next.l1_distance(prev);
        if (dist <= run.doubling_tol) {
            const long burnin = N2 / 4;
            const double rho_log_sum = stats.log_sum_total - stats.log_sum_burnin;
            const double lambda2 = rho_log_sum / static_cast<double>(N2 - burnin);
            return {std::move(next), lambda2, rho_log_sum, N2, true, sign_defined};
        }
        prev = std::move(next);
        prev_sign = sign_defined;
        N = N2;
    }
}

Density theoretical_phi0(const DrivingSystem& ds, int grid_n) {
    const double avg_a = ds.average_observable(0);
    const double avg_b = ds.average_observable(1);
    const double denom = avg_a + avg_b;
    if (denom == 0.0)
        throw validation_error("theoretical_phi0: averaged leak rates vanish");
    const double w_left = avg_a / denom;
    const double w_right = avg_b / denom;
    return Density::block_constant(grid_n, {-1.0, 0.0, 1.0}, {w_left, w_right});
}

Density theoretical_psi0(int grid_n) {
    return Density::block_constant(grid_n, {-1.0, 0.0, 1.0}, {0.5, -0.5});
}

std::vector<SweepRow> convergence_sweep(const DrivingSystem& ds, MapFamilySpec family,
                                        const std::vector<double>& eps_list,
                                        const std::vector<int>& grid_ns,
                                        const std::vector<long>& fibers,
                                        const SweepOptions& opts) {
    if (eps_list.size() != grid_ns.size())
        throw validation_error("sweep: eps_list and grid_ns must align");

    struct Cell {
        std::size_t eps_idx;
        std::size_t fiber_idx;
    };
    std::vector<Cell> cells;
    for (std::size_t e = 0; e < eps_list.size(); ++e)
        for (std::size_t f = 0; f < fibers.size(); ++f) cells.push_back({e, f});

    std::vector<std::unique_ptr<CocycleOperators>> ops(eps_list.size());
    for (std::size_t e = 0; e < eps_list.size(); ++e)
        ops[e] = std::make_unique<CocycleOperators>(ds, family, eps_list[e],
                                                    grid_ns[e]);

    std::vector<SweepRow> rows(cells.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const auto [e, f] = cells[c];
            CocycleRun run;
            run.epsilon = eps_list[e];
            run.grid_n = grid_ns[e];
            run.horizon_N = opts.horizon_N;
            run.renorm_every = opts.renorm_every;
            run.doubling_tol = opts.doubling_tol;
            run.horizon_cap = opts.horizon_cap;

            const long fiber = fibers[f];
            PullbackResult pb = pullback_density(*ops[e], run, fiber);
            SecondSpaceResult sf = second_function(*ops[e], run, fiber);
            const Density phi0 = theoretical_phi0(ds, run.grid_n);
            const Density psi0 = theoretical_psi0(run.grid_n);

            const double psi_integral = sf.psi.integral();
            std::string flags;
            auto add_flag = [&flags](const char* tok) {
                if (!flags.empty()) flags += ';';
                flags += tok;
            };
            if (!pb.converged) add_flag("phi_nonconv");
            if (!sf.converged) add_flag("psi_nonconv");
            if (!sf.sign_defined) add_flag("sign_undetermined");
            if (std::abs(psi_integral) > 1e-10) add_flag("psi_integral");

            rows[c] = SweepRow{eps_list[e],
                               fiber,
                               run.grid_n,
                               std::max(pb.horizon_used, sf.horizon_used),
                               pb.phi.l1_distance(phi0),
                               sf.psi.l1_distance(psi0),
                               sf.lambda2,
                               pb.lambda1,
                               psi_integral,
                               flags};
        }
    };

    const int nthreads = std::max(1, opts.threads);
    if (nthreads == 1 || cells.size() <= 1) {
        work(0, cells.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (cells.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const std::size_t b = static_cast<std::size_t>(t) * chunk;
            const std::size_t e = std::min(cells.size(), b + chunk);
            if (b >= e) break;
            pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace metastable
