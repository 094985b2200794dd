#include "metastable/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace metastable {

namespace {

namespace fs = std::filesystem;

std::ofstream open_csv(const std::string& out_dir, const std::string& name) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw config_error("output directory '" + out_dir + "' is not writable");
    std::ofstream out(dir / name, std::ios::binary);
    if (!out)
        throw config_error("cannot open output file '" + (dir / name).string() + "'");
    return out;
}

void write_footer(std::ofstream& out, const ExperimentConfig& cfg) {
    out << "# config_hash=" << cfg.config_hash << "\n";
}

std::vector<long> parse_fibers(const ConfigFile& cfg, const std::string& section) {
    if (cfg.has(section + ".fibers")) {
        std::vector<long> out;
        for (double x : cfg.get_number_list(section + ".fibers"))
            out.push_back(static_cast<long>(x));
        return out;
    }
    const long count = cfg.get_integer_or(section + ".fiber_count", 10);
    const long start = cfg.get_integer_or(section + ".fiber_start", 0);
    const long stride = cfg.get_integer_or(section + ".fiber_stride", 1000);
    if (count < 1)
        throw config_error(section + ".fiber_count must be >= 1");
    std::vector<long> out;
    for (long i = 0; i < count; ++i) out.push_back(start + i * stride);
    return out;
}

DrivingSystem parse_driving(const ConfigFile& cfg, std::uint64_t seed) {
    const std::string kind = cfg.get_string("driving.kind");
    if (kind == "rotation") {
        const double angle = cfg.get_number_or("driving.angle", golden_mean_angle());
        const double omega0 = cfg.get_number_or("driving.omega0", 0.0);
        const auto starts = cfg.get_number_list("driving.arc_starts");
        const auto values = cfg.get_number_table("driving.arc_values");
        if (starts.size() != values.size())
            throw config_error("driving.arc_starts and driving.arc_values must align");
        std::vector<Arc> arcs(starts.size());
        for (std::size_t i = 0; i < starts.size(); ++i)
            arcs[i] = Arc{starts[i], values[i]};
        return DrivingSystem::rotation(angle, std::move(arcs), omega0);
    }
    if (kind == "two_sided_shift") {
        const auto probs = cfg.get_number_list("driving.probs");
        const auto values = cfg.get_number_table("driving.symbol_values");
        if (probs.size() != values.size())
            throw config_error("driving.probs and driving.symbol_values must align");
        const long radius = cfg.get_integer("driving.window_radius");
        std::vector<Symbol> alphabet(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i)
            alphabet[i] = Symbol{probs[i], values[i]};
        const std::uint64_t shift_seed = static_cast<std::uint64_t>(
            cfg.get_integer_or("driving.seed", static_cast<long>(seed)));
        return DrivingSystem::shift(std::move(alphabet), shift_seed, radius);
    }
    throw config_error("driving.kind must be \"rotation\" or \"two_sided_shift\"");
}

}  // namespace

int GridRule::grid_for(double eps) const {
    if (!table_eps.empty()) {
        for (std::size_t i = 0; i < table_eps.size(); ++i)
            if (table_eps[i] == eps) return static_cast<int>(table_n[i]);
        throw config_error("grid table has no entry for epsilon = " +
                           format_number(eps));
    }
    double n = static_cast<double>(min_n);
    if (eps > 0.0) n = std::max(n, eps_factor / eps);
    long g = static_cast<long>(std::ceil(n));
    if (g % 2 != 0) ++g;
    return static_cast<int>(g);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_config(ConfigFile::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& cfg) {
    ExperimentConfig out;
    out.config_hash = fnv1a_hex(cfg.raw_text());
    out.seed = static_cast<std::uint64_t>(cfg.get_integer_or("seed", 0));
    out.driving = parse_driving(cfg, out.seed);

    const std::string family = cfg.get_string_or("map.family", "paired_tent");
    if (family == "paired_tent") {
        out.map_family = {MapFamily::paired_tent, 2};
    } else if (family == "chain_tent") {
        out.map_family = {MapFamily::chain_tent,
                          static_cast<int>(cfg.get_integer_or("map.m", 2))};
    } else {
        throw config_error("map.family must be \"paired_tent\" or \"chain_tent\"");
    }

    out.eps_list = cfg.get_number_list("sweep.eps_list");
    if (out.eps_list.empty())
        throw config_error("sweep.eps_list must not be empty");
    for (std::size_t i = 0; i < out.eps_list.size(); ++i) {
        const double e = out.eps_list[i];
        const bool trailing_zero = (e == 0.0 && i + 1 == out.eps_list.size());
        if (!(e > 0.0) && !trailing_zero)
            throw config_error("sweep.eps_list must be positive (optional trailing 0)");
        if (i > 0 && !(e < out.eps_list[i - 1]))
            throw config_error("sweep.eps_list must be strictly decreasing");
    }
    out.fibers = parse_fibers(cfg, "sweep");

    out.grid.min_n = cfg.get_integer_or("grid.min_n", 1024);
    out.grid.eps_factor = cfg.get_number_or("grid.eps_factor", 16.0);
    if (cfg.has("grid.eps")) {
        out.grid.table_eps = cfg.get_number_list("grid.eps");
        for (double n : cfg.get_number_list("grid.n"))
            out.grid.table_n.push_back(static_cast<long>(n));
        if (out.grid.table_eps.size() != out.grid.table_n.size())
            throw config_error("grid.eps and grid.n must align");
    }
    for (double e : out.eps_list) {
        const int g = out.grid.grid_for(e);
        if (g % 2 != 0)
            throw config_error("grid rule must produce even grid_n");
        if (e > 0.0 && static_cast<double>(g) < 16.0 / e)
            throw config_error("grid rule violates grid_n >= 16/epsilon");
    }

    out.horizon.initial = cfg.get_integer_or("horizon.initial", 256);
    out.horizon.cap = cfg.get_integer_or("horizon.cap", 65536);
    out.horizon.renorm_every =
        static_cast<int>(cfg.get_integer_or("horizon.renorm_every", 1));
    out.horizon.doubling_tol = cfg.get_number_or("horizon.doubling_tol", 1e-8);
    if (out.horizon.initial < 1 || out.horizon.cap < out.horizon.initial)
        throw config_error("horizon.initial must be >= 1 and <= horizon.cap");
    if (out.horizon.renorm_every < 1 ||
        out.horizon.initial % out.horizon.renorm_every != 0)
        throw config_error("horizon.renorm_every must divide horizon.initial");

    // fibers must stay inside the driving window even at the deepest horizon
    if (out.driving.kind() == DrivingKind::two_sided_shift) {
        for (long f : out.fibers) {
            if (f - out.horizon.cap < -out.driving.window_radius() ||
                f > out.driving.window_radius())
                throw config_error(
                    "fiber " + std::to_string(f) +
                    " (with horizon cap) falls outside the shift window");
        }
    }

    const std::string layout = cfg.get_string_or("markov.layout", "two_state");
    if (layout == "two_state") {
        out.markov.two_state = true;
        out.markov.m = 2;
    } else if (layout == "chain") {
        out.markov.two_state = false;
        out.markov.m = static_cast<std::size_t>(cfg.get_integer_or(
            "markov.m", static_cast<long>(out.map_family.m)));
    } else {
        throw config_error("markov.layout must be \"two_state\" or \"chain\"");
    }
    out.markov.comp_beta_L =
        static_cast<std::size_t>(cfg.get_integer_or("markov.beta_L_component", 1));
    out.markov.comp_beta_R =
        static_cast<std::size_t>(cfg.get_integer_or("markov.beta_R_component", 0));
    if (cfg.has("markov.eps_list"))
        out.markov.eps_list = cfg.get_number_list("markov.eps_list");
    out.markov.n_steps = cfg.get_integer_or("markov.n_steps", 10000);

    out.ly.epsilon = cfg.get_number_or("ly.epsilon", 0.1);
    out.ly.grid_n = static_cast<int>(cfg.get_integer_or("ly.grid_n", 1024));
    out.ly.sequences = static_cast<int>(cfg.get_integer_or("ly.sequences", 20));
    out.ly.trials_per_sequence =
        static_cast<int>(cfg.get_integer_or("ly.trials_per_sequence", 10));
    out.ly.sequence_length =
        static_cast<int>(cfg.get_integer_or("ly.sequence_length", 8));
    out.ly.fiber_span = cfg.get_integer_or("ly.fiber_span", 100000);
    if (out.ly.sequence_length < 2 || out.ly.sequence_length % 2 != 0)
        throw config_error("ly.sequence_length must be even and >= 2");

    out.pi.chains = cfg.get_integer_or("pi.chains", 100);
    if (cfg.has("pi.eps_list")) out.pi.eps_list = cfg.get_number_list("pi.eps_list");
    out.pi.tail_tol = cfg.get_number_or("pi.tail_tol", 2.5e-11);
    out.pi.recursion_steps = cfg.get_integer_or("pi.recursion_steps", 8192);

    return out;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int threads) {
    // the sweep limits (block indicators, +-1/2 split) are two-block objects
    if (cfg.map_family.family == MapFamily::chain_tent && cfg.map_family.m != 2)
        throw config_error(
            "phi/psi/lambda2 sweeps are defined for two-block maps; use the "
            "markov command for m > 2 chains");
    std::vector<int> grids;
    grids.reserve(cfg.eps_list.size());
    for (double e : cfg.eps_list) grids.push_back(cfg.grid.grid_for(e));
    SweepOptions opts;
    opts.horizon_N = cfg.horizon.initial;
    opts.renorm_every = cfg.horizon.renorm_every;
    opts.doubling_tol = cfg.horizon.doubling_tol;
    opts.horizon_cap = cfg.horizon.cap;
    opts.threads = threads;
    return convergence_sweep(cfg.driving, cfg.map_family, cfg.eps_list, grids,
                             cfg.fibers, opts);
}

namespace {

void write_sweep_csv(std::ofstream& out, const std::vector<SweepRow>& rows,
                     const ExperimentConfig& cfg) {
    out << "epsilon,fiber,grid_n,horizon,l1_phi_dist,l1_psi_dist,lambda2,flags\n";
    for (const SweepRow& r : rows)
        out << format_number(r.epsilon) << ',' << r.fiber << ',' << r.grid_n << ','
            << r.horizon << ',' << format_number(r.l1_phi_dist) << ','
            << format_number(r.l1_psi_dist) << ',' << format_number(r.lambda2) << ','
            << r.flags << "\n";
    write_footer(out, cfg);
}

// per-fiber views of the sweep, positive-epsilon rows only, in sweep order
std::map<long, std::vector<const SweepRow*>> rows_by_fiber(
    const std::vector<SweepRow>& rows) {
    std::map<long, std::vector<const SweepRow*>> out;
    for (const SweepRow& r : rows)
        if (r.epsilon > 0.0) out[r.fiber].push_back(&r);
    return out;
}

}  // namespace

CommandResult cmd_phi_converge(const ExperimentConfig& cfg, const std::string& out_dir,
                               int threads) {
    const std::vector<SweepRow> rows = run_sweep(cfg, threads);
    std::ofstream out = open_csv(out_dir, "phi_converge.csv");
    write_sweep_csv(out, rows, cfg);

    std::ostringstream msg;
    bool ok = true;
    for (const SweepRow& r : rows)
        if (!r.flags.empty()) {
            ok = false;
            msg << "flags at eps=" << format_number(r.epsilon) << " fiber=" << r.fiber
                << ": " << r.flags << "\n";
        }
    for (const auto& [fiber, seq] : rows_by_fiber(rows)) {
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (seq[i]->l1_phi_dist > kMonotoneSlack * seq[i - 1]->l1_phi_dist) {
                ok = false;
                msg << "phi distance not non-increasing at fiber " << fiber
                    << " (eps " << format_number(seq[i]->epsilon) << ")\n";
            }
        if (!seq.empty() && seq.back()->l1_phi_dist > kPhiFinalTol) {
            ok = false;
            msg << "final phi distance " << format_number(seq.back()->l1_phi_dist)
                << " exceeds " << format_number(kPhiFinalTol) << " at fiber " << fiber
                << "\n";
        }
    }
    if (ok) msg << "phi-converge: all checks passed\n";
    return {ok ? 0 : 1, msg.str()};
}

CommandResult cmd_psi_converge(const ExperimentConfig& cfg, const std::string& out_dir,
                               int threads) {
    const std::vector<SweepRow> rows = run_sweep(cfg, threads);
    std::ofstream out = open_csv(out_dir, "psi_converge.csv");
    write_sweep_csv(out, rows, cfg);

    std::ostringstream msg;
    bool ok = true;
    for (const SweepRow& r : rows) {
        if (!r.flags.empty()) {
            ok = false;
            msg << "flags at eps=" << format_number(r.epsilon) << " fiber=" << r.fiber
                << ": " << r.flags << "\n";
        }
        if (std::abs(r.psi_integral) > kPsiIntegralTol) {
            ok = false;
            msg << "psi integral " << format_number(r.psi_integral) << " at eps="
                << format_number(r.epsilon) << " fiber=" << r.fiber << "\n";
        }
    }
    for (const auto& [fiber, seq] : rows_by_fiber(rows)) {
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (seq[i]->l1_psi_dist > kMonotoneSlack * seq[i - 1]->l1_psi_dist) {
                ok = false;
                msg << "psi distance not non-increasing at fiber " << fiber
                    << " (eps " << format_number(seq[i]->epsilon) << ")\n";
            }
        if (!seq.empty() && seq.back()->l1_psi_dist > kPsiFinalTol) {
            ok = false;
            msg << "final psi distance " << format_number(seq.back()->l1_psi_dist)
                << " exceeds " << format_number(kPsiFinalTol) << " at fiber " << fiber
                << "\n";
        }
    }
    if (ok) msg << "psi-converge: all checks passed\n";
    return {ok ? 0 : 1, msg.str()};
}

CommandResult cmd_lambda2(const ExperimentConfig& cfg, const std::string& out_dir,
                          int threads) {
    const std::vector<SweepRow> rows = run_sweep(cfg, threads);
    std::ofstream out = open_csv(out_dir, "lambda2.csv");
    write_sweep_csv(out, rows, cfg);

    std::ostringstream msg;
    bool ok = true;
    for (const SweepRow& r : rows) {
        if (!r.flags.empty()) {
            ok = false;
            msg << "flags at eps=" << format_number(r.epsilon) << " fiber=" << r.fiber
                << ": " << r.flags << "\n";
        }
        if (std::abs(r.lambda1) > kLambda1Tol) {
            ok = false;
            msg << "lambda1 " << format_number(r.lambda1) << " at eps="
                << format_number(r.epsilon) << " fiber=" << r.fiber << "\n";
        }
        if (r.epsilon > 0.0 && !(r.lambda2 < 0.0)) {
            ok = false;
            msg << "lambda2 not negative at eps=" << format_number(r.epsilon)
                << " fiber=" << r.fiber << "\n";
        }
        if (r.epsilon == 0.0 && std::abs(r.lambda2) > kLambda2ZeroTol) {
            ok = false;
            msg << "lambda2 " << format_number(r.lambda2)
                << " at eps=0 exceeds tolerance (fiber " << r.fiber << ")\n";
        }
    }
    for (const auto& [fiber, seq] : rows_by_fiber(rows)) {
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (!(std::abs(seq[i]->lambda2) < std::abs(seq[i - 1]->lambda2))) {
                ok = false;
                msg << "|lambda2| not decreasing at fiber " << fiber << " (eps "
                    << format_number(seq[i]->epsilon) << ")\n";
            }
    }
    if (ok) msg << "lambda2: all checks passed\n";
    return {ok ? 0 : 1, msg.str()};
}

CommandResult cmd_markov(const ExperimentConfig& cfg, const std::string& out_dir) {
    const EnvChain proto =
        cfg.markov.two_state
            ? EnvChain::two_state(cfg.driving, 0.0, cfg.markov.comp_beta_L,
                                  cfg.markov.comp_beta_R)
            : EnvChain::chain(cfg.driving, cfg.markov.m, 0.0);

    const std::vector<double> v0 = chain_v0(proto);
    auto [delta_avg, n_avg] = delta_n_average(proto);

    // residual of the defining linear system (absorbing shortcut has none)
    bool invertible = true;
    for (std::size_t i = 0; i < v0.size(); ++i)
        if (delta_avg(i, i) == 0.0) invertible = false;
    double residual = 0.0;
    if (invertible) {
        const std::size_t m = v0.size();
        for (std::size_t i = 0; i < m; ++i) {
            double acc = v0[i];
            for (std::size_t j = 0; j < m; ++j)
                acc -= n_avg(i, j) / delta_avg(i, i) * v0[j];
            residual = std::max(residual, std::abs(acc));
        }
    }
    double sum = 0.0, min_entry = 1.0;
    for (double x : v0) {
        sum += x;
        min_entry = std::min(min_entry, x);
    }

    const std::vector<ChainLimitRow> rows =
        chain_limit_check(proto, cfg.markov.eps_list, cfg.markov.n_steps, cfg.fibers);

    std::ostringstream msg;
    bool ok = true;
    if (residual > kV0ResidualTol) {
        ok = false;
        msg << "v0 residual " << format_number(residual) << " exceeds 1e-12\n";
    }
    if (std::abs(sum - 1.0) > 1e-12 || min_entry < 0.0) {
        ok = false;
        msg << "v0 not a probability vector\n";
    }
    if (cfg.markov.two_state) {
        const std::vector<double> closed = two_state_v0_closed_form(proto);
        for (std::size_t i = 0; i < 2; ++i)
            if (std::abs(closed[i] - v0[i]) > 1e-14) {
                ok = false;
                msg << "two-state closed form deviates from solve_v0\n";
            }
    }
    const double eps_final =
        *std::min_element(cfg.markov.eps_list.begin(), cfg.markov.eps_list.end());
    double worst_final = 0.0;
    bool saturation_warn = false;
    for (const ChainLimitRow& r : rows) {
        if (r.epsilon == eps_final) worst_final = std::max(worst_final, r.max_dist_to_v0);
        if (!r.saturation_ok) saturation_warn = true;
    }
    if (worst_final > kMarkovColumnTol) {
        ok = false;
        msg << "columns at eps=" << format_number(eps_final) << " deviate from v0 by "
            << format_number(worst_final) << " (tol " << format_number(kMarkovColumnTol)
            << ")\n";
    }
    if (saturation_warn)
        msg << "warning: n below the saturation rule n >= 20/(eps*min diag)\n";

    std::ofstream out = open_csv(out_dir, "markov.csv");
    out << "epsilon,fiber,n,col,max_dist_to_v0\n";
    for (const ChainLimitRow& r : rows)
        out << format_number(r.epsilon) << ',' << r.fiber << ',' << r.n << ',' << r.col
            << ',' << format_number(r.max_dist_to_v0) << "\n";
    out << "summary," << (ok ? "pass" : "fail") << ",worst_final_dist="
        << format_number(worst_final) << "\n";
    out << "# v0=";
    for (std::size_t i = 0; i < v0.size(); ++i)
        out << (i ? ";" : "") << format_number(v0[i]);
    out << "\n";
    write_footer(out, cfg);

    msg << "v0 = (";
    for (std::size_t i = 0; i < v0.size(); ++i)
        msg << (i ? ", " : "") << format_number(v0[i]);
    msg << ")\n";
    if (ok) msg << "markov: all checks passed\n";
    return {ok ? 0 : 1, msg.str()};
}

CommandResult cmd_ly_check(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::mt19937_64 rng(cfg.seed ^ 0x6c79636865636bull);  // distinct stream per command
    const CocycleOperators ops(cfg.driving, cfg.map_family, cfg.ly.epsilon,
                               cfg.ly.grid_n);

    std::ofstream out = open_csv(out_dir, "ly_check.csv");
    out << "trial,steps,var_start,var_observed,bound,slack\n";

    int violations = 0;
    double min_slack = 0.0;
    bool first = true;
    int trial_base = 0;
    for (int s = 0; s < cfg.ly.sequences; ++s) {
        long start = 0;
        if (cfg.driving.kind() == DrivingKind::rotation) {
            start = static_cast<long>(uniform_unit(rng) *
                                      static_cast<double>(cfg.ly.fiber_span));
        } else {
            const long span = std::max<long>(
                1, std::min<long>(cfg.ly.fiber_span, cfg.driving.window_radius() -
                                                         cfg.ly.sequence_length));
            start = static_cast<long>(uniform_unit(rng) * static_cast<double>(span)) -
                    span / 2;
        }
        std::vector<PiecewiseLinearMap> cocycle;
        for (int j = 0; j < cfg.ly.sequence_length; ++j)
            cocycle.push_back(ops.map_at_fiber(start + j));
        const LyReport rep = verify_ly(cocycle, cfg.ly.trials_per_sequence,
                                       cfg.ly.grid_n, rng());
        for (const LyRecord& rec : rep.records) {
            out << (trial_base + rec.trial) << ',' << rec.steps << ','
                << format_number(rec.var_start) << ','
                << format_number(rec.var_observed) << ',' << format_number(rec.bound)
                << ',' << format_number(rec.slack) << "\n";
            if (first || rec.slack < min_slack) min_slack = rec.slack;
            first = false;
        }
        violations += rep.violations;
        trial_base += cfg.ly.trials_per_sequence;
    }
    const bool ok = violations == 0;
    out << "summary," << (ok ? "pass" : "fail") << ",violations=" << violations
        << ",min_slack=" << format_number(min_slack) << "\n";
    write_footer(out, cfg);

    std::ostringstream msg;
    msg << "ly-check: " << trial_base << " trials, " << violations
        << " violations, min slack " << format_number(min_slack) << "\n";
    return {ok ? 0 : 1, msg.str()};
}

CommandResult cmd_pi_check(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::mt19937_64 rng(cfg.seed ^ 0x70695f636865636bull);
    std::ofstream out = open_csv(out_dir, "pi_check.csv");
    out << "chain,kind,epsilon,pi_series,p_recursion,abs_gap,allowed,terms\n";

    // random two-state chains: alternately constant (one arc) and
    // fiber-varying (two-symbol shift); beta entries in [0.2, 1] keep the
    // recursion contraction certified.
    auto rand_beta = [&rng]() { return 0.2 + 0.8 * uniform_unit(rng); };

    bool ok = true;
    double worst_gap = 0.0;

    for (long c = 0; c < cfg.pi.chains; ++c) {
        const bool constant = (c % 2 == 0);
        DrivingSystem ds;
        if (constant) {
            ds = DrivingSystem::rotation(golden_mean_angle(),
                                         {Arc{0.0, {rand_beta(), rand_beta()}}});
        } else {
            const double p = 0.25 + 0.5 * uniform_unit(rng);
            ds = DrivingSystem::shift({Symbol{p, {rand_beta(), rand_beta()}},
                                       Symbol{1.0 - p, {rand_beta(), rand_beta()}}},
                                      rng(), 40000);
        }
        for (double eps : cfg.pi.eps_list) {
            const EnvChain chain = EnvChain::two_state(ds, eps, 0, 1);
            const PiSeriesResult series = pi_series(chain, 0, cfg.pi.tail_tol);
            const double p_rec =
                p_recursion(chain, 0, cfg.pi.recursion_steps, 0.5);
            // certified disagreement: series tail plus recursion memory of the
            // start value, (1 - eps*inf gamma)^n
            const double inf_gamma = 0.4;
            const double allowed = series.tail_bound +
                                   std::pow(1.0 - eps * inf_gamma,
                                            static_cast<double>(cfg.pi.recursion_steps));
            const double gap = std::abs(series.value - p_rec);
            worst_gap = std::max(worst_gap, gap);
            if (gap > std::max(allowed, 1e-10)) ok = false;
            out << c << ',' << (constant ? "constant" : "varying") << ','
                << format_number(eps) << ',' << format_number(series.value) << ','
                << format_number(p_rec) << ',' << format_number(gap) << ','
                << format_number(allowed) << ',' << series.terms << "\n";
        }
    }
    out << "summary," << (ok ? "pass" : "fail")
        << ",worst_gap=" << format_number(worst_gap) << "\n";
    write_footer(out, cfg);

    std::ostringstream msg;
    msg << "pi-check: " << cfg.pi.chains << " chains, worst series/recursion gap "
        << format_number(worst_gap) << "\n";
    return {ok ? 0 : 1, msg.str()};
}

}  // namespace metastable
