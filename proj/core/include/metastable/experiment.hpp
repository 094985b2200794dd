#ifndef METASTABLE_EXPERIMENT_HPP
#define METASTABLE_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "metastable/config.hpp"
#include "metastable/driving.hpp"
#include "metastable/markov.hpp"
#include "metastable/oseledets.hpp"

namespace metastable {

// Grid selection rule: either the coupled rule grid_n(eps) =
// even(max(min_n, eps_factor/eps)) or an explicit eps -> n table.
struct GridRule {
    long min_n = 1024;
    double eps_factor = 16.0;
    std::vector<double> table_eps;
    std::vector<long> table_n;

    int grid_for(double eps) const;
};

struct HorizonPolicy {
    long initial = 256;
    long cap = 65536;
    int renorm_every = 1;
    double doubling_tol = 1e-8;
};

struct MarkovSpec {
    bool two_state = true;
    std::size_t m = 2;
    std::size_t comp_beta_L = 1;  // paired-tent identification: beta_L = b
    std::size_t comp_beta_R = 0;  //                             beta_R = a
    std::vector<double> eps_list = {0.1, 0.01};
    long n_steps = 10000;
};

struct LySpec {
    double epsilon = 0.1;
    int grid_n = 1024;
    int sequences = 20;          // random runs of consecutive fibers
    int trials_per_sequence = 10;
    int sequence_length = 8;
    long fiber_span = 100000;
};

struct PiSpec {
    long chains = 100;
    std::vector<double> eps_list = {0.1, 0.01};
    double tail_tol = 2.5e-11;
    long recursion_steps = 8192;
};

// Everything a command needs, parsed and validated from one config file.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    DrivingSystem driving;
    MapFamilySpec map_family;
    std::vector<double> eps_list;  // strictly decreasing, optional trailing 0
    std::vector<long> fibers;
    GridRule grid;
    HorizonPolicy horizon;
    MarkovSpec markov;
    LySpec ly;
    PiSpec pi;
    std::string config_hash;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_config(const ConfigFile& cfg);
};

struct CommandResult {
    int exit_code = 0;  // 0 pass, 1 acceptance failure, 2 config error
    std::string message;
};

// Acceptance thresholds owned by the convergence commands.
inline constexpr double kPhiFinalTol = 0.03;
inline constexpr double kPsiFinalTol = 0.05;
inline constexpr double kMonotoneSlack = 1.10;
inline constexpr double kPsiIntegralTol = 1e-10;
inline constexpr double kLambda1Tol = 1e-10;
inline constexpr double kLambda2ZeroTol = 1e-8;
inline constexpr double kMarkovColumnTol = 5e-3;
inline constexpr double kV0ResidualTol = 1e-12;

CommandResult cmd_phi_converge(const ExperimentConfig& cfg, const std::string& out_dir,
                               int threads = 1);
CommandResult cmd_psi_converge(const ExperimentConfig& cfg, const std::string& out_dir,
                               int threads = 1);
CommandResult cmd_lambda2(const ExperimentConfig& cfg, const std::string& out_dir,
                          int threads = 1);
CommandResult cmd_markov(const ExperimentConfig& cfg, const std::string& out_dir);
CommandResult cmd_ly_check(const ExperimentConfig& cfg, const std::string& out_dir);
CommandResult cmd_pi_check(const ExperimentConfig& cfg, const std::string& out_dir);

/// Shared sweep used by the three convergence commands.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int threads);

/// 12-significant-digit decimal rendering used in all CSV output.
std::string format_number(double x);

}  // namespace metastable

#endif
