#pragma once
// Experiment orchestration: JSON configs, deterministic initial-data
// generators, single and batch execution, CSV/JSON emission.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vhj/domain.hpp"
#include "vhj/estimates.hpp"
#include "vhj/hamiltonian.hpp"
#include "vhj/solver.hpp"

namespace vhj {

struct InitialSpec {
    std::string generator = "cosine_poly";   // cosine_poly | piecewise_linear | constant | file
    std::uint64_t seed = 1;
    double amplitude = 2.0;    // target oscillation (value itself for "constant")
    int modes = 6;             // cosine_poly mode cap per axis
    std::string file;          // node values for "file", flattened x-fastest
    // smoothing rounds before solving; -1 = auto (0 for Neumann-compatible
    // generators, 6 otherwise), 0 = raw
    int presmooth = -1;
    bool raw = false;          // force the raw path even when not compatible
};

struct CheckToggles {
    bool gradient_bounds = true;
    bool bernstein_sqrt = false;
    bool bernstein_power = false;
    bool window_decay = false;
    bool envelope = false;
    bool y_shape = false;
    std::string fit = "none";  // none | exponential | algebraic
    double tolerance = 0.05;
    double delta_frac = 0.01;  // Bernstein delta as a fraction of osc(0)
    double fit_window = 0.5;
    double shape_tol = 1e-8;
};

struct ExperimentConfig {
    std::string id = "experiment";
    int dim = 1;
    std::array<double, 2> length{1.0, 1.0};
    std::array<int, 2> cells{257, 1};
    HamiltonianSpec hamiltonian;
    SolverConfig solver;
    InitialSpec initial;
    CheckToggles checks;
    double beta = -1.0;        // decay-params override; < 0 = default_beta
    std::string out_dir;       // empty = no files written

    Domain domain() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
std::vector<ExperimentConfig> batch_from_json(const std::string& text);

Field generate_initial_data(const InitialSpec& spec, const Domain& dom);

struct Report {
    std::string id;
    std::string status = "PASSED";   // PASSED | FAILED | ERROR
    std::string error;               // set when status == ERROR
    std::vector<BoundRecord> checks;
    std::optional<FitResult> fit;
    std::optional<double> t_star;
    std::vector<std::string> warnings;
    int steps = 0;
    double wall_ms = 0.0;            // excluded from determinism comparisons
    std::string config_echo;

    bool all_pass() const;
};

std::string report_to_json(const Report& rep);
// the bit-reproducible portion: wall clock stripped
std::string report_to_json_deterministic(const Report& rep);

std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& text);

// run one experiment; writes <out_dir>/<id>/{report.json, trajectory.csv}
// when out_dir is nonempty. Exceptions surface as status ERROR only in
// run_batch; run_experiment lets them propagate.
Report run_experiment(const ExperimentConfig& cfg, Trajectory* traj_out = nullptr);

// independent experiments, optionally in parallel; output order matches
// input order regardless of the parallelism degree, and one failure
// never aborts the rest
std::vector<Report> run_batch(const std::vector<ExperimentConfig>& cfgs,
                              int parallelism = 1);

} // namespace vhj
