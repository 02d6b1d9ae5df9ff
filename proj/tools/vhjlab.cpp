#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "vhj/acceptance.hpp"
#include "vhj/estimates.hpp"
#include "vhj/experiment.hpp"
#include "vhj/heat.hpp"
#include "vhj/solver.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Overrides {
    CLI::Option *seed = nullptr, *beta = nullptr, *tol = nullptr, *out = nullptr;
    std::uint64_t seed_v = 0;
    double beta_v = 0.0, tol_v = 0.05;
    std::string out_v;

    void attach(CLI::App* cmd) {
        seed = cmd->add_option("--seed", seed_v, "override the initial-data seed");
        beta = cmd->add_option("--beta", beta_v, "override the decay exponent beta");
        tol = cmd->add_option("--tolerance", tol_v, "relative slack for the checks");
        out = cmd->add_option("--out", out_v, "output root for reports and CSVs");
    }

    void apply(vhj::ExperimentConfig& cfg) const {
        if (*seed) cfg.initial.seed = seed_v;
        if (*beta) cfg.beta = beta_v;
        if (*tol) cfg.checks.tolerance = tol_v;
        if (*out) cfg.out_dir = out_v;
        if (const char* env = std::getenv("VHJ_OUT_ROOT"); env && *env)
            cfg.out_dir = env;
    }
};

int exit_code(const vhj::Report& rep) {
    if (rep.status == "PASSED") return 0;
    return rep.status == "FAILED" ? 1 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"viscous Hamilton-Jacobi laboratory: u_t - lap u = a|grad u|^p "
                 "with Neumann walls on rectangles"};
    app.require_subcommand(1);

    std::string config_path, csv_path;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    int only = 0;

    auto* cmd_run = app.add_subcommand("run", "run one experiment config (JSON)");
    cmd_run->add_option("config", config_path, "config file")->required();
    Overrides ov_run;
    ov_run.attach(cmd_run);

    auto* cmd_batch = app.add_subcommand("batch", "run a batch of experiments");
    cmd_batch->add_option("config", config_path, "batch config file")->required();
    cmd_batch->add_option("--jobs", jobs, "worker threads");
    Overrides ov_batch;
    ov_batch.attach(cmd_batch);

    auto* cmd_verify =
        app.add_subcommand("verify", "re-check a recorded trajectory CSV");
    cmd_verify->add_option("trajectory", csv_path, "trajectory.csv")->required();
    std::vector<std::string> checks{"gradient_bounds"};
    double va = 1.0, vp = 2.0;
    int vdim = 1;
    cmd_verify->add_option("--checks", checks,
                           "any of gradient_bounds, window_decay, envelope, "
                           "y_shape, fit_exponential, fit_algebraic")
        ->delimiter(',');
    cmd_verify->add_option("--a", va, "Hamiltonian coefficient a");
    cmd_verify->add_option("--p", vp, "gradient exponent p");
    cmd_verify->add_option("--dim", vdim, "spatial dimension the run used");
    Overrides ov_verify;
    ov_verify.attach(cmd_verify);

    auto* cmd_oracle = app.add_subcommand(
        "oracle-compare", "run a p=2 config and diff against the exact "
                          "Cole-Hopf solution at t_end");
    cmd_oracle->add_option("config", config_path, "config file")->required();
    double oracle_tol = 1e-3;
    cmd_oracle->add_option("--tolerance", oracle_tol, "sup-norm error allowed");

    auto* cmd_accept =
        app.add_subcommand("accept", "run the 13-criterion acceptance suite");
    cmd_accept->add_option("--only", only, "run a single criterion (1..13)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            vhj::ExperimentConfig cfg = vhj::config_from_json(slurp(config_path));
            ov_run.apply(cfg);
            const vhj::Report rep = vhj::run_experiment(cfg);
            std::cout << vhj::report_to_json(rep) << '\n';
            return exit_code(rep);
        }

        if (*cmd_batch) {
            std::vector<vhj::ExperimentConfig> cfgs =
                vhj::batch_from_json(slurp(config_path));
            for (auto& cfg : cfgs) ov_batch.apply(cfg);
            const auto reps = vhj::run_batch(cfgs, jobs);
            int bad = 0;
            for (const auto& rep : reps) {
                std::cout << rep.id << ": " << rep.status;
                if (!rep.error.empty()) std::cout << " (" << rep.error << ")";
                std::cout << '\n';
                if (rep.status != "PASSED") ++bad;
            }
            return std::min(bad, 125);
        }

        if (*cmd_verify) {
            const vhj::Trajectory traj = vhj::trajectory_from_csv(slurp(csv_path));
            const double tol = ov_verify.tol_v;
            const double beta =
                *ov_verify.beta ? ov_verify.beta_v : vhj::default_beta(vdim, vp);
            bool all = true;
            auto show = [&all](const vhj::BoundReport& br) {
                for (const auto& r : br.records) {
                    std::cout << r.name << ": margin " << r.margin << " "
                              << (r.pass ? "pass" : "FAIL") << '\n';
                    all = all && r.pass;
                }
            };
            for (const std::string& c : checks) {
                if (c == "gradient_bounds")
                    show(vhj::check_gradient_bounds(traj, va, vp, tol));
                else if (c == "window_decay")
                    show(vhj::window_decay_check(
                        traj, vhj::decay_params(vdim, vp, beta).gamma, tol));
                else if (c == "envelope")
                    show(vhj::empirical_envelope(
                             traj, vhj::decay_params(vdim, vp, beta), tol)
                             .report);
                else if (c == "y_shape")
                    show(vhj::y_shape_check(
                        traj, vhj::decay_params(vdim, vp, beta).gamma));
                else if (c == "fit_exponential" || c == "fit_algebraic") {
                    const auto fit = vhj::fit_decay_rate(
                        traj,
                        c == "fit_exponential" ? vhj::DecayModel::exponential
                                               : vhj::DecayModel::algebraic);
                    std::cout << c << ": rate " << fit.rate << " R2 "
                              << fit.r_squared << '\n';
                } else
                    throw std::runtime_error("unknown check: " + c);
            }
            return all ? 0 : 1;
        }

        if (*cmd_oracle) {
            vhj::ExperimentConfig cfg = vhj::config_from_json(slurp(config_path));
            if (cfg.hamiltonian.p != 2.0)
                throw std::runtime_error("the exact oracle needs p = 2");
            const vhj::Domain dom = cfg.domain();
            const vhj::SpectralPlan plan(dom);
            const vhj::Field mu0 = vhj::generate_initial_data(cfg.initial, dom);
            vhj::Trajectory traj = vhj::run(plan, mu0, cfg.hamiltonian, cfg.solver);
            const vhj::Field ref = vhj::cole_hopf_oracle(
                plan, mu0, cfg.hamiltonian.a, cfg.solver.t_end);
            double err = 0.0;
            for (std::size_t i = 0; i < ref.size(); ++i)
                err = std::max(err, std::abs(traj.final_field[i] - ref[i]));
            std::cout << "sup-norm error at t=" << cfg.solver.t_end << ": " << err
                      << (err <= oracle_tol ? " (within " : " (EXCEEDS ")
                      << oracle_tol << ")\n";
            return err <= oracle_tol ? 0 : 1;
        }

        if (*cmd_accept) {
            const auto results = vhj::acceptance::run_all(std::cout, only);
            return vhj::acceptance::unexpected_failures(results);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
