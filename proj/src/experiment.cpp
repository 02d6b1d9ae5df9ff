#include "vhj/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "vhj/heat.hpp"

namespace vhj {

using nlohmann::json;

Domain ExperimentConfig::domain() const {
    if (dim == 1) return Domain(length[0], cells[0]);
    return Domain(length[0], length[1], cells[0], cells[1]);
}

namespace {

// canonical uniform double in [-1, 1) from the raw 64-bit stream, so the
// draw sequence is identical across platforms
double uniform_pm1(std::mt19937_64& gen) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

Field scaled_to(Field f, double target) {
    const double o = oscillation(f);
    if (o > 0.0 && target > 0.0) {
        const double s = target / o;
        for (double& v : f) v *= s;
    }
    return f;
}

Field cosine_poly(const InitialSpec& spec, const Domain& dom) {
    std::mt19937_64 gen(spec.seed);
    const int K = std::max(1, spec.modes);
    Field f(dom.size(), 0.0);
    const int nx = dom.cells[0];
    if (dom.dim == 1) {
        for (int k = 1; k <= K; ++k) {
            const double c = uniform_pm1(gen);
            for (int i = 0; i < nx; ++i)
                f[i] += c * std::cos(k * M_PI * i / double(nx - 1));
        }
    } else {
        const int ny = dom.cells[1];
        for (int ky = 0; ky <= K; ++ky)
            for (int kx = 0; kx <= K; ++kx) {
                if (kx == 0 && ky == 0) continue;
                const double c = uniform_pm1(gen);
                for (int j = 0; j < ny; ++j) {
                    const double cy = std::cos(ky * M_PI * j / double(ny - 1));
                    for (int i = 0; i < nx; ++i)
                        f[dom.index(i, j)] +=
                            c * cy * std::cos(kx * M_PI * i / double(nx - 1));
                }
            }
    }
    return scaled_to(std::move(f), spec.amplitude);
}

Field piecewise_linear(const InitialSpec& spec, const Domain& dom) {
    std::mt19937_64 gen(spec.seed);
    const int nx = dom.cells[0];
    if (dom.dim == 1) {
        constexpr int knots = 7;
        std::array<double, knots> v;
        for (double& x : v) x = uniform_pm1(gen);
        Field f(dom.size());
        for (int i = 0; i < nx; ++i) {
            const double s = double(i) / (nx - 1) * (knots - 1);
            const int k = std::min(int(s), knots - 2);
            const double w = s - k;
            f[i] = (1.0 - w) * v[k] + w * v[k + 1];
        }
        return scaled_to(std::move(f), spec.amplitude);
    }
    constexpr int knots = 4;
    std::array<double, knots * knots> v;
    for (double& x : v) x = uniform_pm1(gen);
    const int ny = dom.cells[1];
    Field f(dom.size());
    for (int j = 0; j < ny; ++j) {
        const double sy = double(j) / (ny - 1) * (knots - 1);
        const int ky = std::min(int(sy), knots - 2);
        const double wy = sy - ky;
        for (int i = 0; i < nx; ++i) {
            const double sx = double(i) / (nx - 1) * (knots - 1);
            const int kx = std::min(int(sx), knots - 2);
            const double wx = sx - kx;
            const double lo = (1 - wx) * v[ky * knots + kx] + wx * v[ky * knots + kx + 1];
            const double hi = (1 - wx) * v[(ky + 1) * knots + kx] + wx * v[(ky + 1) * knots + kx + 1];
            f[dom.index(i, j)] = (1 - wy) * lo + wy * hi;
        }
    }
    return scaled_to(std::move(f), spec.amplitude);
}

bool neumann_compatible_generator(const std::string& g) {
    return g == "cosine_poly" || g == "constant";
}

} // namespace

Field generate_initial_data(const InitialSpec& spec, const Domain& dom) {
    validate(dom);
    if (spec.generator == "constant")
        return Field(dom.size(), spec.amplitude);
    if (spec.generator == "cosine_poly")
        return cosine_poly(spec, dom);
    if (spec.generator == "piecewise_linear")
        return piecewise_linear(spec, dom);
    if (spec.generator == "file") {
        std::ifstream in(spec.file);
        if (!in) throw std::invalid_argument("cannot read initial data file: " + spec.file);
        Field f;
        double v;
        while (in >> v) f.push_back(v);
        if (f.size() != dom.size())
            throw std::invalid_argument("initial data file has wrong node count");
        return f;
    }
    throw std::invalid_argument("unknown generator: " + spec.generator);
}

namespace {

void get_to(const json& j, const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>();
}
void get_to(const json& j, const char* key, int& out) {
    if (j.contains(key)) out = j.at(key).get<int>();
}
void get_to(const json& j, const char* key, bool& out) {
    if (j.contains(key)) out = j.at(key).get<bool>();
}
void get_to(const json& j, const char* key, std::string& out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
}
void get_to(const json& j, const char* key, std::uint64_t& out) {
    if (j.contains(key)) out = j.at(key).get<std::uint64_t>();
}

ExperimentConfig config_from(const json& j) {
    ExperimentConfig cfg;
    get_to(j, "id", cfg.id);
    if (j.contains("domain")) {
        const json& d = j.at("domain");
        get_to(d, "dim", cfg.dim);
        if (d.contains("length")) {
            const auto& l = d.at("length");
            for (std::size_t i = 0; i < l.size() && i < 2; ++i)
                cfg.length[i] = l[i].get<double>();
        }
        if (d.contains("cells")) {
            const auto& c = d.at("cells");
            for (std::size_t i = 0; i < c.size() && i < 2; ++i)
                cfg.cells[i] = c[i].get<int>();
        }
    }
    if (j.contains("hamiltonian")) {
        const json& h = j.at("hamiltonian");
        get_to(h, "a", cfg.hamiltonian.a);
        get_to(h, "p", cfg.hamiltonian.p);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        get_to(s, "t_end", cfg.solver.t_end);
        get_to(s, "dt", cfg.solver.dt);
        get_to(s, "sigma", cfg.solver.sigma);
        get_to(s, "eps0", cfg.solver.eps0);
        get_to(s, "eps_factor", cfg.solver.eps_factor);
        get_to(s, "eps_min", cfg.solver.eps_min);
        get_to(s, "eps_phase_steps", cfg.solver.eps_phase_steps);
        get_to(s, "tau_ext", cfg.solver.tau_ext);
        get_to(s, "record_stride", cfg.solver.record_stride);
        get_to(s, "snapshot_every", cfg.solver.snapshot_every);
        get_to(s, "snapshot_cap", cfg.solver.snapshot_cap);
        get_to(s, "grad_q", cfg.solver.grad_q);
    }
    if (j.contains("initial")) {
        const json& i = j.at("initial");
        get_to(i, "generator", cfg.initial.generator);
        get_to(i, "seed", cfg.initial.seed);
        get_to(i, "amplitude", cfg.initial.amplitude);
        get_to(i, "modes", cfg.initial.modes);
        get_to(i, "file", cfg.initial.file);
        get_to(i, "presmooth", cfg.initial.presmooth);
        get_to(i, "raw", cfg.initial.raw);
    }
    if (j.contains("checks")) {
        const json& c = j.at("checks");
        get_to(c, "gradient_bounds", cfg.checks.gradient_bounds);
        get_to(c, "bernstein_sqrt", cfg.checks.bernstein_sqrt);
        get_to(c, "bernstein_power", cfg.checks.bernstein_power);
        get_to(c, "window_decay", cfg.checks.window_decay);
        get_to(c, "envelope", cfg.checks.envelope);
        get_to(c, "y_shape", cfg.checks.y_shape);
        get_to(c, "fit", cfg.checks.fit);
        get_to(c, "tolerance", cfg.checks.tolerance);
        get_to(c, "delta_frac", cfg.checks.delta_frac);
        get_to(c, "fit_window", cfg.checks.fit_window);
        get_to(c, "shape_tol", cfg.checks.shape_tol);
    }
    get_to(j, "beta", cfg.beta);
    get_to(j, "out_dir", cfg.out_dir);
    return cfg;
}

json config_to(const ExperimentConfig& cfg) {
    json j;
    j["id"] = cfg.id;
    j["domain"] = {{"dim", cfg.dim},
                   {"length", std::vector<double>(cfg.length.begin(),
                                                  cfg.length.begin() + cfg.dim)},
                   {"cells", std::vector<int>(cfg.cells.begin(),
                                              cfg.cells.begin() + cfg.dim)}};
    j["hamiltonian"] = {{"a", cfg.hamiltonian.a}, {"p", cfg.hamiltonian.p}};
    j["solver"] = {{"t_end", cfg.solver.t_end},
                   {"dt", cfg.solver.dt},
                   {"sigma", cfg.solver.sigma},
                   {"eps0", cfg.solver.eps0},
                   {"eps_factor", cfg.solver.eps_factor},
                   {"eps_min", cfg.solver.eps_min},
                   {"eps_phase_steps", cfg.solver.eps_phase_steps},
                   {"tau_ext", cfg.solver.tau_ext},
                   {"record_stride", cfg.solver.record_stride},
                   {"snapshot_every", cfg.solver.snapshot_every},
                   {"snapshot_cap", cfg.solver.snapshot_cap},
                   {"grad_q", cfg.solver.grad_q}};
    j["initial"] = {{"generator", cfg.initial.generator},
                    {"seed", cfg.initial.seed},
                    {"amplitude", cfg.initial.amplitude},
                    {"modes", cfg.initial.modes},
                    {"file", cfg.initial.file},
                    {"presmooth", cfg.initial.presmooth},
                    {"raw", cfg.initial.raw}};
    j["checks"] = {{"gradient_bounds", cfg.checks.gradient_bounds},
                   {"bernstein_sqrt", cfg.checks.bernstein_sqrt},
                   {"bernstein_power", cfg.checks.bernstein_power},
                   {"window_decay", cfg.checks.window_decay},
                   {"envelope", cfg.checks.envelope},
                   {"y_shape", cfg.checks.y_shape},
                   {"fit", cfg.checks.fit},
                   {"tolerance", cfg.checks.tolerance},
                   {"delta_frac", cfg.checks.delta_frac},
                   {"fit_window", cfg.checks.fit_window},
                   {"shape_tol", cfg.checks.shape_tol}};
    j["beta"] = cfg.beta;
    j["out_dir"] = cfg.out_dir;
    return j;
}

json record_to(const BoundRecord& r) {
    return json{{"name", r.name},       {"margin", r.margin},
                {"t", r.t},             {"t_from", r.t_from},
                {"observed", r.observed}, {"bound", r.bound},
                {"tolerance", r.tolerance}, {"pass", r.pass}};
}

json report_to(const Report& rep, bool with_wall) {
    json j;
    j["id"] = rep.id;
    j["status"] = rep.status;
    if (!rep.error.empty()) j["error"] = rep.error;
    j["checks"] = json::array();
    for (const auto& r : rep.checks) j["checks"].push_back(record_to(r));
    if (rep.fit)
        j["fit"] = {{"rate", rep.fit->rate}, {"r_squared", rep.fit->r_squared}};
    else
        j["fit"] = nullptr;
    if (rep.t_star)
        j["t_star"] = *rep.t_star;
    else
        j["t_star"] = nullptr;
    j["warnings"] = rep.warnings;
    j["steps"] = rep.steps;
    if (with_wall) j["wall_ms"] = rep.wall_ms;
    if (!rep.config_echo.empty()) j["config"] = json::parse(rep.config_echo);
    return j;
}

} // namespace

ExperimentConfig config_from_json(const std::string& text) {
    return config_from(json::parse(text));
}

std::string config_to_json(const ExperimentConfig& cfg) {
    return config_to(cfg).dump(2);
}

std::vector<ExperimentConfig> batch_from_json(const std::string& text) {
    const json j = json::parse(text);
    const json& arr = j.is_array() ? j : j.at("experiments");
    std::vector<ExperimentConfig> out;
    out.reserve(arr.size());
    for (const auto& e : arr) out.push_back(config_from(e));
    return out;
}

bool Report::all_pass() const {
    if (!error.empty() || status == "ERROR") return false;
    return std::all_of(checks.begin(), checks.end(),
                       [](const BoundRecord& r) { return r.pass; });
}

std::string report_to_json(const Report& rep) {
    return report_to(rep, true).dump(2);
}

std::string report_to_json_deterministic(const Report& rep) {
    return report_to(rep, false).dump(2);
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t,M,m,osc,grad_sup,grad_q\n";
    char buf[256];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.max,
                      s.min, s.osc(), s.grad_sup, s.grad_q);
        out += buf;
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
    Trajectory traj;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("empty trajectory csv");
    if (line.rfind("t,M,m", 0) != 0)
        throw std::invalid_argument("trajectory csv needs the t,M,m,... header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Sample s;
        double osc_ignored;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg,%lg", &s.t, &s.max,
                        &s.min, &osc_ignored, &s.grad_sup, &s.grad_q) != 6)
            throw std::invalid_argument("malformed trajectory csv row: " + line);
        traj.samples.push_back(s);
    }
    if (!traj.samples.empty())
        traj.steps = static_cast<int>(traj.samples.size()) - 1;
    return traj;
}

Report run_experiment(const ExperimentConfig& cfg, Trajectory* traj_out) {
    Report rep;
    rep.id = cfg.id;
    rep.config_echo = config_to(cfg).dump();

    const Domain dom = cfg.domain();
    validate(dom);
    validate(cfg.hamiltonian);

    SolverConfig scfg = cfg.solver;
    const bool wants_bernstein =
        cfg.checks.bernstein_sqrt || cfg.checks.bernstein_power;
    if (wants_bernstein && scfg.snapshot_every == 0)
        scfg.snapshot_every = 1;   // the snapshot cap thins this to ~16
    validate(scfg);

    SpectralPlan plan(dom);
    Field mu0 = generate_initial_data(cfg.initial, dom);

    int presmooth = cfg.initial.presmooth;
    if (presmooth < 0)
        presmooth = neumann_compatible_generator(cfg.initial.generator) ? 0 : 6;
    if (cfg.initial.raw) {
        if (presmooth > 0)
            rep.warnings.push_back(
                "raw initial data without wall-compatible slope; skipping smoothing");
        presmooth = 0;
    }
    if (presmooth > 0) mu0 = smoothing_sequence(plan, mu0, presmooth).u0n;

    const auto write_artifacts = [&cfg](const Report& r, const Trajectory* tr) {
        if (cfg.out_dir.empty()) return;
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(cfg.out_dir) / cfg.id;
        fs::create_directories(dir);
        std::ofstream(dir / "report.json") << report_to_json(r) << '\n';
        if (tr) std::ofstream(dir / "trajectory.csv") << trajectory_to_csv(*tr);
    };

    const auto t0 = std::chrono::steady_clock::now();
    Trajectory traj;
    try {
        traj = run(plan, mu0, cfg.hamiltonian, scfg);
    } catch (const BlowupError& e) {
        rep.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        rep.status = "FAILED";
        rep.error = e.what();
        write_artifacts(rep, nullptr);
        return rep;
    }
    rep.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rep.steps = traj.steps;
    rep.t_star = traj.t_star;
    if (traj.eps_unconverged)
        rep.warnings.push_back("t_end reached before the eps schedule hit eps_min");

    const double tol = cfg.checks.tolerance;
    const double a = cfg.hamiltonian.a;
    const double p = cfg.hamiltonian.p;
    auto append = [&rep](const BoundReport& br) {
        rep.checks.insert(rep.checks.end(), br.records.begin(), br.records.end());
    };

    if (cfg.checks.gradient_bounds)
        append(check_gradient_bounds(traj, a, p, tol));
    if (cfg.checks.bernstein_sqrt || cfg.checks.bernstein_power) {
        const double osc0 = traj.osc0();
        const double delta = cfg.checks.delta_frac * (osc0 > 0.0 ? osc0 : 1.0);
        if (cfg.checks.bernstein_sqrt)
            append(bernstein_diagnostic(dom, traj, a, p,
                                        BernsteinCase::sqrt_case, delta, tol));
        if (cfg.checks.bernstein_power)
            append(bernstein_diagnostic(dom, traj, a, p,
                                        BernsteinCase::power_case, delta, tol));
    }
    if (cfg.checks.window_decay || cfg.checks.envelope || cfg.checks.y_shape) {
        const double beta = cfg.beta >= 0.0 ? cfg.beta : default_beta(dom.dim, p);
        const DecayParams params = decay_params(dom.dim, p, beta);
        if (cfg.checks.window_decay)
            append(window_decay_check(traj, params.gamma, tol));
        if (cfg.checks.envelope)
            append(empirical_envelope(traj, params, tol).report);
        if (cfg.checks.y_shape)
            append(y_shape_check(traj, params.gamma, cfg.checks.shape_tol));
    }
    if (cfg.checks.fit == "exponential")
        rep.fit = fit_decay_rate(traj, DecayModel::exponential, cfg.checks.fit_window);
    else if (cfg.checks.fit == "algebraic")
        rep.fit = fit_decay_rate(traj, DecayModel::algebraic, cfg.checks.fit_window);
    else if (cfg.checks.fit != "none")
        throw std::invalid_argument("unknown fit model: " + cfg.checks.fit);

    rep.status = rep.all_pass() ? "PASSED" : "FAILED";

    write_artifacts(rep, &traj);

    if (traj_out) *traj_out = std::move(traj);
    return rep;
}

std::vector<Report> run_batch(const std::vector<ExperimentConfig>& cfgs,
                              int parallelism) {
    std::vector<Report> out(cfgs.size());
    if (cfgs.empty()) return out;
    const int workers =
        std::max(1, std::min<int>(parallelism, static_cast<int>(cfgs.size())));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfgs.size()) return;
            try {
                out[i] = run_experiment(cfgs[i]);
            } catch (const std::exception& e) {
                Report r;
                r.id = cfgs[i].id;
                r.status = "ERROR";
                r.error = e.what();
                out[i] = std::move(r);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

} // namespace vhj
