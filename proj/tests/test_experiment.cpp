#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "vhj/experiment.hpp"

using namespace vhj;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("vhj_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

ExperimentConfig quick_config(const std::string& id) {
    ExperimentConfig cfg;
    cfg.id = id;
    cfg.cells = {65, 1};
    cfg.hamiltonian = {1.0, 2.0, 0.0};
    cfg.solver.t_end = 0.05;
    cfg.solver.record_stride = 8;
    cfg.initial.generator = "constant";
    cfg.initial.amplitude = 1.0;
    return cfg;
}

} // namespace

TEST_CASE("initial data generators") {
    Domain dom(1.0, 65);

    SUBCASE("constant") {
        InitialSpec spec;
        spec.generator = "constant";
        spec.amplitude = 3.0;
        Field f = generate_initial_data(spec, dom);
        REQUIRE(f.size() == dom.size());
        for (double v : f) CHECK(v == 3.0);
    }
    SUBCASE("cosine_poly is deterministic and hits the target oscillation") {
        InitialSpec spec;
        spec.seed = 11;
        Field f = generate_initial_data(spec, dom);
        Field g = generate_initial_data(spec, dom);
        CHECK(f == g);
        CHECK(oscillation(f) == doctest::Approx(2.0).epsilon(1e-12));
        spec.seed = 12;
        CHECK(generate_initial_data(spec, dom) != f);
        // mirror symmetry of the construction: zero normal slope at the walls
        CHECK(gradient_magnitude(dom, f)[0] == 0.0);
    }
    SUBCASE("cosine_poly in two dimensions") {
        Domain d2(1.0, 1.3, 33, 17);
        InitialSpec spec;
        spec.seed = 4;
        spec.amplitude = 0.7;
        Field f = generate_initial_data(spec, d2);
        REQUIRE(f.size() == d2.size());
        CHECK(oscillation(f) == doctest::Approx(0.7).epsilon(1e-12));
    }
    SUBCASE("piecewise_linear") {
        InitialSpec spec;
        spec.generator = "piecewise_linear";
        spec.seed = 7;
        spec.amplitude = 2.0;
        Field f = generate_initial_data(spec, dom);
        CHECK(oscillation(f) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(generate_initial_data(spec, dom) == f);
    }
    SUBCASE("file") {
        TempDir tmp;
        const fs::path data = tmp.path / "mu0.txt";
        std::ofstream(data) << "0.5 1.5\n2.5 3.5 4.5\n";
        InitialSpec spec;
        spec.generator = "file";
        spec.file = data.string();
        Field f = generate_initial_data(spec, Domain(1.0, 5));
        REQUIRE(f.size() == 5);
        CHECK(f[0] == 0.5);
        CHECK(f[4] == 4.5);
        CHECK_THROWS(generate_initial_data(spec, Domain(1.0, 6)));
        spec.file = (tmp.path / "missing.txt").string();
        CHECK_THROWS(generate_initial_data(spec, Domain(1.0, 5)));
    }
    SUBCASE("unknown generator") {
        InitialSpec spec;
        spec.generator = "perlin";
        CHECK_THROWS(generate_initial_data(spec, dom));
    }
}

TEST_CASE("config json round trip") {
    ExperimentConfig cfg;
    cfg.id = "roundtrip";
    cfg.dim = 2;
    cfg.length = {2.0, 1.5};
    cfg.cells = {65, 49};
    cfg.hamiltonian = {-0.75, 1.5, 0.0};
    cfg.solver.t_end = 0.3;
    cfg.solver.dt = 1e-4;
    cfg.solver.sigma = 0.4;
    cfg.solver.record_stride = 2;
    cfg.solver.snapshot_every = 3;
    cfg.solver.tau_ext = 1e-7;
    cfg.solver.grad_q = 4.0;
    cfg.initial.generator = "piecewise_linear";
    cfg.initial.seed = 99;
    cfg.initial.amplitude = 1.25;
    cfg.initial.presmooth = 2;
    cfg.checks.bernstein_sqrt = true;
    cfg.checks.window_decay = true;
    cfg.checks.fit = "exponential";
    cfg.checks.tolerance = 0.07;
    cfg.beta = 3.0;
    cfg.out_dir = "/tmp/somewhere";

    const std::string text = config_to_json(cfg);
    ExperimentConfig back = config_from_json(text);
    CHECK(config_to_json(back) == text);
    CHECK(back.dim == 2);
    CHECK(back.cells[1] == 49);
    CHECK(back.hamiltonian.a == -0.75);
    CHECK(back.solver.dt == 1e-4);
    CHECK(back.initial.seed == 99);
    CHECK(back.checks.fit == "exponential");
    CHECK(back.beta == 3.0);

    // missing keys keep their defaults
    ExperimentConfig defaults = config_from_json("{}");
    CHECK(defaults.cells[0] == 257);
    CHECK(defaults.checks.gradient_bounds);
    CHECK(defaults.solver.t_end == 1.0);
}

TEST_CASE("batch json accepts both shapes") {
    const std::string arr = R"([{"id":"a"},{"id":"b","domain":{"dim":2}}])";
    auto cfgs = batch_from_json(arr);
    REQUIRE(cfgs.size() == 2);
    CHECK(cfgs[0].id == "a");
    CHECK(cfgs[1].dim == 2);

    const std::string wrapped = R"({"experiments":[{"id":"c"}]})";
    auto cfgs2 = batch_from_json(wrapped);
    REQUIRE(cfgs2.size() == 1);
    CHECK(cfgs2[0].id == "c");

    CHECK_THROWS(batch_from_json("42"));
}

TEST_CASE("trajectory csv round trip") {
    Domain dom(1.0, 65);
    SpectralPlan plan(dom);
    Field mu0(dom.size());
    for (int i = 0; i < 65; ++i) mu0[i] = std::cos(M_PI * i / 64.0);
    SolverConfig scfg;
    scfg.t_end = 0.05;
    scfg.record_stride = 2;
    Trajectory tr = run(plan, mu0, {1.0, 2.0, 0.0}, scfg);

    const std::string csv = trajectory_to_csv(tr);
    CHECK(csv.rfind("t,M,m,osc,grad_sup,grad_q", 0) == 0);
    Trajectory back = trajectory_from_csv(csv);
    REQUIRE(back.samples.size() == tr.samples.size());
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        CHECK(back.samples[i].t == tr.samples[i].t);
        CHECK(back.samples[i].max == tr.samples[i].max);
        CHECK(back.samples[i].min == tr.samples[i].min);
        CHECK(back.samples[i].grad_sup == tr.samples[i].grad_sup);
        CHECK(back.samples[i].grad_q == tr.samples[i].grad_q);
    }
    CHECK(back.steps == int(back.samples.size()) - 1);

    CHECK_THROWS(trajectory_from_csv("time,max\n0,1\n"));
}

TEST_CASE("run_experiment on constant data") {
    ExperimentConfig cfg = quick_config("flat");
    cfg.solver.record_stride = 1;   // the y-based checks need several samples
    cfg.checks.bernstein_sqrt = true;
    cfg.checks.bernstein_power = true;
    cfg.checks.window_decay = true;
    cfg.checks.envelope = true;
    cfg.checks.y_shape = true;

    Trajectory traj;
    Report rep = run_experiment(cfg, &traj);
    CHECK(rep.status == "PASSED");
    CHECK(rep.all_pass());
    CHECK(rep.error.empty());
    REQUIRE(rep.t_star.has_value());
    CHECK(*rep.t_star == 0.0);
    CHECK(!rep.checks.empty());
    CHECK(traj.osc0() == 0.0);
}

TEST_CASE("run_experiment writes artifacts") {
    TempDir tmp;
    ExperimentConfig cfg = quick_config("artifacts");
    cfg.out_dir = tmp.path.string();
    run_experiment(cfg);

    const fs::path dir = tmp.path / "artifacts";
    REQUIRE(fs::exists(dir / "report.json"));
    REQUIRE(fs::exists(dir / "trajectory.csv"));

    std::ifstream in(dir / "report.json");
    nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.at("status") == "PASSED");
    CHECK(j.at("id") == "artifacts");
    CHECK(j.contains("wall_ms"));
    CHECK(j.at("config").at("domain").at("cells")[0] == 65);
}

TEST_CASE("deterministic report serialization") {
    ExperimentConfig cfg = quick_config("det");
    cfg.initial.generator = "cosine_poly";
    cfg.initial.amplitude = 1.0;
    cfg.initial.seed = 5;
    Report a = run_experiment(cfg);
    Report b = run_experiment(cfg);
    CHECK(report_to_json_deterministic(a) == report_to_json_deterministic(b));
    CHECK(report_to_json(a).find("wall_ms") != std::string::npos);
    CHECK(report_to_json_deterministic(a).find("wall_ms") == std::string::npos);
}

TEST_CASE("presmoothing policy") {
    ExperimentConfig cfg = quick_config("smooth");
    cfg.initial.generator = "piecewise_linear";
    cfg.initial.seed = 7;
    cfg.initial.amplitude = 2.0;

    Trajectory smoothed;
    Report rep = run_experiment(cfg, &smoothed);
    CHECK(rep.warnings.empty());

    cfg.id = "raw";
    cfg.initial.raw = true;
    Trajectory raw;
    Report rep_raw = run_experiment(cfg, &raw);
    REQUIRE(!rep_raw.warnings.empty());
    CHECK(rep_raw.warnings.front().find("raw") != std::string::npos);
    CHECK(raw.osc0() == doctest::Approx(2.0).epsilon(1e-12));
    // smoothing rounds the kinks, so the raw run starts steeper
    CHECK(smoothed.samples.front().grad_sup < raw.samples.front().grad_sup);

    // cosine data is wall-compatible: auto presmooth is a no-op, no warning
    cfg = quick_config("compat");
    cfg.initial.generator = "cosine_poly";
    Trajectory cos_traj;
    Report rep_cos = run_experiment(cfg, &cos_traj);
    CHECK(rep_cos.warnings.empty());
    CHECK(cos_traj.osc0() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("blow-up is reported, not thrown") {
    ExperimentConfig cfg = quick_config("boom");
    cfg.hamiltonian = {1.0, 3.0, 0.0};
    cfg.solver.dt = 5.0;
    cfg.solver.t_end = 100.0;
    cfg.solver.record_stride = 1;
    cfg.initial.generator = "cosine_poly";
    cfg.initial.amplitude = 10.0;

    Report rep = run_experiment(cfg);
    CHECK(rep.status == "FAILED");
    CHECK(!rep.error.empty());
    CHECK(!rep.all_pass());
}

TEST_CASE("batch isolation and order stability") {
    std::vector<ExperimentConfig> cfgs;
    cfgs.push_back(quick_config("first"));

    ExperimentConfig boom = quick_config("boom");
    boom.hamiltonian = {1.0, 3.0, 0.0};
    boom.solver.dt = 5.0;
    boom.solver.t_end = 100.0;
    boom.initial.generator = "cosine_poly";
    boom.initial.amplitude = 10.0;
    cfgs.push_back(boom);

    ExperimentConfig bad = quick_config("bad");
    bad.initial.generator = "perlin";
    cfgs.push_back(bad);

    cfgs.push_back(quick_config("last"));

    auto serial = run_batch(cfgs, 1);
    REQUIRE(serial.size() == 4);
    CHECK(serial[0].status == "PASSED");
    CHECK(serial[1].status == "FAILED");
    CHECK(serial[2].status == "ERROR");
    CHECK(!serial[2].error.empty());
    CHECK(serial[3].status == "PASSED");
    CHECK(serial[0].id == "first");
    CHECK(serial[3].id == "last");

    auto parallel = run_batch(cfgs, 3);
    REQUIRE(parallel.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(report_to_json_deterministic(parallel[i]) ==
              report_to_json_deterministic(serial[i]));
}

TEST_CASE("fit plumbed through the report") {
    ExperimentConfig cfg = quick_config("fit");
    cfg.initial.generator = "cosine_poly";
    cfg.initial.amplitude = 1.0;
    cfg.solver.t_end = 0.5;
    cfg.solver.record_stride = 2;
    cfg.checks.fit = "exponential";
    Report rep = run_experiment(cfg);
    REQUIRE(rep.fit.has_value());
    CHECK(rep.fit->rate > 8.0);    // heat decay at pi^2 plus the Hamiltonian drift
    CHECK(rep.fit->r_squared > 0.99);

    cfg.checks.fit = "sideways";
    CHECK_THROWS(run_experiment(cfg));
}
