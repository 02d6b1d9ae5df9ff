#include "vhj/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "vhj/domain.hpp"
#include "vhj/estimates.hpp"
#include "vhj/experiment.hpp"
#include "vhj/hamiltonian.hpp"
#include "vhj/heat.hpp"
#include "vhj/solver.hpp"

namespace vhj::acceptance {

namespace {

std::string strf(const char* fmt, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

Field seeded_cosine(const Domain& dom, std::uint64_t seed, double osc) {
    InitialSpec spec;
    spec.generator = "cosine_poly";
    spec.seed = seed;
    spec.amplitude = osc;
    spec.modes = 6;
    return generate_initial_data(spec, dom);
}

Field axis_cosine(const Domain& dom, double amp) {
    Field f(dom.size());
    const int n = dom.cells[0];
    for (int i = 0; i < n; ++i) f[i] = amp * std::cos(M_PI * i / (n - 1));
    return f;
}

// the p < 1 runs sit on the spurious discrete gradient floor after the data
// extinguishes; the oscillation bounds are only meaningful on the leading
// resolved window, so drop samples once osc falls below frac * osc(0)
Trajectory trim_resolved(Trajectory traj, double frac) {
    const double floor = frac * traj.osc0();
    std::size_t keep = traj.samples.size();
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        if (traj.samples[i].osc() < floor) {
            keep = i;
            break;
        }
    keep = std::max<std::size_t>(keep, 2);
    if (keep < traj.samples.size()) traj.samples.resize(keep);
    return traj;
}

struct GradSuite {
    bool sqrt_pass = true, power_pass = true;
    double worst_sqrt = 1e300, worst_power = 1e300;
    std::string sqrt_at, power_at;
};

struct ShapeCase {
    Trajectory traj;
    double gamma = 0.0;
    std::string label;
};

struct Context {
    std::optional<GradSuite> grad;
    std::vector<ShapeCase> shape_cases;   // filled by the p >= 1 decay criteria
    bool have_p1 = false, have_p2 = false;
};

const GradSuite& ensure_grad_suite(Context& ctx) {
    if (ctx.grad) return *ctx.grad;
    GradSuite gs;
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    for (double p : {0.5, 1.0, 2.0, 3.0})
        for (double a : {1.0, -1.0})
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                Field mu0 = seeded_cosine(dom, seed, 2.0);
                SolverConfig cfg;
                cfg.t_end = p < 1.0 ? 0.75 : 1.0;
                cfg.record_stride = 4;
                Trajectory traj = run(plan, mu0, {a, p, 0.0}, cfg);
                if (p < 1.0) traj = trim_resolved(traj, 1e-4);
                const BoundReport br = check_gradient_bounds(traj, a, p, 0.05);
                if (const BoundRecord* r = br.find("grad_sqrt")) {
                    gs.sqrt_pass = gs.sqrt_pass && r->pass;
                    if (r->margin < gs.worst_sqrt) {
                        gs.worst_sqrt = r->margin;
                        gs.sqrt_at = strf("p=%g a=%+g seed %llu", p, a,
                                          static_cast<unsigned long long>(seed));
                    }
                }
                if (const BoundRecord* r = br.find("grad_power")) {
                    gs.power_pass = gs.power_pass && r->pass;
                    if (r->margin < gs.worst_power) {
                        gs.worst_power = r->margin;
                        gs.power_at = strf("p=%g a=%+g seed %llu", p, a,
                                           static_cast<unsigned long long>(seed));
                    }
                }
            }
    ctx.grad = std::move(gs);
    return *ctx.grad;
}

void ensure_p1_runs(Context& ctx) {
    if (ctx.have_p1) return;
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    Field mu0 = axis_cosine(dom, 1.0);
    const double gamma = decay_params(1, 1.0, default_beta(1, 1.0)).gamma;
    for (double a : {1.0, -1.0}) {
        SolverConfig cfg;
        cfg.t_end = 1.5;
        cfg.record_stride = 4;
        Trajectory traj = run(plan, mu0, {a, 1.0, 0.0}, cfg);
        ctx.shape_cases.push_back(
            {std::move(traj), gamma, strf("p=1 a=%+g", a)});
    }
    ctx.have_p1 = true;
}

void ensure_p2_run(Context& ctx) {
    if (ctx.have_p2) return;
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    Field mu0 = seeded_cosine(dom, 1, 2.0);
    SolverConfig cfg;
    cfg.t_end = 1.2;
    cfg.record_stride = 1;   // the envelope constant needs dense samples
    Trajectory traj = run(plan, mu0, {1.0, 2.0, 0.0}, cfg);
    const double gamma = decay_params(1, 2.0, 5.5).gamma;
    ctx.shape_cases.push_back({std::move(traj), gamma, "p=2 a=+1"});
    ctx.have_p2 = true;
}

const ShapeCase* find_case(const Context& ctx, const std::string& label) {
    for (const auto& c : ctx.shape_cases)
        if (c.label == label) return &c;
    return nullptr;
}

CriterionResult c1_oracle(Context&) {
    CriterionResult r{1, "solver vs exact p=2 oracle", false, false, ""};
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    Field mu0 = axis_cosine(dom, 0.5);
    bool ok = true;
    std::string d;
    for (double a : {1.0, -1.0}) {
        const Field ref = cole_hopf_oracle(plan, mu0, a, 0.5);
        double err[2] = {0.0, 0.0};
        for (int k = 0; k < 2; ++k) {
            SolverConfig cfg;
            cfg.t_end = 0.5;
            cfg.dt = k == 0 ? 1e-4 : 5e-5;
            cfg.record_stride = 1 << 20;
            Trajectory tr = run(plan, mu0, {a, 2.0, 0.0}, cfg);
            for (std::size_t i = 0; i < ref.size(); ++i)
                err[k] = std::max(err[k], std::abs(tr.final_field[i] - ref[i]));
        }
        const double ratio = err[0] / std::max(err[1], 1e-300);
        ok = ok && err[0] <= 1e-3 && ratio >= 1.8;
        d += strf("a=%+g err %.3g halving ratio %.2f; ", a, err[0], ratio);
    }
    r.pass = ok;
    r.detail = d;
    return r;
}

CriterionResult c2_sqrt_bound(Context& ctx) {
    CriterionResult r{2, "sqrt-in-time gradient bound", false, false, ""};
    const GradSuite& gs = ensure_grad_suite(ctx);
    r.pass = gs.sqrt_pass;
    r.detail = strf("40 runs; worst margin %+.4f (%s), threshold -0.05",
                    gs.worst_sqrt, gs.sqrt_at.c_str());
    return r;
}

CriterionResult c3_power_bound(Context& ctx) {
    CriterionResult r{3, "power-law gradient bound", false, false, ""};
    const GradSuite& gs = ensure_grad_suite(ctx);
    r.pass = gs.power_pass;
    r.detail = strf("30 runs (p != 1); worst margin %+.4f (%s), threshold -0.05",
                    gs.worst_power, gs.power_at.c_str());
    return r;
}

CriterionResult c4_extinction(Context&) {
    CriterionResult r{4, "finite-time gradient extinction (p<1)", false, false, ""};
    bool all_pass = true, any_fail = false, all_fail_floorish = true;
    std::string d;
    struct Probe {
        int dim, cells;
        double t_end;
    };
    for (const Probe pr : {Probe{1, 257, 3.0}, Probe{2, 129, 1.0}}) {
        const Domain dom = pr.dim == 1 ? Domain(1.0, pr.cells)
                                       : Domain(1.0, 1.0, pr.cells, pr.cells);
        SpectralPlan plan(dom);
        Field mu0 = seeded_cosine(dom, 1, 2.0);
        for (double a : {1.0, -1.0}) {
            SolverConfig cfg;
            cfg.t_end = pr.t_end;
            cfg.record_stride = 4;
            Trajectory traj;
            try {
                traj = run(plan, mu0, {a, 0.5, 0.0}, cfg);
            } catch (const BlowupError& e) {
                all_pass = false;
                any_fail = true;
                all_fail_floorish = false;
                d += strf("%dD a=%+g: blow-up at t=%.3g; ", pr.dim, a, e.t);
                continue;
            }
            if (traj.t_star) {
                const double ts = *traj.t_star;
                bool run_ok = ts <= 50.0;
                const double t_hi = std::min(2.0 * ts, traj.samples.back().t);
                for (const Sample& s : traj.samples)
                    if (s.t >= ts && s.t <= t_hi && s.osc() >= 1e-6) run_ok = false;
                all_pass = all_pass && run_ok;
                if (!run_ok) {
                    any_fail = true;
                    all_fail_floorish = false;
                }
                d += strf("%dD a=%+g: t*=%.3g%s; ", pr.dim, a, ts,
                          run_ok ? "" : " tail above 1e-6");
            } else {
                all_pass = false;
                any_fail = true;
                double gmin = 1e300, omin = 1e300;
                for (const Sample& s : traj.samples)
                    if (s.t > 0.0) {
                        gmin = std::min(gmin, s.grad_sup);
                        omin = std::min(omin, s.osc());
                    }
                const bool floorish = omin < 1e-6 && gmin > traj.tau_ext;
                all_fail_floorish = all_fail_floorish && floorish;
                d += strf("%dD a=%+g: no t* by t=%.2g, grad floor %.2g > tau %.2g, "
                          "osc floor %.2g; ",
                          pr.dim, a, pr.t_end, gmin, traj.tau_ext, omin);
            }
        }
    }
    r.pass = all_pass;
    r.known_limitation = any_fail && all_fail_floorish;
    r.detail = d;
    return r;
}

CriterionResult c5_exponential(Context& ctx) {
    CriterionResult r{5, "exponential oscillation decay (p=1)", false, false, ""};
    ensure_p1_runs(ctx);
    bool ok = true;
    std::string d;
    for (double a : {1.0, -1.0}) {
        const ShapeCase* sc = find_case(ctx, strf("p=1 a=%+g", a));
        const FitResult fit =
            fit_decay_rate(sc->traj, DecayModel::exponential, 0.5);
        ok = ok && fit.rate > 0.0 && fit.r_squared >= 0.99;
        d += strf("a=%+g rate %.3f R2 %.6f; ", a, fit.rate, fit.r_squared);
    }
    r.pass = ok;
    r.detail = d;
    return r;
}

CriterionResult c6_algebraic(Context& ctx) {
    CriterionResult r{6, "algebraic decay envelope (p>1)", false, false, ""};
    ensure_p2_run(ctx);
    const ShapeCase* sc = find_case(ctx, "p=2 a=+1");
    const Trajectory& traj = sc->traj;

    double worst_rise = -1e300;
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
        worst_rise = std::max(
            worst_rise, traj.samples[i + 1].osc() - traj.samples[i].osc());
    const bool mono = worst_rise <= 1e-12 * traj.osc0();

    const DecayParams params = decay_params(1, 2.0, 5.5);
    const BoundReport wd = window_decay_check(traj, params.gamma, 0.05);
    const Envelope env = empirical_envelope(traj, params, 0.05);
    const bool ok = mono && wd.all_pass() && env.report.all_pass() &&
                    std::isfinite(env.C_emp) && env.C_emp > 0.0;
    r.pass = ok;
    r.detail = strf("monotone%s (worst rise %.2g); window margin %+.4f; "
                    "C_emp %.3g, envelope margin %+.4f",
                    mono ? "" : " VIOLATED", worst_rise,
                    wd.find("window_decay")->margin, env.C_emp,
                    env.report.find("envelope_y")->margin);
    return r;
}

CriterionResult c7_y_shape(Context& ctx) {
    CriterionResult r{7, "y-functional monotone and convex", false, false, ""};
    ensure_p1_runs(ctx);
    ensure_p2_run(ctx);
    if (!find_case(ctx, "p=3 a=+1")) {
        Domain dom(1.0, 257);
        SpectralPlan plan(dom);
        Field mu0 = seeded_cosine(dom, 1, 2.0);
        SolverConfig cfg;
        cfg.t_end = 1.0;
        cfg.record_stride = 4;
        Trajectory traj = run(plan, mu0, {1.0, 3.0, 0.0}, cfg);
        const double gamma = decay_params(1, 3.0, default_beta(1, 3.0)).gamma;
        ctx.shape_cases.push_back({std::move(traj), gamma, "p=3 a=+1"});
    }
    bool ok = true;
    double worst = 1e300;
    std::string worst_at;
    for (const ShapeCase& sc : ctx.shape_cases) {
        const BoundReport sr = y_shape_check(sc.traj, sc.gamma, 1e-8);
        ok = ok && sr.all_pass();
        for (const BoundRecord& rec : sr.records)
            if (rec.margin < worst) {
                worst = rec.margin;
                worst_at = sc.label + " " + rec.name;
            }
    }
    r.pass = ok;
    r.detail = strf("%zu runs (p=1,2,3); worst margin %+.3g (%s) at tol 1e-8",
                    ctx.shape_cases.size(), worst, worst_at.c_str());
    return r;
}

CriterionResult c8_bernstein(Context&) {
    CriterionResult r{8, "pointwise Bernstein quotient", false, false, ""};
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    bool ok = true;
    double worst = 1e300;
    std::string d;
    struct Case {
        double p, t_end;
    };
    for (const Case cs : {Case{0.5, 0.5}, Case{1.0, 1.0}})
        for (double a : {1.0, -1.0}) {
            Field mu0 = seeded_cosine(dom, 1, 2.0);
            SolverConfig cfg;
            cfg.t_end = cs.t_end;
            cfg.record_stride = 4;
            cfg.snapshot_every = 1;
            Trajectory traj = run(plan, mu0, {a, cs.p, 0.0}, cfg);
            const double delta = 0.01 * traj.osc0();
            const BoundReport bs = bernstein_diagnostic(
                dom, traj, a, cs.p, BernsteinCase::sqrt_case, delta, 0.05);
            ok = ok && bs.all_pass();
            worst = std::min(worst, bs.find("bernstein_sqrt")->margin);
            if (cs.p < 1.0) {
                const BoundReport bp = bernstein_diagnostic(
                    dom, traj, a, cs.p, BernsteinCase::power_case, delta, 0.05);
                ok = ok && bp.all_pass();
                worst = std::min(worst, bp.find("bernstein_power")->margin);
            }
        }
    r.pass = ok;
    r.detail = strf("p=0.5 and p=1, a=+-1, delta=1%% of osc(0); worst margin %+.4f",
                    worst);
    return r;
}

CriterionResult c9_hamiltonian(Context&) {
    CriterionResult r{9, "Hamiltonian structural properties", false, false, ""};
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    bool ok = true;
    double worst_holder = 1e300, worst_defect = 0.0, worst_mono = 1e300;
    for (double p : {0.5, 1.0, 1.5, 2.0, 3.0})
        for (int it = 0; it < 10000; ++it) {
            const double rho = 0.1 + 4.9 * u01();
            const double x1 = rho * u01(), x2 = rho * u01();
            const double eps = 0.8 * u01();
            const double gap = holder_gap(x1 * x1, x2 * x2, rho, {1.0, p, eps});
            worst_holder = std::min(worst_holder, gap);
            ok = ok && gap >= -1e-12;

            const double s = 25.0 * u01();
            for (double a : {1.0, -1.0}) {
                const double dft = structural_defect(s, {a, p, eps});
                const double signed_d = a > 0 ? dft : -dft;
                double excess;
                if (p <= 1.0)
                    excess = signed_d;           // contract: <= 0
                else if (p < 2.0)
                    excess = -signed_d;          // contract: >= 0
                else
                    excess = std::abs(dft);      // contract: == 0
                worst_defect = std::max(worst_defect, excess);
                ok = ok && excess <= 1e-12;
            }

            const double e1 = 0.4 * u01();
            const double e2 = e1 + (0.79 - e1) * u01() + 1e-9;
            const double f1 = f_eps(s, {1.0, p, e1});
            const double f2 = f_eps(s, {1.0, p, e2});
            const double mono = p <= 1.0 ? f2 - f1 : f1 - f2;
            worst_mono = std::min(worst_mono, mono);
            ok = ok && mono >= -1e-12;
        }
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    ok = ok && ms < 1000.0;
    r.pass = ok;
    r.detail = strf("5 branches x 1e4 samples in %.0f ms; worst holder gap %.2g, "
                    "defect excess %.2g, eps-monotonicity %.2g",
                    ms, worst_holder, worst_defect, worst_mono);
    return r;
}

CriterionResult c10_poincare(Context&) {
    CriterionResult r{10, "sup-norm Poincare inequality", false, false, ""};
    bool ok = true;
    double worst1 = 0.0, worst2 = 0.0;
    {
        Domain dom(1.0, 257);
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const Field f = seeded_cosine(dom, seed, 2.0);
            const PoincarePair pc = poincare_check(dom, f, 2.0);
            ok = ok && pc.lhs <= pc.rhs * (1.0 + 1e-12);
            worst1 = std::max(worst1, pc.lhs / pc.rhs);
        }
    }
    {
        Domain dom(1.0, 1.0, 129, 129);
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const Field f = seeded_cosine(dom, seed, 2.0);
            const PoincarePair pc = poincare_check(dom, f, 3.0);
            ok = ok && pc.lhs <= pc.rhs * (1.0 + 1e-12);
            worst2 = std::max(worst2, pc.lhs / pc.rhs);
        }
    }
    r.pass = ok;
    r.detail = strf("100 fields each; worst lhs/rhs %.4f (1D, q=2), %.4f (2D, q=3)",
                    worst1, worst2);
    return r;
}

CriterionResult c11_smoothing(Context&) {
    CriterionResult r{11, "smoothing sequence construction", false, false, ""};
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    InitialSpec sp;
    sp.generator = "piecewise_linear";
    sp.seed = 7;
    sp.amplitude = 2.0;
    const Field mu0 = generate_initial_data(sp, dom);
    const MaxMin mm = max_min(mu0);

    bool bounds_ok = true, band_ok = true, dec_ok = true;
    Field prev;
    for (int n = 1; n <= 8; ++n) {
        const Smoothed sm = smoothing_sequence(plan, mu0, n);
        const double lo = mm.min + std::ldexp(1.0, -(n + 1));
        const double hi = mm.max + std::ldexp(1.0, -(n - 1));
        double dev = 0.0;
        for (std::size_t i = 0; i < mu0.size(); ++i) {
            bounds_ok = bounds_ok && sm.u0n[i] >= lo - 1e-12 && sm.u0n[i] <= hi + 1e-12;
            dev = std::max(dev, std::abs(sm.u0n[i] - (mu0[i] + std::ldexp(1.0, -n))));
            if (n > 1) dec_ok = dec_ok && sm.u0n[i] < prev[i];
        }
        band_ok = band_ok && dev > std::ldexp(1.0, -(n + 3)) &&
                  dev < std::ldexp(1.0, -(n + 2));
        prev = sm.u0n;
    }
    r.pass = bounds_ok && band_ok && dec_ok;
    r.detail = strf("n=1..8: nodewise bounds %s, displacement band %s, "
                    "strictly decreasing in n %s",
                    bounds_ok ? "ok" : "VIOLATED", band_ok ? "ok" : "VIOLATED",
                    dec_ok ? "ok" : "VIOLATED");
    return r;
}

CriterionResult c12_comparison(Context&) {
    CriterionResult r{12, "ordered-data comparison principle", false, false, ""};
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double ps[3] = {0.5, 1.0, 2.0};
        const double p = ps[seed % 3];
        const double a = seed % 2 == 0 ? 1.0 : -1.0;
        const Field lo = seeded_cosine(dom, seed, 2.0);
        const Field pert = seeded_cosine(dom, seed + 100, 1.0);
        const double pmin = *std::min_element(pert.begin(), pert.end());
        Field hi = lo;
        for (std::size_t i = 0; i < hi.size(); ++i)
            hi[i] += (pert[i] - pmin) * 0.5;
        SolverConfig cfg;
        cfg.t_end = 0.3;
        cfg.sigma = 0.25;
        cfg.record_stride = 4;
        const PairResult pr = run_pair(plan, lo, hi, {a, p, 0.0}, cfg);
        worst = std::max(worst, pr.max_violation);
    }
    r.pass = worst <= 1e-8;
    r.detail = strf("20 ordered pairs, p in {0.5,1,2}, sigma=0.25; "
                    "max ordering violation %.3g (allowed 1e-8)",
                    worst);
    return r;
}

std::string traj_diff(const Trajectory& x, const Trajectory& y) {
    if (x.samples.size() != y.samples.size()) return "sample count differs";
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        const Sample &s = x.samples[i], &t = y.samples[i];
        if (s.t != t.t || s.max != t.max || s.min != t.min ||
            s.grad_sup != t.grad_sup || s.grad_q != t.grad_q ||
            s.drift_allowance != t.drift_allowance)
            return strf("sample %zu differs", i);
    }
    if (x.final_field != y.final_field) return "final field differs";
    if (x.t_star.has_value() != y.t_star.has_value() ||
        (x.t_star && *x.t_star != *y.t_star))
        return "t_star differs";
    if (x.steps != y.steps) return "step count differs";
    if (x.snapshots.size() != y.snapshots.size()) return "snapshot count differs";
    for (std::size_t i = 0; i < x.snapshots.size(); ++i)
        if (x.snapshots[i].t != y.snapshots[i].t ||
            x.snapshots[i].u != y.snapshots[i].u)
            return strf("snapshot %zu differs", i);
    return "";
}

CriterionResult c13_determinism(Context&) {
    CriterionResult r{13, "determinism and negation symmetry", false, false, ""};
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    const Field mu0 = seeded_cosine(dom, 3, 2.0);
    SolverConfig cfg;
    cfg.t_end = 0.4;
    cfg.record_stride = 4;
    cfg.snapshot_every = 2;
    const HamiltonianSpec hs{1.0, 1.5, 0.0};

    const Trajectory t1 = run(plan, mu0, hs, cfg);
    const Trajectory t2 = run(plan, mu0, hs, cfg);
    std::string rerun = traj_diff(t1, t2);

    Field neg(mu0.size());
    for (std::size_t i = 0; i < mu0.size(); ++i) neg[i] = -mu0[i];
    const Trajectory t3 = run(plan, neg, {-hs.a, hs.p, hs.eps}, cfg);
    std::string mirror = traj_diff(t1, t3.negated());

    // batch reports must not depend on the parallelism degree
    std::vector<ExperimentConfig> cfgs(3);
    for (int i = 0; i < 3; ++i) {
        ExperimentConfig& c = cfgs[i];
        c.id = strf("det%d", i);
        c.cells = {129, 1};
        const double ps[3] = {1.0, 2.0, 0.5};
        c.hamiltonian.p = ps[i];
        c.hamiltonian.a = i % 2 == 0 ? 1.0 : -1.0;
        c.initial.seed = static_cast<std::uint64_t>(i) + 1;
        c.solver.t_end = 0.2;
        c.solver.record_stride = 8;
    }
    const auto b1 = run_batch(cfgs, 1);
    const auto b3 = run_batch(cfgs, 3);
    bool batch_ok = b1.size() == b3.size();
    for (std::size_t i = 0; batch_ok && i < b1.size(); ++i)
        batch_ok = report_to_json_deterministic(b1[i]) ==
                   report_to_json_deterministic(b3[i]);

    r.pass = rerun.empty() && mirror.empty() && batch_ok;
    r.detail = strf("rerun %s; negation mirror %s; batch parallelism 1 vs 3 %s",
                    rerun.empty() ? "bit-identical" : rerun.c_str(),
                    mirror.empty() ? "exact" : mirror.c_str(),
                    batch_ok ? "identical reports" : "REPORTS DIFFER");
    return r;
}

} // namespace

std::vector<CriterionResult> run_all(std::ostream& out, int only) {
    using Fn = CriterionResult (*)(Context&);
    const Fn table[13] = {c1_oracle,      c2_sqrt_bound, c3_power_bound,
                          c4_extinction,  c5_exponential, c6_algebraic,
                          c7_y_shape,     c8_bernstein,  c9_hamiltonian,
                          c10_poincare,   c11_smoothing, c12_comparison,
                          c13_determinism};
    Context ctx;
    std::vector<CriterionResult> rs;
    for (int i = 1; i <= 13; ++i) {
        if (only != 0 && only != i) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r = table[i - 1](ctx);
        const double sec = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        out << strf("[%2d] %-23s %-42s | %s (%.1fs)\n", r.index,
                    r.pass ? "PASS"
                           : (r.known_limitation ? "FAIL (known limitation)"
                                                 : "FAIL"),
                    r.name.c_str(), r.detail.c_str(), sec);
        out.flush();
        rs.push_back(std::move(r));
    }
    int passed = 0, known = 0, failed = 0;
    for (const auto& r : rs)
        if (r.pass)
            ++passed;
        else if (r.known_limitation)
            ++known;
        else
            ++failed;
    out << strf("%d passed, %d failed, %d known limitation(s)\n", passed,
                failed, known);
    return rs;
}

int unexpected_failures(const std::vector<CriterionResult>& results) {
    int n = 0;
    for (const auto& r : results)
        if (!r.pass && !r.known_limitation) ++n;
    return n;
}

} // namespace vhj::acceptance
