#include "vhj/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vhj {

namespace {

constexpr double kEpsSnap = 1e-13;   // geometric eps below this snaps to eps_min

bool all_equal(const Field& f) {
    for (double v : f)
        if (v != f[0]) return false;
    return true;
}

double schedule_eps(const SolverConfig& cfg, double eps0, int step_index) {
    if (eps0 <= cfg.eps_min) return cfg.eps_min;
    const int phase = step_index / cfg.eps_phase_steps;
    const double e = eps0 * std::pow(cfg.eps_factor, phase);
    if (e < std::max(cfg.eps_min, kEpsSnap)) return cfg.eps_min;
    return e;
}

// characteristic speed of the Hamiltonian term, p|a|G^{p-1}. For p < 1 the
// formula blows up as G -> 0 although nothing propagates any more; once G is
// below the extinction threshold the term is inert and the speed is dropped.
double wave_speed(double G, double a, double p, double tau_ext) {
    if (G <= 0.0) return 0.0;
    if (p < 1.0 && G < tau_ext) return 0.0;
    return p * a * std::pow(G, p - 1.0);
}

struct StepWork {
    Field grad;    // |grad u|
    Field buf;     // rhs, then mode coefficients
};

// shared IMEX kernel: u <- (I - dt Lap)^{-1} (u + dt f_eps(|grad u|^2)).
// grad must already hold gradient_magnitude(u). Keeps constants exact:
// a constant rhs bypasses the transforms (constant mode is an eigenvector).
void advance(const SpectralPlan& plan, Field& u, const Field& grad, double dt,
             const HamiltonianSpec& spec, Field& buf, double t_fail) {
    buf.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        buf[i] = u[i] + dt * f_eps(grad[i] * grad[i], spec);
    if (all_equal(buf)) {
        u = buf;
    } else {
        plan.execute(buf.data(), buf.data());
        const auto& lam = plan.eigenvalues();
        const double s = plan.scale();
        for (std::size_t k = 0; k < buf.size(); ++k)
            buf[k] *= s / (1.0 + dt * lam[k]);
        plan.execute(buf.data(), u.data());
    }
    for (double v : u)
        if (!std::isfinite(v)) throw BlowupError(t_fail);
}

struct Resolved {
    double eps0, tau_ext, q;
};

Resolved resolve_osc(const SpectralPlan& plan, const SolverConfig& cfg, double osc0,
                     double p) {
    const Domain& dom = plan.domain();
    Resolved r{};
    r.eps0 = cfg.eps0 >= 0.0 ? cfg.eps0 : std::min(dom.h_min(), 0.5);
    // the p >= 2 branch never reads eps, so start the schedule converged;
    // otherwise short runs would report a meaningless unconverged warning
    // and a nonzero drift allowance
    if (p >= 2.0) r.eps0 = cfg.eps_min;
    if (cfg.tau_ext > 0.0) {
        r.tau_ext = cfg.tau_ext;
    } else {
        const double minL = dom.dim == 2 ? std::min(dom.length[0], dom.length[1])
                                         : dom.length[0];
        // constant data has oscillation 0; any positive threshold then detects
        // the (exactly preserved) constant state, so fall back to unit scale
        r.tau_ext = 1e-8 * (M_PI / minL) * (osc0 > 0.0 ? osc0 : 1.0);
    }
    r.q = cfg.grad_q > 0.0 ? cfg.grad_q : dom.dim + 1;
    return r;
}

Resolved resolve(const SpectralPlan& plan, const Field& mu0, const SolverConfig& cfg,
                 double p) {
    return resolve_osc(plan, cfg, oscillation(mu0), p);
}

void detect_t_star(Trajectory& traj) {
    const auto& s = traj.samples;
    std::size_t first_ok = s.size();
    for (std::size_t i = s.size(); i-- > 0;) {
        if (s[i].grad_sup < traj.tau_ext)
            first_ok = i;
        else
            break;
    }
    if (first_ok < s.size()) traj.t_star = s[first_ok].t;
}

Trajectory run_positive(const SpectralPlan& plan, const Field& mu0,
                        const HamiltonianSpec& spec, const SolverConfig& cfg,
                        const Resolved& res) {
    const Domain& dom = plan.domain();
    Trajectory traj;
    traj.tau_ext = res.tau_ext;
    traj.q = res.q;

    Field u = mu0;
    Field grad = gradient_magnitude(dom, u);
    Field buf;
    double t = 0.0, cum_drift = 0.0, eps_now = res.eps0;
    int snap_stride = cfg.snapshot_every;

    auto record = [&]() {
        auto mm = max_min(u);
        Sample smp;
        smp.t = t;
        smp.max = mm.max;
        smp.min = mm.min;
        smp.grad_sup = sup_norm(grad);
        smp.grad_q = q_norm(dom, grad, res.q);
        smp.drift_allowance = cum_drift;
        traj.samples.push_back(smp);
        if (snap_stride > 0 && (traj.samples.size() - 1) % snap_stride == 0) {
            traj.snapshots.push_back({traj.samples.size() - 1, t, u});
            if (cfg.snapshot_cap > 0 &&
                traj.snapshots.size() > static_cast<std::size_t>(cfg.snapshot_cap)) {
                std::vector<Snapshot> kept;
                for (std::size_t i = 0; i < traj.snapshots.size(); i += 2)
                    kept.push_back(std::move(traj.snapshots[i]));
                traj.snapshots = std::move(kept);
                snap_stride *= 2;
            }
        }
    };

    record();
    const double t_stop = cfg.t_end * (1.0 - 1e-15);
    while (t < t_stop) {
        eps_now = schedule_eps(cfg, res.eps0, traj.steps);
        HamiltonianSpec eff = spec;
        eff.eps = eps_now;

        double dt;
        if (cfg.dt > 0.0) {
            dt = cfg.dt;
        } else {
            const double G = sup_norm(grad);
            dt = cfg.sigma * dom.h_min() /
                 std::max(1.0, wave_speed(G, spec.a, spec.p, res.tau_ext));
        }
        dt = std::min(dt, cfg.t_end - t);
        if (!(dt > 0.0) || t + dt == t) break;   // dt underflow guard

        advance(plan, u, grad, dt, eff, buf, t + dt);
        t += dt;
        ++traj.steps;
        if (eps_now > 0.0 && spec.p < 2.0)
            cum_drift += dt * spec.a * std::pow(eps_now, spec.p / 2.0);
        grad = gradient_magnitude(dom, u);
        if (traj.steps % cfg.record_stride == 0 || t >= t_stop) record();
    }
    if (traj.samples.back().t < t) record();   // ensure the final state is sampled

    traj.final_field = std::move(u);
    traj.eps_unconverged = eps_now > cfg.eps_min;
    detect_t_star(traj);
    return traj;
}

} // namespace

void validate(const SolverConfig& cfg) {
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (cfg.dt < 0.0) throw std::invalid_argument("fixed dt must be positive");
    if (cfg.dt == 0.0 && !(cfg.sigma > 0.0 && cfg.sigma <= 1.0))
        throw std::invalid_argument("sigma must lie in (0, 1]");
    if (cfg.eps0 >= 1.0) throw std::invalid_argument("eps0 must lie in [0, 1)");
    if (cfg.eps0 >= 0.0 && cfg.eps_min > cfg.eps0)
        throw std::invalid_argument("eps schedule needs eps0 >= eps_min >= 0");
    if (cfg.eps_min < 0.0) throw std::invalid_argument("eps_min must be >= 0");
    if (!(cfg.eps_factor > 0.0 && cfg.eps_factor <= 1.0))
        throw std::invalid_argument("eps_factor must lie in (0, 1]");
    if (cfg.eps_phase_steps < 1) throw std::invalid_argument("phase length must be >= 1");
    if (cfg.record_stride < 1) throw std::invalid_argument("record stride must be >= 1");
    if (cfg.snapshot_every < 0 || cfg.snapshot_cap < 0)
        throw std::invalid_argument("snapshot policy fields must be >= 0");
    if (cfg.grad_q != 0.0 && cfg.grad_q < 1.0)
        throw std::invalid_argument("grad_q must be >= 1 (or 0 for the default)");
}

BlowupError::BlowupError(double when)
    : std::runtime_error("solution blew up (non-finite values) at t = " +
                         std::to_string(when)),
      t(when) {}

Trajectory Trajectory::negated() const {
    Trajectory out = *this;
    for (auto& s : out.samples) {
        const double mx = s.max, mn = s.min;
        s.max = -mn;
        s.min = -mx;
    }
    for (auto& sn : out.snapshots)
        for (double& v : sn.u) v = -v;
    for (double& v : out.final_field) v = -v;
    return out;
}

Field step(const SpectralPlan& plan, const Field& u, double dt,
           const HamiltonianSpec& spec) {
    if (!(dt > 0.0)) throw std::invalid_argument("step requires dt > 0");
    if (spec.a < 0.0)
        throw std::invalid_argument("step requires a >= 0 (run handles the sign flip)");
    validate(spec);
    require_match(plan.domain(), u);
    Field out = u;
    Field grad = gradient_magnitude(plan.domain(), u);
    Field buf;
    advance(plan, out, grad, dt, spec, buf, dt);
    return out;
}

Trajectory run(const SpectralPlan& plan, const Field& mu0,
               const HamiltonianSpec& spec, const SolverConfig& cfg) {
    validate(spec);
    validate(cfg);
    require_match(plan.domain(), mu0);
    const Resolved res = resolve(plan, mu0, cfg, spec.p);
    if (spec.a < 0.0) {
        Field flipped(mu0);
        for (double& v : flipped) v = -v;
        HamiltonianSpec pos = spec;
        pos.a = -spec.a;
        return run_positive(plan, flipped, pos, cfg, res).negated();
    }
    return run_positive(plan, mu0, spec, cfg, res);
}

PairResult run_pair(const SpectralPlan& plan, const Field& mu0_low,
                    const Field& mu0_high, const HamiltonianSpec& spec,
                    const SolverConfig& cfg) {
    validate(spec);
    validate(cfg);
    const Domain& dom = plan.domain();
    require_match(dom, mu0_low);
    require_match(dom, mu0_high);
    for (std::size_t i = 0; i < mu0_low.size(); ++i)
        if (mu0_low[i] > mu0_high[i])
            throw std::invalid_argument("run_pair requires mu0_low <= mu0_high nodewise");

    if (spec.a < 0.0) {
        // u -> -u maps the a<0 problem to a>0 and swaps the ordering
        Field lo(mu0_high), hi(mu0_low);
        for (double& v : lo) v = -v;
        for (double& v : hi) v = -v;
        HamiltonianSpec pos = spec;
        pos.a = -spec.a;
        PairResult inner = run_pair(plan, lo, hi, pos, cfg);
        return {inner.high.negated(), inner.low.negated(), inner.max_violation};
    }

    // both runs share tau_ext and eps0, resolved from the wider oscillation
    // so the result is invariant under the a<0 flip above
    Resolved res = resolve_osc(
        plan, cfg, std::max(oscillation(mu0_low), oscillation(mu0_high)), spec.p);

    Field ul = mu0_low, uh = mu0_high;
    Field gl = gradient_magnitude(dom, ul), gh = gradient_magnitude(dom, uh);
    Field buf;
    Trajectory tl, th;
    tl.tau_ext = th.tau_ext = res.tau_ext;
    tl.q = th.q = res.q;
    double t = 0.0, violation = 0.0;
    int steps = 0;

    auto record = [&](Trajectory& traj, const Field& u, const Field& g, double drift) {
        auto mm = max_min(u);
        traj.samples.push_back({t, mm.max, mm.min, sup_norm(g),
                                q_norm(dom, g, res.q), drift});
    };
    record(tl, ul, gl, 0.0);
    record(th, uh, gh, 0.0);

    double cum_drift = 0.0;
    const double t_stop = cfg.t_end * (1.0 - 1e-15);
    while (t < t_stop) {
        const double eps_now = schedule_eps(cfg, res.eps0, steps);
        HamiltonianSpec eff = spec;
        eff.eps = eps_now;
        double dt;
        if (cfg.dt > 0.0) {
            dt = cfg.dt;
        } else {
            const double G = std::max(sup_norm(gl), sup_norm(gh));
            dt = cfg.sigma * dom.h_min() /
                 std::max(1.0, wave_speed(G, spec.a, spec.p, res.tau_ext));
        }
        dt = std::min(dt, cfg.t_end - t);
        if (!(dt > 0.0) || t + dt == t) break;

        advance(plan, ul, gl, dt, eff, buf, t + dt);
        advance(plan, uh, gh, dt, eff, buf, t + dt);
        t += dt;
        ++steps;
        if (eps_now > 0.0 && spec.p < 2.0)
            cum_drift += dt * spec.a * std::pow(eps_now, spec.p / 2.0);
        gl = gradient_magnitude(dom, ul);
        gh = gradient_magnitude(dom, uh);
        for (std::size_t i = 0; i < ul.size(); ++i)
            violation = std::max(violation, ul[i] - uh[i]);

        if (steps % cfg.record_stride == 0 || t >= t_stop) {
            record(tl, ul, gl, cum_drift);
            record(th, uh, gh, cum_drift);
        }
    }
    tl.steps = th.steps = steps;
    tl.final_field = std::move(ul);
    th.final_field = std::move(uh);
    detect_t_star(tl);
    detect_t_star(th);
    return {std::move(tl), std::move(th), std::max(violation, 0.0)};
}

Field cole_hopf_oracle(const SpectralPlan& plan, const Field& mu0, double a, double t) {
    if (a == 0.0) throw std::invalid_argument("cole_hopf_oracle requires a != 0");
    if (!(t >= 0.0)) throw std::invalid_argument("cole_hopf_oracle requires t >= 0");
    require_match(plan.domain(), mu0);
    if (std::abs(a) * sup_norm(mu0) > 300.0)
        throw std::invalid_argument("cole_hopf_oracle: |a|*sup|mu0| > 300 overflows exp");
    if (t == 0.0 || all_equal(mu0)) return mu0;   // identity / equilibrium
    Field v(mu0.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(a * mu0[i]);
    Field w = heat_apply(plan, v, t);
    for (double& x : w) x = std::log(x) / a;
    return w;
}

} // namespace vhj
