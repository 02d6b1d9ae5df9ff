#pragma once
// IMEX time integration of u_t - Lap u = F_eps(grad u) with Neumann walls:
// explicit pointwise Hamiltonian source, exact spectral implicit diffusion,
// eps-continuation, adaptive dt, trajectory recording and extinction detection.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vhj/domain.hpp"
#include "vhj/hamiltonian.hpp"
#include "vhj/heat.hpp"

namespace vhj {

struct SolverConfig {
    double t_end = 1.0;

    // dt policy: fixed when dt > 0, otherwise adaptive with safety factor sigma
    double dt = 0.0;
    double sigma = 0.5;

    // eps-continuation schedule: eps = eps0 * factor^phase, snapped to eps_min
    // once the geometric value drops below 1e-13 (so the floor is reached
    // exactly); eps0 < 0 means "use the grid spacing h_min"
    double eps0 = -1.0;
    double eps_factor = 0.5;
    double eps_min = 0.0;
    int eps_phase_steps = 4;

    // extinction threshold on sup|grad u|; < 0 means the default
    // 1e-8 * (pi / min length) * oscillation(mu0)
    double tau_ext = -1.0;

    int record_stride = 4;     // steps between samples (first and last always kept)
    int snapshot_every = 0;    // snapshot every k-th sample; 0 = none
    int snapshot_cap = 16;     // halve snapshot density beyond this; 0 = unbounded
    double grad_q = 0.0;       // q of the recorded gradient q-norm; 0 = dim + 1
};

void validate(const SolverConfig& cfg);

struct Sample {
    double t = 0.0;
    double max = 0.0;          // M(t)
    double min = 0.0;          // m(t)
    double grad_sup = 0.0;
    double grad_q = 0.0;
    // cumulative sum of dt*|a|*eps^{p/2} up to this sample: the exact headroom
    // the regularization drift adds to the monotonicity of M and m
    double drift_allowance = 0.0;
    double osc() const { return max - min; }
};

struct Snapshot {
    std::size_t sample_index = 0;
    double t = 0.0;
    Field u;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<Snapshot> snapshots;
    std::optional<double> t_star;
    Field final_field;
    double tau_ext = 0.0;      // resolved threshold
    double q = 0.0;            // resolved gradient-norm exponent
    int steps = 0;
    bool eps_unconverged = false;

    double osc0() const { return samples.empty() ? 0.0 : samples.front().osc(); }
    Trajectory negated() const;   // the u -> -u mirror (swaps max/min)
};

struct BlowupError : std::runtime_error {
    explicit BlowupError(double when);
    double t;
};

// one IMEX step; requires spec.a >= 0 (run() owns the sign flip)
Field step(const SpectralPlan& plan, const Field& u, double dt,
           const HamiltonianSpec& spec);

Trajectory run(const SpectralPlan& plan, const Field& mu0,
               const HamiltonianSpec& spec, const SolverConfig& cfg);

struct PairResult {
    Trajectory low, high;
    double max_violation = 0.0;   // sup over steps and nodes of (u_low - u_high)+
};

// lockstep comparison run: both trajectories advance with the identical dt
// sequence (the pointwise min of the two adaptive proposals)
PairResult run_pair(const SpectralPlan& plan, const Field& mu0_low,
                    const Field& mu0_high, const HamiltonianSpec& spec,
                    const SolverConfig& cfg);

// exact p=2 reference: (1/a) log S(t) e^{a mu0}; |a|*sup|mu0| <= 300 or so,
// past that exp overflows double range and the call refuses
Field cole_hopf_oracle(const SpectralPlan& plan, const Field& mu0, double a, double t);

} // namespace vhj
