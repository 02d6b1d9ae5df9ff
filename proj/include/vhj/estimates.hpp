#pragma once
// Quantitative bound evaluation over recorded trajectories: gradient-decay
// bounds, exponent bookkeeping, the Poincare oscillation check, the pointwise
// Bernstein diagnostic, the y-functional with its decay envelopes, and
// rate fitting. Everything here is a pure function of immutable inputs.

#include <string>
#include <vector>

#include "vhj/domain.hpp"
#include "vhj/solver.hpp"

namespace vhj {

// exponent bookkeeping: gamma = N(beta+1), eta = gamma - p,
// alpha = (1+eta)/(2+eta-p); alpha straddles 1 exactly as p does
struct DecayParams {
    int N = 1;
    double p = 1.0;
    double beta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double alpha = 0.0;
};

// strict admissibility floor for beta: ((2p+1-N)/N)+
double beta_threshold(int N, double p);
// default beta: threshold * 1.25 + 0.5 (strictly admissible)
double default_beta(int N, double p);
DecayParams decay_params(int N, double p, double beta);

// one verified inequality: worst signed margin (positive = slack),
// its location, and pass/fail at the named tolerance.
// margin = (bound - observed) / max(bound, 1e-12); pass allows the
// relative tolerance plus a 1e-12 absolute cushion
struct BoundRecord {
    std::string name;
    double margin = 0.0;
    double t = 0.0;        // sample time of the worst margin
    double t_from = 0.0;   // pair start time, or node coordinate for pointwise checks
    double observed = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct BoundReport {
    std::vector<BoundRecord> records;
    bool all_pass() const;
    const BoundRecord* find(const std::string& name) const;
};

// sup-norm gradient bounds from the oscillation at an earlier time
double bound_sqrt(double osc0, double dt);
double bound_power(double osc0, double dt, double a, double p);

// every ordered sample pair (s, t): grad_sup(t) against bound_sqrt(osc(s), t-s)
// and, for p != 1, bound_power(osc(s), t-s, |a|, p)
BoundReport check_gradient_bounds(const Trajectory& traj, double a, double p,
                                  double tol = 0.05);

// oscillation(f) <= (2 diam / |Omega|^{1/q}) * (q/(q-N)) * ||grad f||_q
struct PoincarePair {
    double lhs = 0.0;
    double rhs = 0.0;
};
PoincarePair poincare_check(const Domain& dom, const Field& f, double q);

enum class BernsteinCase { sqrt_case, power_case };

// pointwise w = |grad u|^2 / theta(u) diagnostic on snapshots, checked
// against t^{-1} (sqrt case) or t^{-2/p} (power case); theta is built from
// the run's initial extremes with margin delta
BoundReport bernstein_diagnostic(const Domain& dom, const Trajectory& traj,
                                 double a, double p, BernsteinCase which,
                                 double delta, double tol = 0.05);

// sup over xi of the sqrt-case theta, = (osc0 + delta)^2 / 2
double bernstein_sqrt_theta_sup(double osc0, double delta);

struct YFunctional {
    std::vector<double> t;
    std::vector<double> y;    // trapezoid of (s - t_i) osc(s)^gamma over [t_i, t_end]
    double tail_bound = 0.0;  // extrapolated remainder of the truncated tail
};

// requires osc(t_end) <= 0.01 osc(0) so the truncated tail is negligible
YFunctional y_functional(const Trajectory& traj, double gamma);

// osc(t) <= (8 y(t/2) / t^2)^{1/gamma}, y interpolated linearly between
// samples; implied by monotone osc alone, so it must never fail there
BoundReport window_decay_check(const Trajectory& traj, double gamma,
                               double tol = 0.05);

struct Envelope {
    double C_emp = 0.0;
    std::vector<double> t;
    std::vector<double> f;    // envelope values on the sample grid
    BoundReport report;       // y <= f and the window bound driven by f
};

// smallest constant making y' + y^alpha / C <= 0 hold sample-wise
// (C_emp = sup y^alpha / (-y'), central differences, interior samples),
// then the closed-form envelope with that constant
Envelope empirical_envelope(const Trajectory& traj, const DecayParams& params,
                            double tol = 0.05);

// discrete shape of y: nonincreasing, and convex against the chord through
// each interior sample's neighbors; violations measured relative to y(0)
BoundReport y_shape_check(const Trajectory& traj, double gamma, double tol = 1e-8);

enum class DecayModel { exponential, algebraic };

struct FitResult {
    double rate = 0.0;
    double r_squared = 0.0;
};

// least squares of log osc against t (exponential) or log t (algebraic)
// over the trailing fraction of samples
FitResult fit_decay_rate(const Trajectory& traj, DecayModel model,
                         double window = 0.5);

} // namespace vhj
