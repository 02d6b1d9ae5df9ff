#pragma once
// Exact semi-discrete Neumann heat semigroup on the node-centered grid.
//
// The ghost-mirror Laplacian is diagonal in the DCT-I basis cos(pi k i/(n-1))
// with eigenvalues (4/h^2) sin^2(pi k / (2(n-1))), so S(t) and the implicit
// Euler resolvent are evaluated exactly mode by mode (FFTW REDFT00 transforms,
// deterministic FFTW_ESTIMATE plans). Exact here means exact for the
// semi-discrete system, which is what makes the oracles bit-reproducible.

#include <vector>

#include "vhj/domain.hpp"

namespace vhj {

class SpectralPlan {
public:
    explicit SpectralPlan(const Domain& dom);
    ~SpectralPlan();
    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    const Domain& domain() const { return dom_; }
    // eigenvalue of the (kx, ky) cosine mode, flattened like fields
    const std::vector<double>& eigenvalues() const { return lambda_; }
    double lambda1() const;   // smallest nonzero eigenvalue

    // unnormalized REDFT00 (self-inverse up to scale()); in == out allowed
    void execute(const double* in, double* out) const;
    double scale() const { return scale_; }   // multiply after a round trip

private:
    Domain dom_;
    std::vector<double> lambda_;
    double scale_;
    void* plan_;   // fftw_plan
};

// S(t)f: exact spectral heat flow; t = 0 and constant fields short-circuit
// so equilibria are preserved bitwise
Field heat_apply(const SpectralPlan& plan, const Field& f, double t);

// (I - dt*Lap)^{-1} f, the implicit diffusion half of the IMEX step
Field implicit_diffusion(const SpectralPlan& plan, const Field& f, double dt);

// Smoothing sequence: v0 = mu0 + 2^{-n}, then t_n found by bisection so that
// sup|S(t_n)v0 - v0| lies strictly inside (2^{-(n+3)}, 2^{-(n+2)}), and
// u0n = S(t_n)v0. Constant (or oscillation too small to bracket) data falls
// back to t_n = 0, u0n = v0.
struct Smoothed {
    Field u0n;
    double t_n = 0.0;
};
Smoothed smoothing_sequence(const SpectralPlan& plan, const Field& mu0, int n);

// empirical constant of the gradient smoothing estimate:
// max over t_grid of sup|grad S(t)mu0| * sqrt(t) / sup|mu0|
double smoothing_estimate(const SpectralPlan& plan, const Field& mu0,
                          const std::vector<double>& t_grid);

} // namespace vhj
