#pragma once
// The gradient nonlinearity a|ξ|^p and its regularized family F_ε, together
// with the closed-form structural quantities the decay estimates rest on.
// Everything is radial, so scalars are passed as s = |ξ|².

namespace vhj {

struct HamiltonianSpec {
    double a = 1.0;    // nonzero for physical runs; 0 allowed for oracle cross-checks
    double p = 2.0;    // > 0
    double eps = 0.0;  // regularization, in [0, 1)
};

void validate(const HamiltonianSpec& spec);

// which of the three F_ε branches applies: 0 for p in (0,1], 1 for (1,2), 2 for [2,inf)
int branch(double p);

// a * s^{p/2}
double h_exact(double s, const HamiltonianSpec& spec);

// regularized value:
//   p in (0,1]:  a(ε+s)^{p/2}
//   p in (1,2):  a(−ε+s)(ε+s)^{(p−2)/2}
//   p >= 2:      a s^{p/2}
// reduces to h_exact when ε = 0 (exactly; the middle branch is routed there)
double f_eps(double s, const HamiltonianSpec& spec);

// (∇F_ε)(ξ)·ξ − F_ε(ξ), from the per-branch closed forms
double radial_euler_gap(double s, const HamiltonianSpec& spec);

// radial_euler_gap(s) − a(p−1)s^{p/2}; sign is a-times-(≤0 for p≤1, ≥0 for p>1),
// and exactly 0 for p ≥ 2 or ε = 0
double structural_defect(double s, const HamiltonianSpec& spec);

// Hölder/Lipschitz constant of F_ε on the ball |ξ| ≤ ρ: a, 4a, or a·p by branch
double holder_constant(const HamiltonianSpec& spec);

// K·ρ^{(p−1)+}·|√s1−√s2|^{min(p,1)} − |F_ε(ξ1)−F_ε(ξ2)| for collinear ξ1, ξ2
// (the radial worst case); requires √s1, √s2 ≤ ρ and a > 0; contract: ≥ 0
double holder_gap(double s1, double s2, double rho, const HamiltonianSpec& spec);

} // namespace vhj
