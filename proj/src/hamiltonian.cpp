#include "vhj/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace vhj {

void validate(const HamiltonianSpec& spec) {
    if (!(spec.p > 0.0)) throw std::invalid_argument("exponent p must be positive");
    if (!(spec.eps >= 0.0 && spec.eps < 1.0))
        throw std::invalid_argument("eps must lie in [0, 1)");
    if (!std::isfinite(spec.a)) throw std::invalid_argument("coefficient a must be finite");
}

int branch(double p) {
    if (p <= 1.0) return 0;
    if (p < 2.0) return 1;
    return 2;
}

double h_exact(double s, const HamiltonianSpec& spec) {
    if (!(s >= 0.0)) throw std::invalid_argument("s = |xi|^2 must be >= 0");
    return spec.a * std::pow(s, spec.p / 2.0);
}

double f_eps(double s, const HamiltonianSpec& spec) {
    if (!(s >= 0.0)) throw std::invalid_argument("s = |xi|^2 must be >= 0");
    const double e = spec.eps;
    if (e == 0.0) return h_exact(s, spec);   // avoids 0*inf in the middle branch
    switch (branch(spec.p)) {
    case 0:  return spec.a * std::pow(e + s, spec.p / 2.0);
    case 1:  return spec.a * (s - e) * std::pow(e + s, (spec.p - 2.0) / 2.0);
    default: return h_exact(s, spec);
    }
}

double radial_euler_gap(double s, const HamiltonianSpec& spec) {
    if (!(s >= 0.0)) throw std::invalid_argument("s = |xi|^2 must be >= 0");
    const double a = spec.a, p = spec.p, e = spec.eps;
    // ε = 0: F is p-homogeneous, so ∇F·ξ − F = (p−1)F by Euler's identity
    if (e == 0.0) return a * (p - 1.0) * std::pow(s, p / 2.0);
    switch (branch(p)) {
    case 0:
        return a * ((p - 1.0) * s - e) * std::pow(e + s, p / 2.0 - 1.0);
    case 1:
        // numerator (p−1)s² + (4−p)sε + ε², same as the expanded
        // (p−1)(ε+s)² + 3ε(2−p)s + ε²(2−p)
        return a * ((p - 1.0) * s * s + (4.0 - p) * s * e + e * e) *
               std::pow(e + s, p / 2.0 - 2.0);
    default:
        return a * (p - 1.0) * std::pow(s, p / 2.0);
    }
}

double structural_defect(double s, const HamiltonianSpec& spec) {
    const double p = spec.p;
    if (branch(p) == 2 || spec.eps == 0.0) return 0.0;   // exact equality cases
    return radial_euler_gap(s, spec) - spec.a * (p - 1.0) * std::pow(s, p / 2.0);
}

double holder_constant(const HamiltonianSpec& spec) {
    switch (branch(spec.p)) {
    case 0:  return spec.a;
    case 1:  return 4.0 * spec.a;
    default: return spec.a * spec.p;
    }
}

double holder_gap(double s1, double s2, double rho, const HamiltonianSpec& spec) {
    if (!(spec.a > 0.0)) throw std::invalid_argument("holder_gap requires a > 0");
    if (!(s1 >= 0.0 && s2 >= 0.0)) throw std::invalid_argument("s must be >= 0");
    const double r1 = std::sqrt(s1), r2 = std::sqrt(s2);
    if (r1 > rho || r2 > rho)
        throw std::invalid_argument("holder_gap requires |xi| <= rho");
    const double p = spec.p;
    const double K = holder_constant(spec);
    const double dist = std::abs(r1 - r2);                 // collinear worst case
    const double rhs = K * std::pow(rho, std::max(p - 1.0, 0.0)) *
                       std::pow(dist, std::min(p, 1.0));
    const double lhs = std::abs(f_eps(s1, spec) - f_eps(s2, spec));
    return rhs - lhs;
}

} // namespace vhj
