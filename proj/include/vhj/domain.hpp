#pragma once
// Node-centered rectangular grids with homogeneous-Neumann discrete operators.
//
// Grids store one value per node, x_i = i*h with h = length/(cells-1), so the
// boundary nodes sit exactly on the boundary. Neumann conditions enter through
// ghost-node reflection (u[-1] == u[1]), which makes the discrete Laplacian
// symmetric w.r.t. the trapezoidal weights and diagonal in the cosine basis.

#include <array>
#include <cstddef>
#include <vector>

namespace vhj {

struct Domain {
    int dim = 1;                      // 1 or 2
    std::array<double, 2> length{1.0, 1.0};
    std::array<int, 2> cells{2, 1};   // nodes per axis; >= 3 on active axes

    Domain() = default;
    Domain(double len, int n);                        // 1D
    Domain(double lx, double ly, int nx, int ny);     // 2D

    double h(int axis) const { return length[axis] / (cells[axis] - 1); }
    double h_min() const;
    std::size_t size() const;                         // total node count
    double volume() const;
    double diameter() const;
    std::size_t index(int i, int j = 0) const {       // x fastest
        return static_cast<std::size_t>(j) * cells[0] + i;
    }
    // trapezoidal quadrature weight of a node (boundary factors 1/2 per axis)
    double weight(int i, int j = 0) const;
};

using Field = std::vector<double>;

void validate(const Domain& dom);
void require_match(const Domain& dom, const Field& f);   // size + finiteness

// second-order 5-point (3-point in 1D) Laplacian with ghost-mirror boundaries
Field laplacian(const Domain& dom, const Field& f);

// |∇f| with centered interior differences; boundary nodes drop the normal
// component (consistent with ∂f/∂ν = 0) and keep tangential central ones
Field gradient_magnitude(const Domain& dom, const Field& f);

double sup_norm(const Field& f);
double q_norm(const Domain& dom, const Field& f, double q);   // trapezoid, q >= 1
double oscillation(const Field& f);
struct MaxMin { double max, min; };
MaxMin max_min(const Field& f);

} // namespace vhj
