#include "vhj/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace vhj {

Domain::Domain(double len, int n) : dim(1), length{len, 1.0}, cells{n, 1} {
    validate(*this);
}

Domain::Domain(double lx, double ly, int nx, int ny)
    : dim(2), length{lx, ly}, cells{nx, ny} {
    validate(*this);
}

double Domain::h_min() const {
    double m = h(0);
    if (dim == 2) m = std::min(m, h(1));
    return m;
}

std::size_t Domain::size() const {
    return static_cast<std::size_t>(cells[0]) * (dim == 2 ? cells[1] : 1);
}

double Domain::volume() const {
    return dim == 2 ? length[0] * length[1] : length[0];
}

double Domain::diameter() const {
    if (dim == 2) return std::hypot(length[0], length[1]);
    return length[0];
}

double Domain::weight(int i, int j) const {
    auto axis_w = [](int idx, int n, double h) {
        return (idx == 0 || idx == n - 1) ? 0.5 * h : h;
    };
    double w = axis_w(i, cells[0], h(0));
    if (dim == 2) w *= axis_w(j, cells[1], h(1));
    return w;
}

void validate(const Domain& dom) {
    if (dom.dim != 1 && dom.dim != 2)
        throw std::invalid_argument("domain dimension must be 1 or 2");
    for (int ax = 0; ax < dom.dim; ++ax) {
        if (!(dom.length[ax] > 0.0))
            throw std::invalid_argument("domain lengths must be positive");
        if (dom.cells[ax] < 3)
            throw std::invalid_argument("need at least 3 nodes per axis");
    }
}

void require_match(const Domain& dom, const Field& f) {
    if (f.size() != dom.size())
        throw std::invalid_argument("field size does not match domain");
    for (double v : f)
        if (!std::isfinite(v))
            throw std::invalid_argument("field contains non-finite values");
}

Field laplacian(const Domain& dom, const Field& f) {
    require_match(dom, f);
    const int nx = dom.cells[0];
    const int ny = dom.dim == 2 ? dom.cells[1] : 1;
    const double ihx2 = 1.0 / (dom.h(0) * dom.h(0));
    Field out(f.size(), 0.0);

    for (int j = 0; j < ny; ++j) {
        const double* row = f.data() + static_cast<std::size_t>(j) * nx;
        double* orow = out.data() + static_cast<std::size_t>(j) * nx;
        orow[0] += 2.0 * (row[1] - row[0]) * ihx2;          // ghost: u[-1]=u[1]
        for (int i = 1; i < nx - 1; ++i)
            orow[i] += (row[i + 1] - 2.0 * row[i] + row[i - 1]) * ihx2;
        orow[nx - 1] += 2.0 * (row[nx - 2] - row[nx - 1]) * ihx2;
    }
    if (dom.dim == 2) {
        const double ihy2 = 1.0 / (dom.h(1) * dom.h(1));
        for (int i = 0; i < nx; ++i) {
            out[dom.index(i, 0)] += 2.0 * (f[dom.index(i, 1)] - f[dom.index(i, 0)]) * ihy2;
            for (int j = 1; j < ny - 1; ++j)
                out[dom.index(i, j)] += (f[dom.index(i, j + 1)] - 2.0 * f[dom.index(i, j)] +
                                         f[dom.index(i, j - 1)]) * ihy2;
            out[dom.index(i, ny - 1)] +=
                2.0 * (f[dom.index(i, ny - 2)] - f[dom.index(i, ny - 1)]) * ihy2;
        }
    }
    return out;
}

Field gradient_magnitude(const Domain& dom, const Field& f) {
    require_match(dom, f);
    const int nx = dom.cells[0];
    const int ny = dom.dim == 2 ? dom.cells[1] : 1;
    const double i2hx = 1.0 / (2.0 * dom.h(0));
    Field out(f.size(), 0.0);

    if (dom.dim == 1) {
        for (int i = 1; i < nx - 1; ++i)
            out[i] = std::abs(f[i + 1] - f[i - 1]) * i2hx;
        return out;   // boundary entries stay 0: normal component dropped
    }

    const double i2hy = 1.0 / (2.0 * dom.h(1));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double gx = 0.0, gy = 0.0;
            if (i > 0 && i < nx - 1)
                gx = (f[dom.index(i + 1, j)] - f[dom.index(i - 1, j)]) * i2hx;
            if (j > 0 && j < ny - 1)
                gy = (f[dom.index(i, j + 1)] - f[dom.index(i, j - 1)]) * i2hy;
            out[dom.index(i, j)] = std::hypot(gx, gy);
        }
    }
    return out;
}

double sup_norm(const Field& f) {
    if (f.empty()) throw std::invalid_argument("sup_norm of empty field");
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double q_norm(const Domain& dom, const Field& f, double q) {
    require_match(dom, f);
    if (!(q >= 1.0)) throw std::invalid_argument("q_norm requires q >= 1");
    const int nx = dom.cells[0];
    const int ny = dom.dim == 2 ? dom.cells[1] : 1;
    double acc = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            acc += dom.weight(i, j) * std::pow(std::abs(f[dom.index(i, j)]), q);
    return std::pow(acc, 1.0 / q);
}

double oscillation(const Field& f) {
    auto mm = max_min(f);
    return mm.max - mm.min;
}

MaxMin max_min(const Field& f) {
    if (f.empty()) throw std::invalid_argument("max_min of empty field");
    double mx = f[0], mn = f[0];
    for (double v : f) {
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    return {mx, mn};
}

} // namespace vhj
