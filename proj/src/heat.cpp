#include "vhj/heat.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace vhj {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;   // FFTW plan creation/destruction is not thread-safe
    return m;
}

bool is_constant(const Field& f) {
    for (double v : f)
        if (v != f[0]) return false;
    return true;
}

} // namespace

SpectralPlan::SpectralPlan(const Domain& dom) : dom_(dom) {
    validate(dom_);
    const int nx = dom_.cells[0];
    const int ny = dom_.dim == 2 ? dom_.cells[1] : 1;

    lambda_.resize(dom_.size());
    auto axis_eig = [](int k, int n, double h) {
        const double s = std::sin(M_PI * k / (2.0 * (n - 1)));
        return 4.0 / (h * h) * s * s;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double l = axis_eig(i, nx, dom_.h(0));
            if (dom_.dim == 2) l += axis_eig(j, ny, dom_.h(1));
            lambda_[dom_.index(i, j)] = l;
        }

    scale_ = 1.0 / (2.0 * (nx - 1));
    if (dom_.dim == 2) scale_ /= 2.0 * (ny - 1);

    std::vector<double> dummy(dom_.size(), 0.0);
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_UNALIGNED lets the one cached plan run on arbitrary caller buffers
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (dom_.dim == 1)
        plan_ = fftw_plan_r2r_1d(nx, dummy.data(), dummy.data(), FFTW_REDFT00, flags);
    else
        plan_ = fftw_plan_r2r_2d(ny, nx, dummy.data(), dummy.data(), FFTW_REDFT00,
                                 FFTW_REDFT00, flags);
    if (!plan_) throw std::runtime_error("failed to create cosine transform plan");
}

SpectralPlan::~SpectralPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

double SpectralPlan::lambda1() const {
    double l = 0.0;
    for (double v : lambda_)
        if (v > 0.0 && (l == 0.0 || v < l)) l = v;
    return l;
}

void SpectralPlan::execute(const double* in, double* out) const {
    fftw_execute_r2r(static_cast<fftw_plan>(plan_),
                     const_cast<double*>(in), out);
}

namespace {

// shared core of heat_apply / implicit_diffusion: multiplier(lambda) per mode
template <class Mult>
Field spectral_apply(const SpectralPlan& plan, const Field& f, Mult mult) {
    require_match(plan.domain(), f);
    if (is_constant(f)) return f;   // exact: the constant mode has multiplier 1
    Field work(f.size());
    plan.execute(f.data(), work.data());
    const auto& lam = plan.eigenvalues();
    const double s = plan.scale();
    for (std::size_t k = 0; k < work.size(); ++k)
        work[k] *= s * mult(lam[k]);
    Field out(f.size());
    plan.execute(work.data(), out.data());
    return out;
}

} // namespace

Field heat_apply(const SpectralPlan& plan, const Field& f, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_apply requires t >= 0");
    if (t == 0.0) {
        require_match(plan.domain(), f);
        return f;
    }
    return spectral_apply(plan, f, [t](double l) { return std::exp(-l * t); });
}

Field implicit_diffusion(const SpectralPlan& plan, const Field& f, double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("implicit_diffusion requires dt >= 0");
    if (dt == 0.0) {
        require_match(plan.domain(), f);
        return f;
    }
    return spectral_apply(plan, f, [dt](double l) { return 1.0 / (1.0 + dt * l); });
}

Smoothed smoothing_sequence(const SpectralPlan& plan, const Field& mu0, int n) {
    if (n < 1) throw std::invalid_argument("smoothing_sequence requires n >= 1");
    require_match(plan.domain(), mu0);

    const double shift = std::ldexp(1.0, -n);   // 2^{-n}
    Field v0(mu0);
    for (double& v : v0) v += shift;

    const double lower = std::ldexp(1.0, -(n + 3));
    const double upper = std::ldexp(1.0, -(n + 2));

    auto dist = [&](double t) {
        Field w = heat_apply(plan, v0, t);
        double d = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k)
            d = std::max(d, std::abs(w[k] - v0[k]));
        return d;
    };

    // sup_t |S(t)v0 - v0| tends to sup|v0 - mean| <= osc; if the band is out of
    // reach (constant or nearly constant data) the construction degenerates
    if (oscillation(mu0) == 0.0) return {v0, 0.0};

    double hi = plan.domain().h_min();
    hi *= hi;
    double d_hi = dist(hi);
    while (d_hi <= lower) {
        hi *= 2.0;
        if (hi > 1e12) return {v0, 0.0};   // band unreachable: treat as constant
        d_hi = dist(hi);
    }
    // kinked data can overshoot the whole band already at t = h^2, so the
    // lower bracket must start at 0 (dist(0) = 0 sits below any band)
    double lo = 0.0;
    if (d_hi >= upper) {
        // bisect toward the middle half of the band so strict inequalities
        // survive downstream arithmetic with a fat margin
        const double w4 = (upper - lower) / 4.0;
        double t_in = -1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double d = dist(mid);
            if (d > lower && d < upper) {
                t_in = mid;
                if (d > lower + w4 && d < upper - w4) break;
            }
            if (d <= lower + 2.0 * w4)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-300) break;
        }
        if (t_in < 0.0) throw std::runtime_error("smoothing_sequence: bisection failed");
        return {heat_apply(plan, v0, t_in), t_in};
    }
    return {heat_apply(plan, v0, hi), hi};
}

double smoothing_estimate(const SpectralPlan& plan, const Field& mu0,
                          const std::vector<double>& t_grid) {
    require_match(plan.domain(), mu0);
    if (t_grid.empty()) throw std::invalid_argument("smoothing_estimate: empty t grid");
    for (double t : t_grid)
        if (!(t > 0.0)) throw std::invalid_argument("smoothing_estimate requires t > 0");
    const double denom = sup_norm(mu0);
    if (denom == 0.0) return 0.0;
    double best = 0.0;
    for (double t : t_grid) {
        Field g = gradient_magnitude(plan.domain(), heat_apply(plan, mu0, t));
        best = std::max(best, sup_norm(g) * std::sqrt(t) / denom);
    }
    return best;
}

} // namespace vhj
