#include "vhj/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vhj {

namespace {

constexpr double kAbsCushion = 1e-12;

double rel_margin(double bound, double observed) {
    return (bound - observed) / std::max(bound, kAbsCushion);
}

bool passes(double bound, double observed, double tol) {
    return observed <= bound * (1.0 + tol) + kAbsCushion;
}

// running "worst inequality seen" accumulator for one named check
struct Worst {
    BoundRecord rec;
    bool seen = false;

    explicit Worst(std::string name, double tol) {
        rec.name = std::move(name);
        rec.tolerance = tol;
        rec.margin = std::numeric_limits<double>::infinity();
    }
    void offer(double bound, double observed, double t, double t_from) {
        const double m = rel_margin(bound, observed);
        if (!seen || m < rec.margin) {
            rec.margin = m;
            rec.t = t;
            rec.t_from = t_from;
            rec.observed = observed;
            rec.bound = bound;
            rec.pass = passes(bound, observed, rec.tolerance);
            seen = true;
        }
    }
    // an empty check passes with no slack claimed
    BoundRecord finish() const {
        if (seen) return rec;
        BoundRecord r = rec;
        r.margin = 0.0;
        r.pass = true;
        return r;
    }
};

} // namespace

bool BoundReport::all_pass() const {
    return std::all_of(records.begin(), records.end(),
                       [](const BoundRecord& r) { return r.pass; });
}

const BoundRecord* BoundReport::find(const std::string& name) const {
    for (const auto& r : records)
        if (r.name == name) return &r;
    return nullptr;
}

double beta_threshold(int N, double p) {
    if (N < 1) throw std::invalid_argument("dimension must be positive");
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    return std::max(0.0, (2.0 * p + 1.0 - N) / N);
}

double default_beta(int N, double p) {
    return beta_threshold(N, p) * 1.25 + 0.5;
}

DecayParams decay_params(int N, double p, double beta) {
    const double thr = beta_threshold(N, p);
    if (!(beta > thr))
        throw std::invalid_argument("beta must strictly exceed the admissibility threshold");
    DecayParams d;
    d.N = N;
    d.p = p;
    d.beta = beta;
    d.gamma = N * (beta + 1.0);
    d.eta = d.gamma - p;
    if (!(d.eta > p + 1.0))
        throw std::invalid_argument("beta too small: eta must exceed p + 1");
    d.alpha = (1.0 + d.eta) / (2.0 + d.eta - p);
    return d;
}

double bound_sqrt(double osc0, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time gap must be positive");
    if (osc0 < 0.0) throw std::invalid_argument("oscillation must be nonnegative");
    return std::sqrt(0.5) * osc0 / std::sqrt(dt);
}

double bound_power(double osc0, double dt, double a, double p) {
    if (!(dt > 0.0)) throw std::invalid_argument("time gap must be positive");
    if (osc0 < 0.0) throw std::invalid_argument("oscillation must be nonnegative");
    if (!(a > 0.0)) throw std::invalid_argument("coefficient must be positive (flip the sign first)");
    if (!(p > 0.0) || p == 1.0) throw std::invalid_argument("exponent must be positive and != 1");
    const double c = std::max(p, 2.0) / (a * p * std::abs(1.0 - p));
    return std::pow(c, 1.0 / p) * std::pow(osc0, 1.0 / p) * std::pow(dt, -1.0 / p);
}

BoundReport check_gradient_bounds(const Trajectory& traj, double a, double p,
                                  double tol) {
    BoundReport rep;
    const auto& s = traj.samples;
    if (s.size() < 2) return rep;

    Worst wsqrt("grad_sqrt", tol);
    Worst wpow("grad_power", tol);
    const bool power = p != 1.0 && a != 0.0;
    const double aa = std::abs(a);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double osc_i = s[i].osc();
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const double gap = s[j].t - s[i].t;
            if (!(gap > 0.0)) continue;
            const double g = s[j].grad_sup;
            wsqrt.offer(bound_sqrt(osc_i, gap), g, s[j].t, s[i].t);
            if (power)
                wpow.offer(bound_power(osc_i, gap, aa, p), g, s[j].t, s[i].t);
        }
    }
    rep.records.push_back(wsqrt.finish());
    if (power) rep.records.push_back(wpow.finish());
    return rep;
}

PoincarePair poincare_check(const Domain& dom, const Field& f, double q) {
    require_match(dom, f);
    if (!(q > dom.dim)) throw std::invalid_argument("q must exceed the dimension");
    PoincarePair out;
    out.lhs = oscillation(f);
    const double c = 2.0 * dom.diameter() / std::pow(dom.volume(), 1.0 / q);
    out.rhs = c * (q / (q - dom.dim)) * q_norm(dom, gradient_magnitude(dom, f), q);
    return out;
}

double bernstein_sqrt_theta_sup(double osc0, double delta) {
    return 0.5 * (osc0 + delta) * (osc0 + delta);
}

BoundReport bernstein_diagnostic(const Domain& dom, const Trajectory& traj,
                                 double a, double p, BernsteinCase which,
                                 double delta, double tol) {
    if (traj.snapshots.empty())
        throw std::invalid_argument("diagnostic needs snapshots");
    if (traj.samples.empty())
        throw std::invalid_argument("diagnostic needs samples");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    if (which == BernsteinCase::power_case) {
        if (p == 1.0)
            throw std::invalid_argument("power case is undefined at p = 1");
        if (a == 0.0)
            throw std::invalid_argument("power case needs a nonzero coefficient");
    }

    // the u -> -u mirror turns a < 0 into a > 0; theta then reads the
    // flipped run's extremes
    const bool flip = a < 0.0;
    const double aa = std::abs(a);
    const double M0 = flip ? -traj.samples.front().min : traj.samples.front().max;
    const double m0 = flip ? -traj.samples.front().max : traj.samples.front().min;
    const double spread = M0 - m0 + delta;

    const double tpow =
        which == BernsteinCase::sqrt_case ? 1.0 : 2.0 / p;

    // theta(xi) per case; xi already in the flipped frame
    auto theta = [&](double xi) {
        if (which == BernsteinCase::sqrt_case)
            return 0.5 * spread * spread - 0.5 * (M0 - xi) * (M0 - xi);
        if (p < 1.0)
            return std::pow(2.0 / (aa * p * (1.0 - p)), 2.0 / p) *
                   std::pow(spread, (2.0 - p) / p) * (xi - m0 + delta);
        if (p < 2.0)
            return std::pow(2.0 / (aa * p * (p - 1.0)), 2.0 / p) *
                   std::pow(spread, (2.0 - p) / p) * (M0 - xi + delta);
        return std::pow((M0 - xi + delta) / (aa * (p - 1.0)), 2.0 / p);
    };

    const char* name =
        which == BernsteinCase::sqrt_case ? "bernstein_sqrt" : "bernstein_power";
    Worst worst(name, tol);
    Field g;
    for (const auto& snap : traj.snapshots) {
        if (!(snap.t > 0.0)) continue;
        g = gradient_magnitude(dom, snap.u);
        const double tfac = std::pow(snap.t, -tpow);
        for (std::size_t i = 0; i < snap.u.size(); ++i) {
            const double xi = flip ? -snap.u[i] : snap.u[i];
            worst.offer(theta(xi) * tfac, g[i] * g[i], snap.t,
                        static_cast<double>(i));
        }
    }
    BoundReport rep;
    rep.records.push_back(worst.finish());
    return rep;
}

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double x) {
    // xs strictly increasing; clamps at the ends
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = it - xs.begin();
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + w * (ys[j] - ys[j - 1]);
}

} // namespace

YFunctional y_functional(const Trajectory& traj, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    const auto& s = traj.samples;
    if (s.size() < 3)
        throw std::invalid_argument("too few samples for the y functional");

    const double osc0 = s.front().osc();
    const double osc_end = s.back().osc();
    if (osc_end > 0.01 * osc0)
        throw std::invalid_argument(
            "trajectory has not decayed enough: need osc(t_end) <= 0.01 osc(0)");

    const std::size_t m = s.size();
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = std::pow(s[i].osc(), gamma);

    YFunctional out;
    out.t.resize(m);
    out.y.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.t[i] = s[i].t;

    // y_i = sum over panels [t_k, t_k+1] of the trapezoid of (s - t_i) g(s),
    // accumulated right to left so the whole set costs O(m^2) -> O(m):
    // actually each y_i restarts at its own origin, so integrate moments.
    // With A(t) = int g ds and B(t) = int s g ds from t to t_end:
    // y(t_i) = B(t_i) - t_i A(t_i).
    double A = 0.0, B = 0.0;
    out.y[m - 1] = 0.0;
    for (std::size_t i = m - 1; i-- > 0;) {
        const double dt = out.t[i + 1] - out.t[i];
        A += 0.5 * dt * (g[i] + g[i + 1]);
        B += 0.5 * dt * (out.t[i] * g[i] + out.t[i + 1] * g[i + 1]);
        out.y[i] = B - out.t[i] * A;
    }

    // extrapolated tail mass: fit the last decade's decay rate of g and
    // bound int_{t_end}^inf (s - t_0) g(s) ds by the exponential remainder
    double r = 0.0;
    for (std::size_t i = m - 1; i-- > 0;) {
        if (g[i] > 0.0 && g[m - 1] > 0.0 && g[i] > g[m - 1]) {
            r = std::log(g[i] / g[m - 1]) / (out.t[m - 1] - out.t[i]);
            break;
        }
    }
    if (g[m - 1] == 0.0) {
        out.tail_bound = 0.0;
    } else if (r > 0.0) {
        const double span = out.t[m - 1] - out.t[0];
        out.tail_bound = g[m - 1] * (span / r + 1.0 / (r * r));
    } else {
        out.tail_bound = std::numeric_limits<double>::infinity();
    }
    return out;
}

BoundReport window_decay_check(const Trajectory& traj, double gamma, double tol) {
    const YFunctional yf = y_functional(traj, gamma);
    Worst worst("window_decay", tol);
    for (std::size_t j = 0; j < traj.samples.size(); ++j) {
        const double t = traj.samples[j].t;
        if (!(t > 0.0)) continue;
        if (t / 2.0 < yf.t.front()) continue;
        const double yh = interp(yf.t, yf.y, t / 2.0);
        const double rhs = std::pow(8.0 * yh / (t * t), 1.0 / gamma);
        worst.offer(rhs, traj.samples[j].osc(), t, t / 2.0);
    }
    BoundReport rep;
    rep.records.push_back(worst.finish());
    return rep;
}

Envelope empirical_envelope(const Trajectory& traj, const DecayParams& params,
                            double tol) {
    const YFunctional yf = y_functional(traj, params.gamma);
    const std::size_t m = yf.y.size();

    if (yf.y.front() <= 0.0) {
        // already extinct data: the zero envelope bounds y trivially
        Envelope env;
        env.t = yf.t;
        env.f.assign(m, 0.0);
        Worst wy("envelope_y", tol);
        for (std::size_t i = 0; i < m; ++i)
            wy.offer(0.0, yf.y[i], yf.t[i], yf.t[i]);
        env.report.records.push_back(wy.finish());
        Worst ww("envelope_window", tol);
        for (const auto& smp : traj.samples)
            if (smp.t > 0.0) ww.offer(0.0, smp.osc(), smp.t, smp.t / 2.0);
        env.report.records.push_back(ww.finish());
        return env;
    }

    for (std::size_t i = 0; i + 1 < m; ++i)
        if (yf.y[i + 1] > yf.y[i] * (1.0 + 1e-12) + kAbsCushion)
            throw std::invalid_argument(
                "y is not monotone: the sample grid is too coarse for an envelope");

    const double alpha = params.alpha;
    double c_emp = 0.0;
    bool seen = false;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double dy = (yf.y[i + 1] - yf.y[i - 1]) / (yf.t[i + 1] - yf.t[i - 1]);
        if (!(dy < 0.0) || !(yf.y[i] > 0.0)) continue;
        c_emp = std::max(c_emp, std::pow(yf.y[i], alpha) / (-dy));
        seen = true;
    }
    if (!seen)
        throw std::invalid_argument("no interior samples with decreasing y");

    Envelope env;
    env.C_emp = c_emp;
    env.t = yf.t;
    env.f.resize(m);
    const double y0 = yf.y.front();
    auto envelope_at = [&](double t) {
        if (alpha == 1.0) return y0 * std::exp(-t / c_emp);
        const double base = std::pow(y0, 1.0 - alpha) + (alpha - 1.0) * t / c_emp;
        if (base <= 0.0) return 0.0;   // alpha < 1: extinction of the envelope
        return std::pow(base, -1.0 / (alpha - 1.0));
    };
    for (std::size_t i = 0; i < m; ++i) env.f[i] = envelope_at(yf.t[i]);

    Worst wy("envelope_y", tol);
    for (std::size_t i = 0; i < m; ++i)
        wy.offer(env.f[i], yf.y[i], yf.t[i], yf.t[i]);
    env.report.records.push_back(wy.finish());

    Worst ww("envelope_window", tol);
    for (std::size_t j = 0; j < traj.samples.size(); ++j) {
        const double t = traj.samples[j].t;
        if (!(t > 0.0)) continue;
        const double rhs =
            std::pow(8.0 * envelope_at(t / 2.0) / (t * t), 1.0 / params.gamma);
        ww.offer(rhs, traj.samples[j].osc(), t, t / 2.0);
    }
    env.report.records.push_back(ww.finish());
    return env;
}

BoundReport y_shape_check(const Trajectory& traj, double gamma, double tol) {
    const YFunctional yf = y_functional(traj, gamma);
    const std::size_t m = yf.y.size();
    const double allowance = tol * yf.y.front();

    BoundRecord mono;
    mono.name = "y_nonincreasing";
    mono.tolerance = tol;
    mono.bound = allowance;
    mono.observed = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double viol = yf.y[i + 1] - yf.y[i];
        if (viol > mono.observed) {
            mono.observed = viol;
            mono.t = yf.t[i + 1];
            mono.t_from = yf.t[i];
        }
    }
    mono.pass = mono.observed <= allowance;
    mono.margin = (allowance - mono.observed) / std::max(yf.y.front(), kAbsCushion);

    BoundRecord conv;
    conv.name = "y_convex";
    conv.tolerance = tol;
    conv.bound = allowance;
    conv.observed = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < m; ++i) {
        // convexity: the chord through the neighbors passes at or above y_i
        const double span = yf.t[i + 1] - yf.t[i - 1];
        const double chord = ((yf.t[i + 1] - yf.t[i]) * yf.y[i - 1] +
                              (yf.t[i] - yf.t[i - 1]) * yf.y[i + 1]) / span;
        const double viol = yf.y[i] - chord;
        if (viol > conv.observed) {
            conv.observed = viol;
            conv.t = yf.t[i];
            conv.t_from = yf.t[i - 1];
        }
    }
    conv.pass = conv.observed <= allowance;
    conv.margin = (allowance - conv.observed) / std::max(yf.y.front(), kAbsCushion);

    BoundReport rep;
    rep.records.push_back(mono);
    rep.records.push_back(conv);
    return rep;
}

FitResult fit_decay_rate(const Trajectory& traj, DecayModel model, double window) {
    if (!(window > 0.0) || window > 1.0)
        throw std::invalid_argument("window must lie in (0, 1]");
    const auto& s = traj.samples;
    const std::size_t m = s.size();
    const std::size_t first = static_cast<std::size_t>(
        std::floor(static_cast<double>(m) * (1.0 - window)));
    if (m < 3 || m - first < 3)
        throw std::invalid_argument("too few samples in the fitting window");

    std::vector<double> xs, ys;
    xs.reserve(m - first);
    ys.reserve(m - first);
    for (std::size_t i = first; i < m; ++i) {
        const double o = s[i].osc();
        if (!(o > 0.0))
            throw std::invalid_argument(
                "oscillation vanishes inside the window: fit is undefined past extinction");
        if (model == DecayModel::algebraic) {
            if (!(s[i].t > 0.0)) continue;
            xs.push_back(std::log(s[i].t));
        } else {
            xs.push_back(s[i].t);
        }
        ys.push_back(std::log(o));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("too few usable samples in the fitting window");

    const std::size_t n = xs.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate fitting window");

    const double slope = sxy / sxx;
    FitResult out;
    out.rate = -slope;
    if (syy == 0.0) {
        out.r_squared = 1.0;
    } else {
        const double ss_res = syy - slope * sxy;
        out.r_squared = 1.0 - ss_res / syy;
    }
    return out;
}

} // namespace vhj
