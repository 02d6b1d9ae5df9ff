#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "vhj/domain.hpp"
#include "vhj/estimates.hpp"
#include "vhj/heat.hpp"
#include "vhj/solver.hpp"

using namespace vhj;

namespace {

Trajectory synth(double t0, double t1, int m, double (*osc)(double)) {
    Trajectory tr;
    for (int i = 0; i < m; ++i) {
        Sample s;
        s.t = t0 + (t1 - t0) * i / double(m - 1);
        s.max = osc(s.t);
        s.min = 0.0;
        tr.samples.push_back(s);
    }
    return tr;
}

Trajectory cosine_run(double a, double p, double t_end, int stride = 4,
                      int snapshot_every = 0) {
    Domain dom(1.0, 129);
    SpectralPlan plan(dom);
    Field mu0(dom.size());
    for (int i = 0; i < dom.cells[0]; ++i)
        mu0[i] = std::cos(M_PI * i / double(dom.cells[0] - 1));
    SolverConfig cfg;
    cfg.t_end = t_end;
    cfg.record_stride = stride;
    cfg.snapshot_every = snapshot_every;
    return run(plan, mu0, {a, p, 0.0}, cfg);
}

} // namespace

TEST_CASE("exponent bookkeeping") {
    DecayParams d = decay_params(1, 2.0, 5.0);
    CHECK(d.gamma == doctest::Approx(6.0));
    CHECK(d.eta == doctest::Approx(4.0));
    CHECK(d.alpha == doctest::Approx(1.25));

    d = decay_params(2, 0.5, 1.0);
    CHECK(d.gamma == doctest::Approx(4.0));
    CHECK(d.eta == doctest::Approx(3.5));
    CHECK(d.alpha == doctest::Approx(0.9));

    CHECK(beta_threshold(1, 2.0) == doctest::Approx(4.0));
    CHECK(beta_threshold(2, 0.5) == 0.0);
    CHECK(default_beta(1, 2.0) == doctest::Approx(5.5));

    // the admissibility floor is strict
    CHECK_THROWS(decay_params(1, 1.0, 2.0));
    CHECK(decay_params(1, 1.0, 2.5).alpha == 1.0);

    // alpha straddles 1 exactly as p does
    for (int N : {1, 2})
        for (double p : {0.4, 0.9, 1.0, 1.1, 2.0, 3.2})
            for (double bump : {0.3, 1.0, 2.5}) {
                const DecayParams dp = decay_params(N, p, beta_threshold(N, p) + bump);
                if (p < 1.0) CHECK(dp.alpha < 1.0);
                if (p == 1.0) CHECK(dp.alpha == doctest::Approx(1.0).epsilon(1e-14));
                if (p > 1.0) CHECK(dp.alpha > 1.0);
            }
}

TEST_CASE("closed-form gradient bounds") {
    CHECK(bound_sqrt(2.0, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(bound_sqrt(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(bound_sqrt(0.0, 1.0) == 0.0);
    CHECK_THROWS(bound_sqrt(1.0, 0.0));

    CHECK(bound_power(1.0, 1.0, 1.0, 2.0) == doctest::Approx(1.0));
    CHECK(bound_power(1.0, 1.0, 1.0, 0.5) == doctest::Approx(64.0));
    CHECK(bound_power(0.0, 1.0, 1.0, 2.0) == 0.0);
    CHECK_THROWS(bound_power(1.0, 1.0, 1.0, 1.0));
    CHECK_THROWS(bound_power(1.0, 1.0, 0.0, 2.0));

    // homogeneity in the oscillation
    for (double lam : {0.3, 2.0, 17.0}) {
        CHECK(bound_sqrt(lam * 1.7, 0.9) ==
              doctest::Approx(lam * bound_sqrt(1.7, 0.9)).epsilon(1e-13));
        for (double p : {0.5, 2.0, 3.0})
            CHECK(bound_power(lam, 0.9, 1.3, p) ==
                  doctest::Approx(std::pow(lam, 1.0 / p) *
                                  bound_power(1.0, 0.9, 1.3, p))
                      .epsilon(1e-13));
    }
}

TEST_CASE("gradient bound checks on trajectories") {
    SUBCASE("constant data is trivially inside") {
        Trajectory tr = synth(0.0, 1.0, 20, [](double) { return 0.0; });
        for (Sample& s : tr.samples) s.grad_sup = 0.0;
        BoundReport br = check_gradient_bounds(tr, 1.0, 2.0, 0.05);
        CHECK(br.all_pass());
    }
    SUBCASE("single sample yields an empty report") {
        Trajectory tr = synth(0.0, 1.0, 1, [](double) { return 1.0; });
        BoundReport br = check_gradient_bounds(tr, 1.0, 2.0, 0.05);
        CHECK(br.records.empty());
        CHECK(br.all_pass());
    }
    SUBCASE("p=2 run satisfies both bounds") {
        Trajectory tr = cosine_run(1.0, 2.0, 0.5);
        BoundReport br = check_gradient_bounds(tr, 1.0, 2.0, 0.05);
        REQUIRE(br.find("grad_sqrt") != nullptr);
        REQUIRE(br.find("grad_power") != nullptr);
        CHECK(br.all_pass());
        CHECK(br.find("grad_sqrt")->margin > 0.0);
    }
    SUBCASE("negative a is checked through the mirror symmetry") {
        Trajectory tr = cosine_run(-1.0, 3.0, 0.5);
        BoundReport br = check_gradient_bounds(tr, -1.0, 3.0, 0.05);
        CHECK(br.all_pass());
    }
    SUBCASE("pure diffusion only gets the sqrt bound") {
        Trajectory tr = cosine_run(0.0, 2.0, 0.5);
        BoundReport br = check_gradient_bounds(tr, 0.0, 2.0, 0.05);
        CHECK(br.find("grad_sqrt") != nullptr);
        CHECK(br.find("grad_power") == nullptr);
        CHECK(br.all_pass());
    }
}

TEST_CASE("poincare inequality check") {
    Domain dom(1.0, 257);

    PoincarePair zero = poincare_check(dom, Field(dom.size(), 3.0), 2.0);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);

    Field lin(dom.size());
    for (int i = 0; i < dom.cells[0]; ++i) lin[i] = i * dom.h(0);
    PoincarePair pc = poincare_check(dom, lin, 2.0);
    CHECK(pc.lhs == doctest::Approx(1.0));
    CHECK(pc.rhs == doctest::Approx(4.0).epsilon(0.02));
    CHECK(pc.lhs <= pc.rhs);

    CHECK_THROWS(poincare_check(dom, lin, 1.0));   // needs q > N
}

TEST_CASE("bernstein diagnostic") {
    CHECK(bernstein_sqrt_theta_sup(2.0, 0.02) ==
          doctest::Approx(0.5 * 2.02 * 2.02).epsilon(1e-15));
    // consistency with the sup-norm bound: sqrt(theta_sup / t) = bound_sqrt(osc+delta, t)
    for (double t : {0.1, 1.0, 7.0})
        CHECK(std::sqrt(bernstein_sqrt_theta_sup(2.0, 0.02) / t) ==
              doctest::Approx(bound_sqrt(2.02, t)).epsilon(1e-14));

    Domain dom(1.0, 129);

    SUBCASE("missing snapshots are an error") {
        Trajectory tr = cosine_run(1.0, 0.5, 0.2);
        CHECK_THROWS(bernstein_diagnostic(dom, tr, 1.0, 0.5,
                                          BernsteinCase::sqrt_case, 0.02, 0.05));
    }
    SUBCASE("constant run has maximal margins") {
        SpectralPlan plan(dom);
        SolverConfig cfg;
        cfg.t_end = 0.1;
        cfg.snapshot_every = 1;
        Trajectory tr = run(plan, Field(dom.size(), 1.0), {1.0, 2.0, 0.0}, cfg);
        for (BernsteinCase which :
             {BernsteinCase::sqrt_case, BernsteinCase::power_case}) {
            BoundReport br =
                bernstein_diagnostic(dom, tr, 1.0, 2.0, which, 0.01, 0.05);
            CHECK(br.all_pass());
            for (const auto& rec : br.records)
                CHECK(rec.margin == doctest::Approx(1.0));
        }
    }
    SUBCASE("real sublinear run passes pointwise") {
        Trajectory tr = cosine_run(1.0, 0.5, 0.4, 4, 1);
        const double delta = 0.01 * tr.osc0();
        for (BernsteinCase which :
             {BernsteinCase::sqrt_case, BernsteinCase::power_case}) {
            BoundReport br =
                bernstein_diagnostic(dom, tr, 1.0, 0.5, which, delta, 0.05);
            CHECK(br.all_pass());
        }
    }
    SUBCASE("sign flip matches the mirrored run") {
        Trajectory tr = cosine_run(-1.0, 0.5, 0.4, 4, 1);
        BoundReport br = bernstein_diagnostic(dom, tr, -1.0, 0.5,
                                              BernsteinCase::sqrt_case,
                                              0.01 * tr.osc0(), 0.05);
        CHECK(br.all_pass());
    }
}

TEST_CASE("y functional quadrature") {
    SUBCASE("zero oscillation gives the zero functional") {
        Trajectory tr = synth(0.0, 1.0, 50, [](double) { return 0.0; });
        YFunctional y = y_functional(tr, 3.0);
        for (double v : y.y) CHECK(v == 0.0);
        CHECK(y.tail_bound == 0.0);
    }
    SUBCASE("exponential closed form") {
        Trajectory tr = synth(0.0, 15.0, 3001, [](double t) { return std::exp(-t); });
        YFunctional y = y_functional(tr, 1.0);
        REQUIRE(y.y.size() == tr.samples.size());
        double err = 0.0;
        for (std::size_t i = 0; i < y.y.size(); ++i)
            err = std::max(err, std::abs(y.y[i] - std::exp(-y.t[i])));
        CHECK(err < 1e-4);
        CHECK(y.tail_bound >= 0.0);
        CHECK(y.tail_bound < 1e-5);
    }
    SUBCASE("insufficient tail decay is rejected") {
        Trajectory tr = synth(0.0, 1.0, 50, [](double t) { return 2.0 - t; });
        CHECK_THROWS(y_functional(tr, 2.0));
    }
    SUBCASE("monotone and convex on any monotone data") {
        std::mt19937_64 rng(5);
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<double> vals(120);
            for (double& v : vals)
                v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            std::sort(vals.rbegin(), vals.rend());
            for (int i = 0; i < 20; ++i) vals[100 + i] = vals[99] * 1e-4;
            Trajectory tr;
            for (int i = 0; i < 120; ++i) {
                Sample s;
                s.t = 0.05 * i;
                s.max = vals[i];
                s.min = 0.0;
                tr.samples.push_back(s);
            }
            CHECK(y_shape_check(tr, 2.5).all_pass());
            CHECK(window_decay_check(tr, 2.5, 0.05).all_pass());
        }
    }
}

TEST_CASE("window decay check") {
    SUBCASE("synthetic exponential holds everywhere") {
        Trajectory tr = synth(0.0, 15.0, 3001, [](double t) { return std::exp(-t); });
        BoundReport br = window_decay_check(tr, 1.0, 0.05);
        CHECK(br.all_pass());
        CHECK(br.find("window_decay")->margin > 0.0);
    }
    SUBCASE("real p=2 run") {
        Trajectory tr = cosine_run(1.0, 2.0, 0.5, 1);
        const DecayParams params = decay_params(1, 2.0, 5.0);
        CHECK(window_decay_check(tr, params.gamma, 0.05).all_pass());
    }
}

TEST_CASE("empirical envelope") {
    SUBCASE("self-consistent exponential recovers C = 1") {
        // p=1 exponent set: alpha = 1, gamma = 3.5; osc chosen so y(t) = e^{-t}
        const DecayParams params = decay_params(1, 1.0, 2.5);
        Trajectory tr =
            synth(0.0, 17.0, 1701, [](double t) { return std::exp(-t / 3.5); });
        Envelope env = empirical_envelope(tr, params, 0.05);
        CHECK(env.C_emp == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(env.report.all_pass());
    }
    SUBCASE("self-consistent algebraic recovers C = alpha - 1") {
        // alpha = 5/4 via (N,p,beta) = (1,2,5); y(t) = (1+t)^{-4}
        const DecayParams params = decay_params(1, 2.0, 5.0);
        Trajectory tr = synth(0.0, 120.0, 2401, [](double t) {
            return std::pow(20.0, 1.0 / 6.0) / (1.0 + t);
        });
        Envelope env = empirical_envelope(tr, params, 0.05);
        CHECK(env.C_emp == doctest::Approx(0.25).epsilon(1e-3));
        CHECK(env.report.all_pass());
        // the fitted envelope is the closed-form y itself
        for (std::size_t i = 0; i < env.t.size(); i += 200)
            CHECK(env.f[i] ==
                  doctest::Approx(std::pow(1.0 + env.t[i], -4.0)).epsilon(1e-2));
    }
    SUBCASE("constant data is a trivial pass") {
        Trajectory tr = synth(0.0, 1.0, 30, [](double) { return 0.0; });
        Envelope env = empirical_envelope(tr, decay_params(1, 2.0, 5.0), 0.05);
        CHECK(env.C_emp == 0.0);
        CHECK(env.report.all_pass());
    }
}

TEST_CASE("envelope on a live p=1 run") {
    // alpha = 1 needs dense samples: central differences of y lose one factor
    // of accuracy per e-fold, so record every step over a short window
    Domain dom(1.0, 257);
    SpectralPlan plan(dom);
    Field mu0(dom.size());
    for (int i = 0; i < dom.cells[0]; ++i)
        mu0[i] = std::cos(M_PI * i / double(dom.cells[0] - 1));
    SolverConfig cfg;
    cfg.t_end = 0.6;
    cfg.record_stride = 1;
    Trajectory tr = run(plan, mu0, {1.0, 1.0, 0.0}, cfg);
    const DecayParams params = decay_params(1, 1.0, 2.5);
    Envelope env = empirical_envelope(tr, params, 0.05);
    CHECK(std::isfinite(env.C_emp));
    CHECK(env.C_emp > 0.0);
    CHECK(env.report.all_pass());
    CHECK(y_shape_check(tr, params.gamma).all_pass());
}

TEST_CASE("decay rate fitting") {
    SUBCASE("exact exponential") {
        Trajectory tr =
            synth(0.0, 5.0, 501, [](double t) { return 3.0 * std::exp(-2.0 * t); });
        FitResult fit = fit_decay_rate(tr, DecayModel::exponential, 0.5);
        CHECK(fit.rate == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(fit.r_squared >= 1.0 - 1e-10);
    }
    SUBCASE("exact algebraic") {
        Trajectory tr =
            synth(0.1, 10.0, 991, [](double t) { return 5.0 * std::pow(t, -3.0); });
        FitResult fit = fit_decay_rate(tr, DecayModel::algebraic, 0.5);
        CHECK(fit.rate == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(fit.r_squared >= 1.0 - 1e-10);
    }
    SUBCASE("growth shows up as a negative rate") {
        Trajectory tr = synth(0.0, 2.0, 101, [](double t) { return std::exp(t); });
        CHECK(fit_decay_rate(tr, DecayModel::exponential, 1.0).rate < 0.0);
    }
    SUBCASE("window selects the trailing samples") {
        Trajectory tr = synth(0.0, 4.0, 801, [](double t) {
            return t < 2.8 ? 1.0 : std::exp(-(t - 2.8));
        });
        FitResult fit = fit_decay_rate(tr, DecayModel::exponential, 0.25);
        CHECK(fit.rate == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("guards") {
        Trajectory tr = synth(0.0, 1.0, 11, [](double) { return 0.0; });
        CHECK_THROWS(fit_decay_rate(tr, DecayModel::exponential, 0.5));
        Trajectory ok = synth(0.0, 1.0, 11, [](double t) { return std::exp(-t); });
        CHECK_THROWS(fit_decay_rate(ok, DecayModel::exponential, 0.0));
    }
}
