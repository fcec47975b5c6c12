#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "herdsim/sde_engine.hpp"
#include "herdsim/stats.hpp"
#include "support/oracles.hpp"

using namespace herdsim;

namespace {

ModelParams no_feedback() {
    ModelParams p;
    p.feedback_gain = 0.0;
    return p;
}

} // namespace

TEST_CASE("activity feedback") {
    ModelParams p; // a_tau = 0.7, alpha = 2
    CHECK(inv_tau(0.5, p) == doctest::Approx(2.89).epsilon(1e-12));
    CHECK(inv_tau(1.0, p) == doctest::Approx(1.0));
    CHECK(inv_tau(0.999999, p) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(inv_tau(0.3, no_feedback()) == doctest::Approx(1.0));
    // feedback never damps activity below the baseline
    for (double nf : {0.01, 0.1, 0.5, 0.9, 0.999}) CHECK(inv_tau(nf, p) >= 1.0);
    CHECK_THROWS_AS(inv_tau(0.0, p), std::domain_error);
    CHECK_THROWS_AS(inv_tau(-0.1, p), std::domain_error);
    CHECK_THROWS_AS(inv_tau(1.5, p), std::domain_error);
}

TEST_CASE("drift and diffusion of n_f") {
    ModelParams p;
    const double root = p.eps_cf / (p.eps_cf + p.eps_fc);
    CHECK(drift_nf(root, p) == doctest::Approx(0.0).epsilon(1e-12));

    ModelParams sym = no_feedback();
    sym.eps_cf = sym.eps_fc = 2.0;
    CHECK(drift_nf(0.5, sym) == doctest::Approx(0.0));

    CHECK(drift_nf(0.5, p) == doctest::Approx(-2.7455).epsilon(1e-9));

    CHECK(diffusion_nf(0.0, p) == 0.0);
    CHECK(diffusion_nf(1.0, p) == 0.0);
    CHECK(diffusion_nf(0.5, no_feedback()) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(diffusion_nf(0.5, p) == doctest::Approx(std::sqrt(1.445)).epsilon(1e-12));
    CHECK_THROWS_AS(drift_nf(0.0, p), std::domain_error);
    CHECK_THROWS_AS(diffusion_nf(-0.01, p), std::domain_error);
}

TEST_CASE("drift and diffusion of xi") {
    ModelParams p;
    CHECK(drift_xi(0.0, 0.5, p) == doctest::Approx(0.0));
    CHECK(diffusion_xi(1.0, 0.5, p) == doctest::Approx(0.0));
    CHECK(diffusion_xi(-1.0, 0.5, p) == doctest::Approx(0.0));
    CHECK(drift_xi(0.1, 0.5, p) == doctest::Approx(-1734.0).epsilon(1e-9));
    CHECK_THROWS_AS(drift_xi(1.0, 0.5, p), std::domain_error);
}

TEST_CASE("fixed point is stationary without noise") {
    ModelParams p;
    EngineOptions o;
    o.diffusion_scale = 0.0;
    SdeEngine eng(p, o);
    const AgentState s0 = eng.state();
    CHECK(s0.n_f == doctest::Approx(1.1 / 4.1).epsilon(1e-12));
    CHECK(s0.xi == 0.0);
    for (int i = 0; i < 100; ++i) eng.step(0.01);
    CHECK(eng.state().n_f == doctest::Approx(s0.n_f).epsilon(1e-12));
    CHECK(eng.state().xi == 0.0);
}

TEST_CASE("identical seeds give bit-identical trajectories") {
    ModelParams p;
    p.seed = 20240917;
    SdeEngine a(p), b(p);
    for (int i = 0; i < 2000; ++i) {
        const AgentState& sa = a.advance_tick();
        const AgentState& sb = b.advance_tick();
        REQUIRE(sa.n_f == sb.n_f);
        REQUIRE(sa.xi == sb.xi);
    }
    ModelParams p2 = p;
    p2.seed = 20240918;
    SdeEngine c(p2);
    for (int i = 0; i < 100; ++i) c.advance_tick();
    for (int i = 0; i < 100; ++i) a.advance_tick();
    CHECK(a.state().n_f != c.state().n_f);
}

TEST_CASE("reset replays the first trajectory") {
    ModelParams p;
    p.seed = 7;
    SdeEngine eng(p);
    std::vector<double> first;
    for (int i = 0; i < 500; ++i) first.push_back(eng.advance_tick().n_f);
    eng.reset();
    for (int i = 0; i < 500; ++i) REQUIRE(eng.advance_tick().n_f == first[i]);
}

TEST_CASE("states stay strictly inside the domain") {
    ModelParams p;
    p.seed = 3;
    SdeEngine eng(p);
    for (int i = 0; i < 20000; ++i) {
        const AgentState& s = eng.step(0.05); // large steps stress the reflection
        REQUIRE(s.n_f > 0.0);
        REQUIRE(s.n_f < 1.0);
        REQUIRE(s.xi > -1.0);
        REQUIRE(s.xi < 1.0);
    }
}

TEST_CASE("simulate returns the requested shape and honors the cap") {
    ModelParams p;
    SdeEngine eng(p);
    EnginePath one = eng.simulate(1, 0);
    CHECK(one.states.size() == 1);

    EngineOptions tight;
    tight.max_path_ticks = 10;
    SdeEngine small(p, tight);
    CHECK_THROWS_AS(small.simulate(11, 0), std::length_error);
}

TEST_CASE("stationary law without feedback matches the Beta form") {
    ModelParams p = no_feedback();
    p.seed = 42;
    EngineOptions o;
    o.evolve_xi = false;
    SdeEngine eng(p, o);
    const double tick = 0.1;
    for (int i = 0; i < 20000; ++i) eng.step(tick);
    std::vector<double> s;
    s.reserve(400000);
    RunningMoments mom;
    for (int i = 0; i < 400000; ++i) {
        s.push_back(eng.step(tick).n_f);
        mom.add(s.back());
    }
    const double d =
        ks_distance(std::move(s), [&](double v) { return test::beta_cdf(1.1, 3.0, v); });
    CHECK(d < 0.012);
    CHECK(mom.mean() == doctest::Approx(1.1 / 4.1).epsilon(0.02));
}

TEST_CASE("stationary law with feedback carries the tau reweighting") {
    ModelParams p; // defaults, feedback on
    p.seed = 99;
    EngineOptions o;
    o.evolve_xi = false;
    SdeEngine eng(p, o);
    const double tick = 0.1;
    for (int i = 0; i < 50000; ++i) eng.step(tick);
    std::vector<double> s;
    s.reserve(500000);
    for (int i = 0; i < 500000; ++i) s.push_back(eng.step(tick).n_f);
    const test::StationaryNfCdf cdf(p);
    CHECK(ks_distance(std::move(s), cdf) < 0.02);
}

TEST_CASE("ratio tail exponent: analytic far tail and sampled mid range") {
    ModelParams p;
    // the exact stationary density of x = (1-n_f)/n_f in log-log form
    auto log_density = [&](double x) {
        return -p.feedback_exp * std::log(1.0 + p.feedback_gain * x) +
               (p.eps_fc - 1.0) * std::log(x) -
               (p.eps_cf + p.eps_fc) * std::log1p(x);
    };
    // far tail: slope approaches -(eps_cf + alpha + 1) = -4.1
    const int m = 12;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        const double lx = std::log(100.0) + (std::log(1000.0) - std::log(100.0)) * i / (m - 1);
        const double ly = log_density(std::exp(lx));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double far_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(far_slope == doctest::Approx(-4.1).epsilon(0.25 / 4.1));

    // sampled density over [3,30] agrees with the analytic curve
    ModelParams ps = p;
    ps.seed = 6;
    EngineOptions o;
    o.evolve_xi = false;
    SdeEngine eng(ps, o);
    for (int i = 0; i < 50000; ++i) eng.step(0.1);
    std::vector<double> xs;
    xs.reserve(2000000);
    for (int i = 0; i < 2000000; ++i) {
        const double nf = eng.step(0.1).n_f;
        xs.push_back((1.0 - nf) / nf);
    }
    const auto pdf = log_binned_pdf(xs, 30, 3.0, 30.0);
    double max_err = 0.0;
    // normalize the analytic curve over the same window
    double norm = 0.0;
    for (std::size_t i = 0; i < pdf.size(); ++i) {
        norm += std::exp(log_density(pdf.center(i))) * pdf.width(i);
    }
    for (std::size_t i = 0; i < pdf.size(); ++i) {
        if (pdf.counts[i] < 50) continue;
        const double ref = std::exp(log_density(pdf.center(i))) / norm;
        max_err = std::max(max_err, std::abs(std::log10(pdf.density[i]) - std::log10(ref)));
    }
    CHECK(max_err < 0.1);
}

TEST_CASE("mood is symmetric") {
    ModelParams p = no_feedback();
    p.seed = 11;
    SdeEngine eng(p);
    // ~6 mood relaxation times between samples: effectively independent
    const double tick = 1e-3;
    for (int i = 0; i < 20000; ++i) eng.step(tick);
    std::vector<double> xi;
    RunningMoments mom;
    for (int i = 0; i < 150000; ++i) {
        xi.push_back(eng.step(tick).xi);
        mom.add(xi.back());
    }
    const double se = mom.sd() / std::sqrt(double(mom.count()));
    CHECK(std::abs(mom.mean()) < 3.0 * se);
    std::vector<double> neg(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) neg[i] = -xi[i];
    CHECK(ks_test_two_sample(xi, neg).p_value > 0.05);
}

TEST_CASE("variance of the mood under constant activity") {
    ModelParams p = no_feedback();
    p.seed = 7;
    SdeEngine eng(p);
    const double tick = p.tick_dt_scaled() * 10.0;
    for (int i = 0; i < 100000; ++i) eng.step(tick);
    RunningMoments mom;
    for (int i = 0; i < 1000000; ++i) mom.add(eng.step(tick).xi);
    CHECK(mom.variance() == doctest::Approx(1.0 / 7.0).epsilon(0.005 * 7.0));
}

TEST_CASE("halving the substep cap barely moves the stationary mean") {
    auto stationary_mean = [](double cap) {
        ModelParams p;
        p.feedback_gain = 0.0;
        p.seed = 314159;
        EngineOptions o;
        o.substep_cap = cap;
        o.evolve_xi = false;
        SdeEngine eng(p, o);
        const double tick = 0.1;
        for (int i = 0; i < 20000; ++i) eng.step(tick);
        RunningMoments mom;
        for (int i = 0; i < 4000000; ++i) mom.add(eng.step(tick).n_f);
        return mom.mean();
    };
    const double m1 = stationary_mean(EngineOptions{}.substep_cap);
    const double m2 = stationary_mean(EngineOptions{}.substep_cap / 2.0);
    CHECK(std::abs(m1 - m2) / (1.1 / 4.1) < 0.002);
}
