#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "herdsim/errors.hpp"
#include "herdsim/stats.hpp"
#include "support/oracles.hpp"

using namespace herdsim;

TEST_CASE("interval extraction follows the exceedance-start convention") {
    const std::vector<double> r = {2.5, 0.1, 0.3, 2.7, 0.2, 3.1};
    const IntervalSeries s = extract_intervals(r, 2.0);
    REQUIRE(s.intervals == std::vector<std::uint32_t>{3, 2});
    CHECK(s.mean_T == doctest::Approx(2.5));

    // signs do not matter, ties at q are non-exceedances
    const std::vector<double> r2 = {-2.5, 2.0, -3.0};
    CHECK(extract_intervals(r2, 2.0).intervals == std::vector<std::uint32_t>{2});

    // consecutive exceedances give T = 1
    const std::vector<double> r3 = {3.0, 3.0, 3.0};
    CHECK(extract_intervals(r3, 2.0).intervals == std::vector<std::uint32_t>{1, 1});

    CHECK_FALSE(extract_intervals(r, 5.0).has_data());
    CHECK_THROWS_AS(extract_intervals(r, 0.0), ConfigError);
}

TEST_CASE("gaussian exceedance oracle pins the mean interval") {
    Rng rng = make_rng(100, Stream::order_flow);
    std::normal_distribution<double> gauss;
    std::vector<double> r(1'000'000);
    for (auto& v : r) v = gauss(rng);
    const IntervalSeries s = extract_intervals(r, 2.0);
    const double expected = 1.0 / gaussian_exceedance(2.0); // 21.98
    CHECK(expected == doctest::Approx(21.9778).epsilon(1e-4));
    CHECK(s.mean_T == doctest::Approx(expected).epsilon(0.025));

    // interval law of an i.i.d. series is geometric
    std::vector<double> t(s.intervals.begin(), s.intervals.end());
    const auto ks = ks_test_discrete(t, [&](double v) {
        return geometric_cdf(v, gaussian_exceedance(2.0));
    });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("scaled interval density collapses trivial cases") {
    IntervalSeries s;
    s.q = 2.0;
    s.intervals.assign(500, 7);
    s.mean_T = 7.0;
    const BinnedDensity d = scaled_interval_pdf(s, 20);
    std::size_t occupied = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.counts[i] > 0) ++occupied;
    }
    CHECK(occupied == 1);

    IntervalSeries tiny;
    tiny.intervals.assign(50, 3);
    tiny.mean_T = 3.0;
    CHECK_THROWS_AS(scaled_interval_pdf(tiny, 20), InsufficientSamplesError);
}

TEST_CASE("octile conditioning") {
    // alternating short/long: a short predecessor always precedes a long one
    IntervalSeries s;
    s.q = 2.0;
    for (int i = 0; i < 600; ++i) {
        s.intervals.push_back(1);
        s.intervals.push_back(100);
    }
    s.mean_T = 50.5;
    const auto low = conditional_successors(s, ConditionSide::low, 1.0, 100.0);
    REQUIRE(!low.empty());
    for (auto v : low) REQUIRE(v == 100);
    const auto high = conditional_successors(s, ConditionSide::high, 1.0, 100.0);
    for (auto v : high) REQUIRE(v == 1);

    const BinnedDensity dl = conditional_interval_pdf(s, ConditionSide::low, 15);
    CHECK(dl.total_count() == low.size());

    // i.i.d. intervals: low- and high-conditioned successors are alike
    Rng rng = make_rng(5, Stream::shuffle);
    std::geometric_distribution<std::uint32_t> geom(0.05);
    IntervalSeries iid;
    iid.q = 2.0;
    for (int i = 0; i < 60000; ++i) iid.intervals.push_back(geom(rng) + 1);
    iid.mean_T = double(std::accumulate(iid.intervals.begin(), iid.intervals.end(), 0ull)) /
                 double(iid.intervals.size());
    const double q1 = quantile(std::span<const std::uint32_t>(iid.intervals), 1.0 / 8.0);
    const double q8 = quantile(std::span<const std::uint32_t>(iid.intervals), 7.0 / 8.0);
    const auto lo = conditional_successors(iid, ConditionSide::low, q1, q8);
    const auto hi = conditional_successors(iid, ConditionSide::high, q1, q8);
    std::vector<double> lod(lo.begin(), lo.end()), hid(hi.begin(), hi.end());
    CHECK(ks_test_two_sample(lod, hid).p_value > 0.05);
}

TEST_CASE("log-binned density") {
    // uniform samples on [1, 10]: density ~ 1/9 everywhere
    Rng rng = make_rng(2, Stream::shuffle);
    std::uniform_real_distribution<double> unif(1.0, 10.0);
    std::vector<double> u(400000);
    for (auto& v : u) v = unif(rng);
    const BinnedDensity d = log_binned_pdf(u, 12, 1.0, 10.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.density[i] == doctest::Approx(1.0 / 9.0).epsilon(0.05));
    }
    // normalization
    double mass = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) mass += d.density[i] * d.width(i);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));

    // power-law samples via the inverse CDF: recovered slope
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> pl(2'000'000);
    for (auto& v : pl) v = test::power_law_quantile(u01(rng), 4.1, 1.0, 100.0);
    const BinnedDensity dp = log_binned_pdf(pl, 40, 1.0, 100.0);
    const SlopeFit fit = tail_exponent_fit(dp, 1.0, 50.0);
    CHECK(fit.slope == doctest::Approx(-4.1).epsilon(0.1 / 4.1));

    // a single repeated value occupies exactly one bin
    std::vector<double> same(1000, 3.0);
    const BinnedDensity ds = log_binned_pdf(same, 10);
    std::size_t occupied = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.counts[i] > 0) ++occupied;
    }
    CHECK(occupied == 1);

    CHECK_THROWS_AS(log_binned_pdf(std::vector<double>{1.0, -2.0}, 10), DataError);
    CHECK_THROWS_AS(log_binned_pdf(u, 5), ConfigError);
}

TEST_CASE("spectral estimate") {
    // a pure tone lands in the bin containing its frequency
    const double dt = 1.0 / 390.0;
    const double f0 = 13.0;
    std::vector<double> wave(65536);
    for (std::size_t i = 0; i < wave.size(); ++i) {
        wave[i] = std::sin(2.0 * M_PI * f0 * double(i) * dt);
    }
    const BinnedDensity d = psd(wave, dt, 4, 60);
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (d.density[i] > d.density[best]) best = i;
    }
    CHECK(d.edges[best] <= f0);
    CHECK(d.edges[best + 1] >= f0);

    // white noise is flat
    Rng rng = make_rng(4, Stream::order_flow);
    std::normal_distribution<double> gauss;
    std::vector<double> noise(1 << 19);
    for (auto& v : noise) v = gauss(rng);
    const BinnedDensity dn = psd(noise, dt, 32, 40);
    const SlopeFit fit = tail_exponent_fit(dn, dn.center(2), dn.center(dn.size() - 3));
    CHECK(fit.slope == doctest::Approx(0.0).epsilon(1.0).scale(0.1)); // |slope| < 0.1

    CHECK_THROWS_AS(psd(std::vector<double>(100, 0.0), dt, 32, 20),
                    InsufficientSamplesError);
}

TEST_CASE("tail exponent fit") {
    BinnedDensity d;
    d.kind = DensityKind::pdf;
    d.edges = log_edges(1.0, 100.0, 20);
    d.counts.assign(20, 100);
    d.density.resize(20);
    for (std::size_t i = 0; i < 20; ++i) d.density[i] = std::pow(d.center(i), -1.5);
    SlopeFit f = tail_exponent_fit(d, 1.0, 100.0);
    CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(f.stderr_slope == doctest::Approx(0.0).scale(1e-9));

    for (std::size_t i = 0; i < 20; ++i) d.density[i] = std::pow(d.center(i), -4.1);
    CHECK(tail_exponent_fit(d, 1.0, 100.0).slope == doctest::Approx(-4.1).epsilon(1e-9));

    // slope is invariant under a constant factor
    for (auto& v : d.density) v *= 37.0;
    CHECK(tail_exponent_fit(d, 1.0, 100.0).slope == doctest::Approx(-4.1).epsilon(1e-9));

    d.counts.assign(20, 0);
    CHECK_THROWS_AS(tail_exponent_fit(d, 1.0, 100.0), InsufficientSamplesError);
}

TEST_CASE("curvature fit separates exponential from power law") {
    BinnedDensity d;
    d.kind = DensityKind::pdf;
    d.edges = log_edges(1.0, 50.0, 16);
    d.counts.assign(16, 100);
    d.density.resize(16);
    // geometric-like decay: convex-down in log-log
    for (std::size_t i = 0; i < 16; ++i) d.density[i] = std::exp(-0.3 * d.center(i));
    const CurvatureFit ce = log_curvature_fit(d, 1.0, 50.0);
    CHECK(ce.curvature < 0.0);
    CHECK(ce.curvature + 3.0 * ce.stderr_curv < 0.0);

    // pure power law: no curvature
    for (std::size_t i = 0; i < 16; ++i) d.density[i] = std::pow(d.center(i), -1.5);
    const CurvatureFit cp = log_curvature_fit(d, 1.0, 50.0);
    CHECK(std::abs(cp.curvature) < 1e-9);
}

TEST_CASE("reshuffle preserves the multiset and kills autocorrelation") {
    // a slowly varying series has strong lag-1 correlation
    std::vector<double> s(20000);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::sin(double(i) / 50.0) + 0.1 * std::cos(double(i) / 7.0);
    }
    Rng rng = make_rng(6, Stream::shuffle);
    const std::vector<double> sh = reshuffle(s, rng);
    REQUIRE(sh.size() == s.size());
    std::vector<double> a = s, b = sh;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);

    auto lag1 = [](const std::vector<double>& v) {
        RunningMoments m;
        for (double x : v) m.add(x);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            acc += (v[i] - m.mean()) * (v[i + 1] - m.mean());
        }
        return acc / (double(v.size() - 1) * m.variance());
    };
    CHECK(lag1(s) > 0.9);
    CHECK(std::abs(lag1(sh)) < 3.0 / std::sqrt(double(sh.size())));
}

TEST_CASE("nearest-rank quantiles") {
    std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
    CHECK(quantile(v, 1.0 / 8.0) == 1.0);
    CHECK(quantile(v, 7.0 / 8.0) == 7.0);
    CHECK(quantile(v, 1.0) == 8.0);
    CHECK(quantile(v, 0.0) == 1.0);
    std::vector<std::uint32_t> u = {5, 1, 9};
    CHECK(quantile(u, 0.5) == 5u);
    CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), InsufficientSamplesError);
}

TEST_CASE("merge semantics") {
    Rng rng = make_rng(7, Stream::shuffle);
    std::uniform_real_distribution<double> unif(1.0, 100.0);
    std::vector<double> all(40000);
    for (auto& v : all) v = unif(rng);
    const std::vector<double> first(all.begin(), all.begin() + 17000);
    const std::vector<double> second(all.begin() + 17000, all.end());

    const auto full = log_binned_pdf(all, 25, 1.0, 100.0);
    const auto a = log_binned_pdf(first, 25, 1.0, 100.0);
    const auto b = log_binned_pdf(second, 25, 1.0, 100.0);
    const auto m = merge(a, b);
    REQUIRE(m.counts == full.counts); // exact on counts
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(m.density[i] == doctest::Approx(full.density[i]).epsilon(1e-12));
    }

    // identity: merging with an empty accumulation changes nothing
    BinnedDensity empty = a;
    empty.counts.assign(empty.size(), 0);
    empty.density.assign(empty.size(), 0.0);
    const auto same = merge(a, empty);
    CHECK(same.counts == a.counts);

    // commutative, associative on counts
    const auto ab = merge(a, b), ba = merge(b, a);
    CHECK(ab.counts == ba.counts);

    BinnedDensity other;
    other.kind = DensityKind::pdf;
    other.edges = log_edges(1.0, 50.0, 25);
    other.counts.assign(25, 0);
    other.density.assign(25, 0.0);
    CHECK_THROWS_AS(merge(a, other), ConfigError);

    // psd merge averages with count weights
    std::vector<double> noise(1 << 16);
    std::normal_distribution<double> gauss;
    for (auto& v : noise) v = gauss(rng);
    const std::vector<double> h1(noise.begin(), noise.begin() + (1 << 15));
    const std::vector<double> h2(noise.begin() + (1 << 15), noise.end());
    const auto p_full = psd(noise, 1.0, 16, 20);
    const auto p1 = psd(h1, 1.0, 8, 20);
    const auto p2 = psd(h2, 1.0, 8, 20);
    const auto pm = merge(p1, p2);
    for (std::size_t i = 0; i < pm.size(); ++i) {
        CHECK(pm.density[i] == doctest::Approx(p_full.density[i]).epsilon(1e-9));
    }
}

TEST_CASE("kolmogorov tail probabilities") {
    CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0490).epsilon(0.02));
    CHECK(kolmogorov_q(1.63) == doctest::Approx(0.0100).epsilon(0.05));
    CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639).epsilon(0.01));
    CHECK(kolmogorov_q(0.05) == doctest::Approx(1.0));

    // calibration: uniform samples against the uniform CDF
    Rng rng = make_rng(11, Stream::shuffle);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int rejections = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> u(2000);
        for (auto& v : u) v = unif(rng);
        const auto ks = ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
        if (ks.p_value < 0.05) ++rejections;
    }
    CHECK(rejections < 0.05 * trials + 3 * std::sqrt(0.05 * 0.95 * trials) + 1);

    // two-sample: same distribution vs shifted distribution
    std::vector<double> a(4000), b(4000), c(4000);
    std::normal_distribution<double> gauss;
    for (auto& v : a) v = gauss(rng);
    for (auto& v : b) v = gauss(rng);
    for (auto& v : c) v = gauss(rng) + 0.2;
    CHECK(ks_test_two_sample(a, b).p_value > 0.01);
    CHECK(ks_test_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("running moments match direct formulas and merge exactly") {
    Rng rng = make_rng(13, Stream::shuffle);
    std::normal_distribution<double> gauss(2.0, 3.0);
    std::vector<double> v(10000);
    RunningMoments all;
    for (auto& x : v) {
        x = gauss(rng);
        all.add(x);
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(all.mean() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(all.sample_variance() == doctest::Approx(ss / double(v.size() - 1)).epsilon(1e-10));

    RunningMoments left, right;
    for (std::size_t i = 0; i < v.size(); ++i) (i < 3000 ? left : right).add(v[i]);
    left.merge(right);
    CHECK(left.count() == all.count());
    CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
    CHECK(left.sample_variance() == doctest::Approx(all.sample_variance()).epsilon(1e-10));
}

TEST_CASE("sup log10 distance") {
    BinnedDensity a, b;
    a.kind = b.kind = DensityKind::pdf;
    a.edges = b.edges = log_edges(1.0, 10.0, 10);
    a.counts.assign(10, 100);
    b.counts.assign(10, 100);
    a.density.assign(10, 1.0);
    b.density.assign(10, 2.0);
    const LogDistance d = sup_log10_distance(a, b);
    CHECK(d.sup == doctest::Approx(std::log10(2.0)).epsilon(1e-12));
    CHECK(d.n_bins == 10);
    b.counts[3] = 0; // unoccupied bins are excluded
    CHECK(sup_log10_distance(a, b).n_bins == 9);
}
