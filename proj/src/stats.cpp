#include "herdsim/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "herdsim/errors.hpp"

namespace herdsim {

// ---------------------------------------------------------------------------
// intervals

IntervalSeries extract_intervals(std::span<const double> values, double q,
                                 std::string source) {
    if (!(q > 0.0)) throw ConfigError("extract_intervals: threshold q must be > 0");
    IntervalSeries s;
    s.q = q;
    s.source = std::move(source);
    std::size_t last = 0;
    bool seen = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i]) > q) {
            if (seen) s.intervals.push_back(static_cast<std::uint32_t>(i - last));
            last = i;
            seen = true;
        }
    }
    if (!s.intervals.empty()) {
        s.mean_T = double(std::accumulate(s.intervals.begin(), s.intervals.end(),
                                          std::uint64_t(0))) /
                   double(s.intervals.size());
    }
    return s;
}

IntervalSeries pool_intervals(const std::vector<IntervalSeries>& parts) {
    IntervalSeries out;
    for (const auto& p : parts) {
        if (out.source.empty()) {
            out.q = p.q;
            out.source = p.source;
        }
        out.intervals.insert(out.intervals.end(), p.intervals.begin(), p.intervals.end());
    }
    if (!out.intervals.empty()) {
        out.mean_T = double(std::accumulate(out.intervals.begin(), out.intervals.end(),
                                            std::uint64_t(0))) /
                     double(out.intervals.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// binned densities

double BinnedDensity::center(std::size_t i) const {
    return std::sqrt(edges[i] * edges[i + 1]);
}

std::uint64_t BinnedDensity::total_count() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t(0));
}

std::vector<double> log_edges(double lo, double hi, std::size_t n_bins) {
    if (!(lo > 0.0 && hi > lo)) throw ConfigError("log_edges: need 0 < lo < hi");
    std::vector<double> e(n_bins + 1);
    const double r = std::log(hi / lo) / double(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) e[i] = lo * std::exp(r * double(i));
    e.front() = lo;
    e.back() = hi;
    return e;
}

namespace {

BinnedDensity bin_positive_samples(std::span<const double> samples, std::size_t n_bins,
                                   double lo, double hi) {
    if (lo == 0.0 && hi == 0.0) {
        auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        lo = *mn;
        hi = *mx * (1.0 + 1e-12);
        if (!(hi > lo)) hi = lo * (1.0 + 1e-9); // degenerate: all samples equal
    }
    BinnedDensity d;
    d.kind = DensityKind::pdf;
    d.edges = log_edges(lo, hi, n_bins);
    d.counts.assign(n_bins, 0);
    d.density.assign(n_bins, 0.0);
    const double log_lo = std::log(lo);
    const double inv_logw = double(n_bins) / (std::log(hi) - log_lo);
    for (double x : samples) {
        if (x < lo || x > hi) continue;
        auto i = std::size_t(std::clamp((std::log(x) - log_lo) * inv_logw, 0.0,
                                        double(n_bins) - 1.0));
        // guard against rounding at the bin edges
        while (i > 0 && x < d.edges[i]) --i;
        while (i + 1 < n_bins && x >= d.edges[i + 1]) ++i;
        ++d.counts[i];
    }
    const double total = double(d.total_count());
    if (total > 0) {
        for (std::size_t i = 0; i < n_bins; ++i) {
            d.density[i] = double(d.counts[i]) / (total * d.width(i));
        }
    }
    return d;
}

} // namespace

BinnedDensity log_binned_pdf(std::span<const double> samples, std::size_t n_bins,
                             double lo, double hi) {
    if (n_bins < 10) throw ConfigError("log_binned_pdf: n_bins must be >= 10");
    if (samples.empty()) throw InsufficientSamplesError("log_binned_pdf: no samples");
    for (double x : samples) {
        if (!(x > 0.0)) throw DataError("log_binned_pdf: samples must be positive");
    }
    return bin_positive_samples(samples, n_bins, lo, hi);
}

BinnedDensity scaled_interval_pdf(const IntervalSeries& s, std::size_t n_bins,
                                  double y_lo, double y_hi) {
    if (s.size() < 100) {
        throw InsufficientSamplesError("scaled_interval_pdf: need >= 100 intervals");
    }
    std::vector<double> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) y[i] = double(s.intervals[i]) / s.mean_T;
    return bin_positive_samples(y, n_bins, y_lo, y_hi);
}

std::vector<std::uint32_t> conditional_successors(const IntervalSeries& s,
                                                  ConditionSide side, double q_low,
                                                  double q_high) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double t = double(s.intervals[i]);
        const bool pick = (side == ConditionSide::low) ? (t <= q_low) : (t >= q_high);
        if (pick) out.push_back(s.intervals[i + 1]);
    }
    return out;
}

std::vector<std::uint32_t> pooled_conditional_successors(
    const std::vector<IntervalSeries>& parts, ConditionSide side) {
    // Octiles are taken per sequence: each part carries its own
    // normalization realization, and shared cutoffs would turn that
    // heterogeneity into spurious predecessor/successor dependence.
    std::vector<std::uint32_t> out;
    bool any = false;
    for (const auto& p : parts) {
        if (p.size() < 8) continue;
        any = true;
        const double q1 = quantile(std::span<const std::uint32_t>(p.intervals), 1.0 / 8.0);
        const double q8 = quantile(std::span<const std::uint32_t>(p.intervals), 7.0 / 8.0);
        auto succ = conditional_successors(p, side, q1, q8);
        out.insert(out.end(), succ.begin(), succ.end());
    }
    if (!any) {
        throw InsufficientSamplesError("pooled_conditional_successors: too few intervals");
    }
    return out;
}

BinnedDensity conditional_interval_pdf(const IntervalSeries& s, ConditionSide side,
                                       std::size_t n_bins, double y_lo, double y_hi) {
    if (s.size() < 800) {
        throw InsufficientSamplesError("conditional_interval_pdf: need >= 800 intervals");
    }
    const double q1 = quantile(std::span<const std::uint32_t>(s.intervals), 1.0 / 8.0);
    const double q8 = quantile(std::span<const std::uint32_t>(s.intervals), 7.0 / 8.0);
    const auto succ = conditional_successors(s, side, q1, q8);
    if (succ.size() < 100) {
        throw InsufficientSamplesError("conditional_interval_pdf: need >= 100 successors");
    }
    std::vector<double> y(succ.size());
    for (std::size_t i = 0; i < succ.size(); ++i) y[i] = double(succ[i]) / s.mean_T;
    return bin_positive_samples(y, n_bins, y_lo, y_hi);
}

BinnedDensity merge(const BinnedDensity& a, const BinnedDensity& b) {
    if (a.kind != b.kind || a.edges != b.edges) {
        throw ConfigError("merge: bin edges or density kind mismatch");
    }
    BinnedDensity out = a;
    if (a.kind == DensityKind::pdf) {
        for (std::size_t i = 0; i < out.size(); ++i) out.counts[i] += b.counts[i];
        const double total = double(out.total_count());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out.density[i] = total > 0 ? double(out.counts[i]) / (total * out.width(i)) : 0.0;
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double ca = double(a.counts[i]), cb = double(b.counts[i]);
            out.counts[i] += b.counts[i];
            out.density[i] =
                (ca + cb) > 0 ? (a.density[i] * ca + b.density[i] * cb) / (ca + cb) : 0.0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// spectral estimate

namespace {
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

RawPsd welch_psd_raw(std::span<const double> series, double dt_days,
                     std::size_t n_segments) {
    if (n_segments == 0) throw ConfigError("psd: n_segments must be >= 1");
    if (series.size() < n_segments * 64) {
        throw InsufficientSamplesError("psd: series shorter than n_segments * 64");
    }
    if (!(dt_days > 0.0)) throw ConfigError("psd: dt must be > 0");

    const std::size_t L = series.size() / n_segments;
    const std::size_t n_freq = L / 2;

    double* buf = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        buf = fftw_alloc_real(L);
        spec = fftw_alloc_complex(L / 2 + 1);
        plan = fftw_plan_dft_r2c_1d(int(L), buf, spec, FFTW_ESTIMATE);
    }

    RawPsd out;
    out.n_segments = n_segments;
    out.freq.resize(n_freq);
    out.power.assign(n_freq, 0.0);
    for (std::size_t k = 1; k <= n_freq; ++k) {
        out.freq[k - 1] = double(k) / (double(L) * dt_days);
    }

    for (std::size_t seg = 0; seg < n_segments; ++seg) {
        const double* src = series.data() + seg * L;
        double mean = 0.0;
        for (std::size_t i = 0; i < L; ++i) mean += src[i];
        mean /= double(L);
        for (std::size_t i = 0; i < L; ++i) buf[i] = src[i] - mean;
        fftw_execute(plan);
        for (std::size_t k = 1; k <= n_freq; ++k) {
            const double re = spec[k][0], im = spec[k][1];
            const double scale = (2 * k == L) ? 1.0 : 2.0; // Nyquist bin is not doubled
            out.power[k - 1] += scale * dt_days * (re * re + im * im) / double(L);
        }
    }
    for (auto& p : out.power) p /= double(n_segments);

    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
        fftw_free(buf);
        fftw_free(spec);
    }
    return out;
}

BinnedDensity psd(std::span<const double> series, double dt_days,
                  std::size_t n_segments, std::size_t n_bins) {
    const RawPsd raw = welch_psd_raw(series, dt_days, n_segments);

    BinnedDensity d;
    d.kind = DensityKind::psd;
    d.edges = log_edges(raw.freq.front(), raw.freq.back() * (1.0 + 1e-12), n_bins);
    d.counts.assign(n_bins, 0);
    d.density.assign(n_bins, 0.0);
    std::size_t bin = 0;
    for (std::size_t k = 0; k < raw.freq.size(); ++k) {
        while (bin + 1 < n_bins && raw.freq[k] >= d.edges[bin + 1]) ++bin;
        d.counts[bin] += raw.n_segments;
        d.density[bin] += raw.power[k] * double(raw.n_segments);
    }
    for (std::size_t i = 0; i < n_bins; ++i) {
        if (d.counts[i] > 0) d.density[i] /= double(d.counts[i]);
    }
    return d;
}

// ---------------------------------------------------------------------------
// fits

SlopeFit tail_exponent_fit(const BinnedDensity& d, double x_lo, double x_hi) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double c = d.center(i);
        if (c < x_lo || c > x_hi) continue;
        if (d.counts[i] == 0 || !(d.density[i] > 0.0)) continue;
        lx.push_back(std::log(c));
        ly.push_back(std::log(d.density[i]));
    }
    const std::size_t n = lx.size();
    if (n < 5) throw InsufficientSamplesError("tail_exponent_fit: need >= 5 occupied bins");

    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / double(n), my = sy / double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.n_bins = n;
    f.x_lo = std::exp(lx.front());
    f.x_hi = std::exp(lx.back());
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - my - f.slope * (lx[i] - mx);
        sse += r * r;
    }
    f.stderr_slope = n > 2 ? std::sqrt(sse / double(n - 2) / sxx) : 0.0;
    return f;
}

CurvatureFit log_curvature_fit(const BinnedDensity& d, double x_lo, double x_hi) {
    std::vector<double> u, y;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double c = d.center(i);
        if (c < x_lo || c > x_hi) continue;
        if (d.counts[i] == 0 || !(d.density[i] > 0.0)) continue;
        u.push_back(std::log(c));
        y.push_back(std::log(d.density[i]));
    }
    const std::size_t n = u.size();
    if (n < 5) throw InsufficientSamplesError("log_curvature_fit: need >= 5 occupied bins");

    // center u for conditioning
    double mu = 0;
    for (double v : u) mu += v;
    mu /= double(n);
    for (double& v : u) v -= mu;

    // normal equations for y = b0 + b1 u + b2 u^2
    double s0 = double(n), s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = u[i], u2 = u1 * u1;
        s1 += u1;
        s2 += u2;
        s3 += u2 * u1;
        s4 += u2 * u2;
        t0 += y[i];
        t1 += y[i] * u1;
        t2 += y[i] * u2;
    }
    double A[3][4] = {{s0, s1, s2, t0}, {s1, s2, s3, t1}, {s2, s3, s4, t2}};
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        }
        std::swap(A[col], A[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
        }
    }
    const double b0 = A[0][3] / A[0][0];
    const double b1 = A[1][3] / A[1][1];
    const double b2 = A[2][3] / A[2][2];

    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (b0 + b1 * u[i] + b2 * u[i] * u[i]);
        sse += r * r;
    }
    const double sigma2 = n > 3 ? sse / double(n - 3) : 0.0;
    // variance of b2 = sigma^2 * [(X'X)^-1]_22 via the centered moments
    const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s3 * s2) +
                       s2 * (s1 * s3 - s2 * s2);
    const double inv22 = (s0 * s2 - s1 * s1) / det;

    CurvatureFit f;
    f.curvature = b2;
    f.stderr_curv = std::sqrt(std::max(0.0, sigma2 * inv22));
    f.n_bins = n;
    return f;
}

std::vector<double> reshuffle(std::span<const double> series, Rng& rng) {
    std::vector<double> out(series.begin(), series.end());
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

namespace {

template <class T>
T quantile_impl(std::span<const T> values, double p) {
    if (values.empty()) throw InsufficientSamplesError("quantile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile: p outside [0,1]");
    std::vector<T> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double rank = std::ceil(p * double(v.size()));
    const std::size_t idx = std::size_t(std::clamp(rank, 1.0, double(v.size()))) - 1;
    return v[idx];
}

} // namespace

double quantile(std::span<const double> values, double p) {
    return quantile_impl(values, p);
}

std::uint32_t quantile(std::span<const std::uint32_t> values, double p) {
    return quantile_impl(values, p);
}

// ---------------------------------------------------------------------------
// running moments

void RunningMoments::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / double(n_);
    m2_ += d * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double d = o.mean_ - mean_;
    const double n = double(n_), m = double(o.n_);
    mean_ += d * m / (n + m);
    m2_ += o.m2_ + d * d * n * m / (n + m);
    n_ += o.n_;
}

double RunningMoments::variance() const { return n_ ? m2_ / double(n_) : 0.0; }
double RunningMoments::sample_variance() const {
    return n_ > 1 ? m2_ / double(n_ - 1) : 0.0;
}
double RunningMoments::sd() const { return std::sqrt(sample_variance()); }

// ---------------------------------------------------------------------------
// distribution comparison

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // dual theta-series, accurate for small lambda
        const double t = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
        const double sum = t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0);
        return 1.0 - std::sqrt(2.0 * M_PI) / lambda * sum;
    }
    double q = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
        q += sign * term;
        if (term < 1e-14) break;
        sign = -sign;
    }
    return std::clamp(2.0 * q, 0.0, 1.0);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InsufficientSamplesError("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::abs(F - double(i) / n));
        d = std::max(d, std::abs(double(i + 1) / n - F));
    }
    return d;
}

KsTest ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    KsTest t;
    const double n = double(samples.size());
    t.distance = ks_distance(std::move(samples), cdf);
    const double sn = std::sqrt(n);
    t.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * t.distance);
    return t;
}

KsTest ks_test_discrete(std::vector<double> samples,
                        const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InsufficientSamplesError("ks_test_discrete: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        d = std::max(d, std::abs(double(j) / n - cdf(samples[i])));
        i = j;
    }
    KsTest t;
    t.distance = d;
    const double sn = std::sqrt(n);
    t.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
    return t;
}

KsTest ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw InsufficientSamplesError("ks_test_two_sample: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    KsTest t;
    t.distance = d;
    const double ne = std::sqrt(na * nb / (na + nb));
    t.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
    return t;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double gaussian_exceedance(double q) { return 2.0 * (1.0 - std_normal_cdf(q)); }

double geometric_cdf(double t, double p_exceed) {
    if (t < 1.0) return 0.0;
    return 1.0 - std::pow(1.0 - p_exceed, std::floor(t));
}

LogDistance sup_log10_distance(const BinnedDensity& a, const BinnedDensity& b,
                               std::uint64_t min_count) {
    if (a.edges != b.edges) throw ConfigError("sup_log10_distance: bin edges mismatch");
    LogDistance out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.counts[i] < min_count || b.counts[i] < min_count) continue;
        if (!(a.density[i] > 0.0 && b.density[i] > 0.0)) continue;
        out.sup = std::max(out.sup, std::abs(std::log10(a.density[i]) -
                                             std::log10(b.density[i])));
        ++out.n_bins;
    }
    return out;
}

} // namespace herdsim
