#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "herdsim/rng.hpp"

namespace herdsim {

// ---------------------------------------------------------------------------
// interval extraction

/// Waiting times between threshold exceedances of a normalized series.
struct IntervalSeries {
    std::vector<std::uint32_t> intervals; ///< grid units, each >= 1
    double q = 0.0;                       ///< threshold, units of return std dev
    double mean_T = 0.0;
    std::string source;

    bool has_data() const { return !intervals.empty(); }
    std::size_t size() const { return intervals.size(); }
};

/// Distances between consecutive indices where |value| > q (strict).
/// Fewer than two exceedances yield an empty series (has_data() == false).
IntervalSeries extract_intervals(std::span<const double> values, double q,
                                 std::string source = {});

/// Concatenate interval multisets for pooled statistics; no cross-sequence
/// pairs are formed.
IntervalSeries pool_intervals(const std::vector<IntervalSeries>& parts);

// ---------------------------------------------------------------------------
// binned densities

enum class DensityKind { pdf, psd };

/// Log-binned density estimate. For kind==pdf `density` is probability per
/// unit (linear) abscissa normalized over the in-range samples; for
/// kind==psd it is the count-weighted mean power in the bin.
struct BinnedDensity {
    std::vector<double> edges; ///< n_bins+1, strictly increasing
    std::vector<double> density;
    std::vector<std::uint64_t> counts;
    DensityKind kind = DensityKind::pdf;

    std::size_t size() const { return density.size(); }
    double center(std::size_t i) const; ///< geometric bin center
    double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
    std::uint64_t total_count() const;
};

/// n_bins log-spaced edges over [lo, hi].
std::vector<double> log_edges(double lo, double hi, std::size_t n_bins);

/// Density of positive samples on log-spaced bins. With lo == hi == 0 the
/// range is taken from the data. Throws DataError on non-positive samples,
/// ConfigError for n_bins < 10.
BinnedDensity log_binned_pdf(std::span<const double> samples, std::size_t n_bins,
                             double lo = 0.0, double hi = 0.0);

/// Density of T/<T> over log bins; by construction curves for different q
/// collapse onto a common scaling function. Requires >= 100 intervals.
BinnedDensity scaled_interval_pdf(const IntervalSeries& s, std::size_t n_bins,
                                  double y_lo = 0.0, double y_hi = 0.0);

enum class ConditionSide { low, high };

/// Successor intervals T^(i+1) whose predecessor lies in the lowest
/// (T^i <= q_low) or highest (T^i >= q_high) octile.
std::vector<std::uint32_t> conditional_successors(const IntervalSeries& s,
                                                  ConditionSide side, double q_low,
                                                  double q_high);

/// Pooled successors across sequences; octiles are computed per sequence
/// so that differing per-sequence normalizations cannot masquerade as
/// memory. Sequences with fewer than 8 intervals are skipped.
std::vector<std::uint32_t> pooled_conditional_successors(
    const std::vector<IntervalSeries>& parts, ConditionSide side);

/// Scaled density of octile-conditioned successors; the scale is the
/// unconditioned mean interval of the full series. Requires >= 800
/// intervals and >= 100 selected successors.
BinnedDensity conditional_interval_pdf(const IntervalSeries& s, ConditionSide side,
                                       std::size_t n_bins, double y_lo = 0.0,
                                       double y_hi = 0.0);

/// Merge two accumulations with identical edges and kind: counts add;
/// pdf densities renormalize over the union, psd powers combine
/// count-weighted. Throws ConfigError on mismatched edges or kind.
BinnedDensity merge(const BinnedDensity& a, const BinnedDensity& b);

// ---------------------------------------------------------------------------
// spectral estimate

/// Segment-averaged one-sided periodogram on log-spaced frequency bins.
/// The series is split into n_segments equal non-overlapping rectangular
/// segments (no taper, per-segment mean removed); frequencies are in
/// 1/(trading day) for dt_days per sample. Requires length >=
/// n_segments * 64.
BinnedDensity psd(std::span<const double> series, double dt_days,
                  std::size_t n_segments, std::size_t n_bins = 48);

/// Unbinned variant: pairs (frequency, mean power over segments).
struct RawPsd {
    std::vector<double> freq;
    std::vector<double> power;
    std::size_t n_segments = 0;
};
RawPsd welch_psd_raw(std::span<const double> series, double dt_days,
                     std::size_t n_segments);

// ---------------------------------------------------------------------------
// fits and controls

struct SlopeFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    std::size_t n_bins = 0;
    double x_lo = 0.0, x_hi = 0.0; ///< actual fitted range
};

/// Least-squares slope of log(density) vs log(bin center) over occupied
/// bins with center in [x_lo, x_hi]. Requires >= 5 such bins.
SlopeFit tail_exponent_fit(const BinnedDensity& d, double x_lo, double x_hi);

/// Quadratic fit of log(density) on u = log(bin center): returns the
/// curvature coefficient and its standard error. Negative curvature is the
/// signature of an exponential-like (faster than power law) decay.
struct CurvatureFit {
    double curvature = 0.0;
    double stderr_curv = 0.0;
    std::size_t n_bins = 0;
};
CurvatureFit log_curvature_fit(const BinnedDensity& d, double x_lo, double x_hi);

/// Uniform random permutation; preserves the value multiset.
std::vector<double> reshuffle(std::span<const double> series, Rng& rng);

/// Nearest-rank quantile on a sorted copy: element at index ceil(p*n).
double quantile(std::span<const double> values, double p);
std::uint32_t quantile(std::span<const std::uint32_t> values, double p);

// ---------------------------------------------------------------------------
// running moments (streaming, mergeable)

class RunningMoments {
public:
    void add(double x);
    void merge(const RunningMoments& o);
    std::uint64_t count() const { return n_; }
    double mean() const { return n_ ? mean_ : 0.0; }
    double variance() const; ///< population variance
    double sample_variance() const;
    double sd() const;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// ---------------------------------------------------------------------------
// distribution comparison

/// Kolmogorov tail probability Q(lambda) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample KS distance of samples (sorted internally) against a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct KsTest {
    double distance = 0.0;
    double p_value = 0.0;
};

/// One-sample KS test with asymptotic p-value.
KsTest ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS test with asymptotic p-value (ties allowed).
KsTest ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS against a discrete (right-continuous, atom-valued) CDF:
/// the statistic compares the CDFs only at the atoms, so ties are handled
/// correctly. The asymptotic p-value is conservative for discrete laws.
KsTest ks_test_discrete(std::vector<double> samples,
                        const std::function<double(double)>& cdf);

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Two-sided Gaussian exceedance probability 2(1 - Phi(q)).
double gaussian_exceedance(double q);

/// CDF of the geometric interval law P(T <= t) = 1 - (1-p)^floor(t), t >= 1.
double geometric_cdf(double t, double p_exceed);

/// Sup distance of log10(density) between two binned densities over bins
/// where both have at least min_count samples; returns the distance and the
/// number of compared bins.
struct LogDistance {
    double sup = 0.0;
    std::size_t n_bins = 0;
};
LogDistance sup_log10_distance(const BinnedDensity& a, const BinnedDensity& b,
                               std::uint64_t min_count = 1);

} // namespace herdsim
