#pragma once

#include "wnet/stats.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wnet {

/// Keeps the defined entries, in order.
std::vector<double> defined_values(std::span<const Maybe> values);

// ---------------------------------------------------------------------------
// Kernel density
// ---------------------------------------------------------------------------

struct DensityEstimate {
    std::vector<double> grid;    // ascending
    std::vector<double> density; // Gaussian-kernel estimate at each grid point
    double bandwidth = 0.0;
    std::size_t sample_size = 0;

    /// Trapezoidal integral of the density over the grid.
    double integral() const;
};

struct KdeOptions {
    std::optional<double> bandwidth; // Silverman's rule when unset
    std::size_t grid_points = 512;
    double grid_padding = 3.0; // grid spans [min - pad*h, max + pad*h]
};

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5), sd with the n-1 convention. Falls back
/// to sd when the IQR is zero.
double silverman_bandwidth(std::span<const double> values);

/// Needs at least 5 values with nonzero spread (DegenerateError otherwise).
DensityEstimate kde(std::span<const double> values, const KdeOptions& options = {});

/// Grid positions of the strict interior local maxima, ascending. Peaks lower
/// than `min_relative_height` times the global maximum are ignored.
std::vector<double> density_modes(const DensityEstimate& estimate, double min_relative_height = 0.0);

// ---------------------------------------------------------------------------
// Correlation
// ---------------------------------------------------------------------------

struct CorrelationPoint {
    int year = 0;
    std::string pair;
    double r = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
};

/// Pearson r over the jointly defined pairs with a two-sided Fisher-z interval
/// at `level` (0.90 gives the 5% and 95% endpoints). Needs n >= 3 and nonzero
/// variance in both inputs.
CorrelationPoint pearson_with_ci(std::span<const Maybe> x, std::span<const Maybe> y, double level = 0.90);
CorrelationPoint pearson_with_ci(std::span<const double> x, std::span<const double> y, double level = 0.90);

/// Fisher-z interval for a given r and sample size.
std::pair<double, double> fisher_interval(double r, std::size_t n, double level);

enum class CorrelationPair { ND_NS, ND_ANND, NS_ANNS, BCC_ND, WCC_NS };

inline constexpr CorrelationPair kAllPairs[] = {CorrelationPair::ND_NS, CorrelationPair::ND_ANND,
                                                CorrelationPair::NS_ANNS, CorrelationPair::BCC_ND,
                                                CorrelationPair::WCC_NS};

std::string to_string(CorrelationPair p);
/// "ND-NS", "ND-ANND", "NS-ANNS", "BCC-ND", "WCC-NS"; ValidationError otherwise.
CorrelationPair parse_pair(std::string_view label);
/// The (x, y) statistics a pair correlates.
std::pair<Statistic, Statistic> pair_statistics(CorrelationPair p);

CorrelationPoint correlation_point(const NodeStatsTable& table, CorrelationPair pair, double level = 0.90);
/// One point per table, in table order. A degenerate year throws, naming the year.
std::vector<CorrelationPoint> correlation_series(std::span<const NodeStatsTable> tables, CorrelationPair pair,
                                                 double level = 0.90);
std::vector<CorrelationPoint> correlation_series(std::span<const NodeStatsTable> tables, std::string_view pair,
                                                 double level = 0.90);

// ---------------------------------------------------------------------------
// Rank-size and tails
// ---------------------------------------------------------------------------

struct RankSizeCurve {
    std::vector<double> sizes;      // descending, strictly positive
    std::vector<std::size_t> ranks; // 1..n
    std::size_t dropped = 0;        // zeros, negatives and undefined entries removed
};

RankSizeCurve rank_size(std::span<const Maybe> values);
RankSizeCurve rank_size(std::span<const double> values);

/// Least-squares slope of log(size) against log(rank) over the top
/// `fraction` of ranks. For a Pareto tail with exponent a this is about -1/a.
double rank_size_slope(const RankSizeCurve& curve, double fraction);

struct TailFit {
    double mu = 0.0;    // mean of log values
    double sigma = 0.0; // MLE standard deviation of log values
    double alpha = 0.0; // Hill estimate
    double x_min = 0.0; // threshold: the largest value outside the top fraction
    double q = 0.0;
    std::size_t n = 0;          // positive values used
    std::size_t tail_count = 0; // order statistics entering the Hill sum
    std::size_t dropped = 0;
};

/// Log-normal body by maximum likelihood on all positive values; Pareto tail by
/// the Hill estimator on the largest floor(q*n) values. Needs 50 positive values.
TailFit fit_tail(std::span<const Maybe> values, double tail_fraction = 0.05);
TailFit fit_tail(std::span<const double> values, double tail_fraction = 0.05);

} // namespace wnet
