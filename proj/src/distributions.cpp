#include "wnet/distributions.hpp"

#include "wnet/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace wnet {

std::vector<double> defined_values(std::span<const Maybe> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values)
        if (v)
            out.push_back(*v);
    return out;
}

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Linear interpolation between order statistics (R type 7).
double quantile_sorted(std::span<const double> sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

bool all_equal(std::span<const double> v) {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

} // namespace

// ---------------------------------------------------------------------------

double DensityEstimate::integral() const {
    double total = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        total += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    return total;
}

double silverman_bandwidth(std::span<const double> values) {
    if (values.size() < 2)
        throw DegenerateError("bandwidth needs at least 2 values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const double n = static_cast<double>(sorted.size());
    const double mean = mean_of(sorted);
    double ss = 0.0;
    for (const double v : sorted)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(n, -0.2);
}

DensityEstimate kde(std::span<const double> values, const KdeOptions& options) {
    if (values.size() < 5)
        throw DegenerateError("density estimate needs at least 5 values, got " + std::to_string(values.size()));
    if (all_equal(values))
        throw DegenerateError("density estimate of a constant sample");
    if (options.grid_points < 2)
        throw ValidationError("density grid needs at least 2 points");
    if (options.bandwidth && !(*options.bandwidth > 0.0 && std::isfinite(*options.bandwidth)))
        throw ValidationError("bandwidth must be positive");

    const double h = options.bandwidth ? *options.bandwidth : silverman_bandwidth(values);
    if (!(h > 0.0))
        throw DegenerateError("bandwidth collapsed to zero");

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it - options.grid_padding * h;
    const double hi = *hi_it + options.grid_padding * h;
    const std::size_t m = options.grid_points;

    DensityEstimate est;
    est.bandwidth = h;
    est.sample_size = values.size();
    est.grid.resize(m);
    est.density.assign(m, 0.0);

    const double step = (hi - lo) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i)
        est.grid[i] = lo + step * static_cast<double>(i);
    est.grid.back() = hi;

    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < m; ++i) {
        double sum = 0.0;
        for (const double v : values) {
            const double u = (est.grid[i] - v) / h;
            sum += std::exp(-0.5 * u * u);
        }
        est.density[i] = sum * norm;
    }
    return est;
}

std::vector<double> density_modes(const DensityEstimate& estimate, double min_relative_height) {
    const auto& d = estimate.density;
    std::vector<double> modes;
    if (d.size() < 3)
        return modes;
    const double top = *std::max_element(d.begin(), d.end());
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        if (d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] >= min_relative_height * top)
            modes.push_back(estimate.grid[i]);
    }
    return modes;
}

// ---------------------------------------------------------------------------

std::pair<double, double> fisher_interval(double r, std::size_t n, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw ValidationError("confidence level must lie in (0, 1)");
    if (n < 3)
        throw DegenerateError("confidence interval needs n >= 3");
    if (std::abs(r) >= 1.0)
        return {r, r};
    if (n == 3)
        return {-1.0, 1.0};

    const boost::math::normal standard;
    const double zcrit = boost::math::quantile(standard, 0.5 + 0.5 * level);
    const double z = std::atanh(r);
    const double half = zcrit / std::sqrt(static_cast<double>(n) - 3.0);
    const double low = std::min(std::tanh(z - half), r);
    const double high = std::max(std::tanh(z + half), r);
    return {low, high};
}

CorrelationPoint pearson_with_ci(std::span<const double> x, std::span<const double> y, double level) {
    if (x.size() != y.size())
        throw ValidationError("correlation inputs differ in length");
    if (!(level > 0.0 && level < 1.0))
        throw ValidationError("confidence level must lie in (0, 1)");
    if (x.size() < 3)
        throw DegenerateError("correlation needs at least 3 jointly defined pairs, got " + std::to_string(x.size()));
    if (all_equal(x) || all_equal(y))
        throw DegenerateError("correlation with a zero-variance input");

    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw DegenerateError("correlation with a zero-variance input");

    CorrelationPoint pt;
    pt.n = x.size();
    pt.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    std::tie(pt.ci_low, pt.ci_high) = fisher_interval(pt.r, pt.n, level);
    return pt;
}

CorrelationPoint pearson_with_ci(std::span<const Maybe> x, std::span<const Maybe> y, double level) {
    if (x.size() != y.size())
        throw ValidationError("correlation inputs differ in length");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i]) {
            xs.push_back(*x[i]);
            ys.push_back(*y[i]);
        }
    }
    return pearson_with_ci(std::span<const double>(xs), std::span<const double>(ys), level);
}

std::string to_string(CorrelationPair p) {
    const auto [x, y] = pair_statistics(p);
    return to_string(x) + "-" + to_string(y);
}

std::pair<Statistic, Statistic> pair_statistics(CorrelationPair p) {
    switch (p) {
    case CorrelationPair::ND_NS:
        return {Statistic::ND, Statistic::NS};
    case CorrelationPair::ND_ANND:
        return {Statistic::ND, Statistic::ANND};
    case CorrelationPair::NS_ANNS:
        return {Statistic::NS, Statistic::ANNS};
    case CorrelationPair::BCC_ND:
        return {Statistic::BCC, Statistic::ND};
    case CorrelationPair::WCC_NS:
        return {Statistic::WCC, Statistic::NS};
    }
    return {Statistic::ND, Statistic::ND};
}

CorrelationPair parse_pair(std::string_view label) {
    for (const auto p : kAllPairs)
        if (to_string(p) == label)
            return p;
    throw ValidationError("unsupported correlation pair '" + std::string(label) + "'");
}

CorrelationPoint correlation_point(const NodeStatsTable& table, CorrelationPair pair, double level) {
    const auto [xs, ys] = pair_statistics(pair);
    const auto x = table.column(xs);
    const auto y = table.column(ys);
    auto pt = pearson_with_ci(std::span<const Maybe>(x), std::span<const Maybe>(y), level);
    pt.year = table.year;
    pt.pair = to_string(pair);
    return pt;
}

std::vector<CorrelationPoint> correlation_series(std::span<const NodeStatsTable> tables, CorrelationPair pair,
                                                 double level) {
    std::vector<CorrelationPoint> out;
    out.reserve(tables.size());
    for (const auto& t : tables) {
        try {
            out.push_back(correlation_point(t, pair, level));
        } catch (const DegenerateError& e) {
            throw DegenerateError(to_string(pair) + " in " + std::to_string(t.year) + ": " + e.what());
        }
    }
    return out;
}

std::vector<CorrelationPoint> correlation_series(std::span<const NodeStatsTable> tables, std::string_view pair,
                                                 double level) {
    return correlation_series(tables, parse_pair(pair), level);
}

// ---------------------------------------------------------------------------

RankSizeCurve rank_size(std::span<const double> values) {
    RankSizeCurve curve;
    for (const double v : values) {
        if (v > 0.0 && std::isfinite(v))
            curve.sizes.push_back(v);
        else
            ++curve.dropped;
    }
    if (curve.sizes.empty())
        throw DegenerateError("rank-size curve needs at least one positive value");
    std::sort(curve.sizes.begin(), curve.sizes.end(), std::greater<>());
    curve.ranks.resize(curve.sizes.size());
    std::iota(curve.ranks.begin(), curve.ranks.end(), std::size_t{1});
    return curve;
}

RankSizeCurve rank_size(std::span<const Maybe> values) {
    const auto defined = defined_values(values);
    auto curve = rank_size(std::span<const double>(defined));
    curve.dropped += values.size() - defined.size();
    return curve;
}

double rank_size_slope(const RankSizeCurve& curve, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ValidationError("slope fraction must lie in (0, 1]");
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(curve.sizes.size())));
    if (k < 2)
        throw DegenerateError("slope needs at least 2 ranks");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += std::log(static_cast<double>(curve.ranks[i]));
        my += std::log(curve.sizes[i]);
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dx = std::log(static_cast<double>(curve.ranks[i])) - mx;
        sxy += dx * (std::log(curve.sizes[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

TailFit fit_tail(std::span<const double> values, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw ValidationError("tail fraction must lie in (0, 1)");

    std::vector<double> positive;
    std::size_t dropped = 0;
    for (const double v : values) {
        if (v > 0.0 && std::isfinite(v))
            positive.push_back(v);
        else
            ++dropped;
    }
    if (positive.size() < 50)
        throw DegenerateError("tail fit needs at least 50 positive values, got " + std::to_string(positive.size()));
    if (all_equal(positive))
        throw DegenerateError("tail fit of a constant sample");

    std::sort(positive.begin(), positive.end(), std::greater<>());
    const std::size_t n = positive.size();

    TailFit fit;
    fit.q = tail_fraction;
    fit.n = n;
    fit.dropped = dropped;

    std::vector<double> logs(n);
    std::transform(positive.begin(), positive.end(), logs.begin(), [](double v) { return std::log(v); });
    fit.mu = mean_of(logs);
    double ss = 0.0;
    for (const double l : logs)
        ss += (l - fit.mu) * (l - fit.mu);
    fit.sigma = std::sqrt(ss / static_cast<double>(n));

    const auto k = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(n))), 1, n - 1);
    fit.tail_count = k;
    fit.x_min = positive[k];
    const double log_min = logs[k];
    double excess = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        excess += logs[i] - log_min;
    if (!(excess > 0.0))
        throw DegenerateError("tail values all equal the threshold; Hill estimate undefined");
    fit.alpha = static_cast<double>(k) / excess;
    return fit;
}

TailFit fit_tail(std::span<const Maybe> values, double tail_fraction) {
    const auto defined = defined_values(values);
    auto fit = fit_tail(std::span<const double>(defined), tail_fraction);
    fit.dropped += values.size() - defined.size();
    return fit;
}

} // namespace wnet
