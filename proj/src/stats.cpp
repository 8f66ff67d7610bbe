#include "wnet/stats.hpp"

#include "text.hpp"
#include "wnet/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

namespace wnet {

namespace {

// (M^3)_ii for every i, as the row sums of (M M) .* M^T.
Vector cube_diagonal(const Matrix& m) {
    const Matrix squared = m * m;
    return squared.cwiseProduct(m.transpose()).rowwise().sum();
}

std::vector<Maybe> divide_by_degree(const Vector& numerator, const Vector& degree) {
    std::vector<Maybe> out(static_cast<std::size_t>(numerator.size()));
    for (Eigen::Index i = 0; i < numerator.size(); ++i)
        if (degree(i) > 0.0)
            out[static_cast<std::size_t>(i)] = numerator(i) / degree(i);
    return out;
}

std::vector<Maybe> divide_by_pairs(const Vector& numerator, const Vector& degree) {
    std::vector<Maybe> out(static_cast<std::size_t>(numerator.size()));
    for (Eigen::Index i = 0; i < numerator.size(); ++i)
        if (degree(i) > 1.0)
            out[static_cast<std::size_t>(i)] = numerator(i) / (degree(i) * (degree(i) - 1.0));
    return out;
}

Vector degree_vector(const UndirectedNetwork& net) { return net.adjacency().rowwise().sum(); }

} // namespace

std::vector<int> node_degree(const UndirectedNetwork& net) {
    const Vector d = degree_vector(net);
    std::vector<int> out(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        out[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(d(i)));
    return out;
}

std::vector<double> node_strength(const UndirectedNetwork& net) {
    const Vector s = net.weights().rowwise().sum();
    return {s.data(), s.data() + s.size()};
}

std::vector<Maybe> annd(const UndirectedNetwork& net) {
    const Matrix& a = net.adjacency();
    const Vector degree = degree_vector(net);
    return divide_by_degree(a * degree, degree);
}

std::vector<Maybe> anns(const UndirectedNetwork& net) {
    const Matrix& a = net.adjacency();
    const Vector strength = net.weights().rowwise().sum();
    return divide_by_degree(a * strength, degree_vector(net));
}

std::vector<Maybe> bcc(const UndirectedNetwork& net) {
    return divide_by_pairs(cube_diagonal(net.adjacency()), degree_vector(net));
}

std::vector<Maybe> wcc(const UndirectedNetwork& net) {
    const Matrix roots = net.weights().unaryExpr([](double w) { return std::cbrt(w); });
    return divide_by_pairs(cube_diagonal(roots), degree_vector(net));
}

std::string to_string(Statistic s) {
    switch (s) {
    case Statistic::ND:
        return "ND";
    case Statistic::NS:
        return "NS";
    case Statistic::ANND:
        return "ANND";
    case Statistic::ANNS:
        return "ANNS";
    case Statistic::BCC:
        return "BCC";
    case Statistic::WCC:
        return "WCC";
    }
    return "?";
}

Statistic parse_statistic(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (const auto s : kAllStatistics)
        if (to_string(s) == upper)
            return s;
    throw ValidationError("unknown statistic '" + std::string(name) + "'");
}

std::vector<Maybe> NodeStatsTable::column(Statistic s) const {
    switch (s) {
    case Statistic::ND:
        return {nd.begin(), nd.end()};
    case Statistic::NS:
        return {ns.begin(), ns.end()};
    case Statistic::ANND:
        return annd;
    case Statistic::ANNS:
        return anns;
    case Statistic::BCC:
        return bcc;
    case Statistic::WCC:
        return wcc;
    }
    return {};
}

NodeStatsTable node_stats(const UndirectedNetwork& net) {
    NodeStatsTable t;
    t.year = net.year();
    t.registry = net.registry();
    t.nd = node_degree(net);
    t.ns = node_strength(net);
    t.annd = annd(net);
    t.anns = anns(net);
    t.bcc = bcc(net);
    t.wcc = wcc(net);
    return t;
}

void write_node_stats(std::ostream& out, const NodeStatsTable& table) {
    out << "country,nd,ns,annd,anns,bcc,wcc\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.registry.code(i) << ',' << table.nd[i] << ',' << text::format_double(table.ns[i]) << ','
            << text::format_optional(table.annd[i]) << ',' << text::format_optional(table.anns[i]) << ','
            << text::format_optional(table.bcc[i]) << ',' << text::format_optional(table.wcc[i]) << '\n';
    }
}

MomentSummary moments(std::span<const Maybe> values, std::string statistic, int year) {
    std::vector<double> defined;
    for (const auto& v : values)
        if (v)
            defined.push_back(*v);
    if (defined.size() < 2)
        throw DegenerateError("moments need at least 2 defined values, got " + std::to_string(defined.size()));

    const double n = static_cast<double>(defined.size());
    double mean = 0.0;
    for (const double v : defined)
        mean += v;
    mean /= n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double v : defined) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    MomentSummary out;
    out.statistic = std::move(statistic);
    out.year = year;
    out.count = defined.size();
    out.mean = mean;
    const auto [lo, hi] = std::minmax_element(defined.begin(), defined.end());
    if (*lo == *hi) {
        out.mean = *lo;
        out.stddev = 0.0;
        return out;
    }
    out.stddev = std::sqrt(m2);
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis = m4 / (m2 * m2);
    }
    return out;
}

} // namespace wnet
