#pragma once

#include "wnet/graph.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wnet {

/// A per-node value that may be undefined (isolated node, degree < 2 for clustering).
using Maybe = std::optional<double>;

std::vector<int> node_degree(const UndirectedNetwork& net);
std::vector<double> node_strength(const UndirectedNetwork& net);

// The four below follow the row-vector/matrix-power formulas:
//   ANND_i = (A_(i) A 1) / ND_i          ANNS_i = (A_(i) W 1) / ND_i
//   BCC_i  = (A^3)_ii / (ND_i (ND_i-1))  WCC_i  = ((W^[1/3])^3)_ii / (ND_i (ND_i-1))
// where W^[1/3] is W with each entry raised to 1/3. WCC is normalized by the
// degree, not the strength.
std::vector<Maybe> annd(const UndirectedNetwork& net);
std::vector<Maybe> anns(const UndirectedNetwork& net);
std::vector<Maybe> bcc(const UndirectedNetwork& net);
std::vector<Maybe> wcc(const UndirectedNetwork& net);

enum class Statistic { ND, NS, ANND, ANNS, BCC, WCC };

inline constexpr Statistic kAllStatistics[] = {Statistic::ND,   Statistic::NS,  Statistic::ANND,
                                               Statistic::ANNS, Statistic::BCC, Statistic::WCC};

std::string to_string(Statistic s);
/// Case-insensitive; "nd", "NS", ...
Statistic parse_statistic(std::string_view name);

struct NodeStatsTable {
    int year = 0;
    CountryRegistry registry;
    std::vector<int> nd;
    std::vector<double> ns;
    std::vector<Maybe> annd;
    std::vector<Maybe> anns;
    std::vector<Maybe> bcc;
    std::vector<Maybe> wcc;

    std::size_t size() const { return nd.size(); }
    /// Column for any statistic, with ND/NS lifted to always-defined values.
    std::vector<Maybe> column(Statistic s) const;
};

NodeStatsTable node_stats(const UndirectedNetwork& net);

/// `country,nd,ns,annd,anns,bcc,wcc`; undefined cells are empty.
void write_node_stats(std::ostream& out, const NodeStatsTable& table);

/// Population moments over the defined entries. Skewness and kurtosis are the
/// third and fourth standardized moments (no excess correction) and are
/// undefined when the standard deviation is zero.
struct MomentSummary {
    std::string statistic;
    int year = 0;
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    Maybe skewness;
    Maybe kurtosis;
};

/// Throws DegenerateError with fewer than two defined entries.
MomentSummary moments(std::span<const Maybe> values, std::string statistic = {}, int year = 0);

} // namespace wnet
