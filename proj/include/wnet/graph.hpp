#pragma once

#include "wnet/ingest.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <string_view>

namespace wnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class WeightVariant {
    ExporterGdp, // e_ij / GDP_i
    ImporterGdp, // e_ij / GDP_j
    Raw,         // e_ij
};

std::string_view to_string(WeightVariant v);
/// Accepts "exporter-gdp", "importer-gdp", "raw".
WeightVariant parse_weight_variant(std::string_view name);

struct WeightScheme {
    WeightVariant variant = WeightVariant::ExporterGdp;
    /// A link exists iff the flow is strictly greater than this.
    double threshold = 0.0;

    bool needs_gdp() const { return variant != WeightVariant::Raw; }
};

/// Rows are exporters, columns importers.
class DirectedTradeNetwork {
public:
    /// Validates zero diagonal, nonnegative weights and adjacency = (weight > 0).
    DirectedTradeNetwork(int year, CountryRegistry registry, Matrix weights);

    int year() const { return year_; }
    const CountryRegistry& registry() const { return registry_; }
    std::size_t size() const { return registry_.size(); }
    const Matrix& adjacency() const { return adjacency_; }
    const Matrix& weights() const { return weights_; }
    std::size_t link_count() const;

private:
    int year_;
    CountryRegistry registry_;
    Matrix adjacency_;
    Matrix weights_;
};

/// Symmetric, zero-diagonal, max-normalized network.
class UndirectedNetwork {
public:
    /// Divides a symmetric nonnegative matrix by its maximum entry and records
    /// that maximum as the normalizer. Throws DataError if there are no links.
    static UndirectedNetwork from_symmetric(int year, CountryRegistry registry, const Matrix& weights);

    int year() const { return year_; }
    const CountryRegistry& registry() const { return registry_; }
    std::size_t size() const { return registry_.size(); }
    const Matrix& adjacency() const { return adjacency_; }
    const Matrix& weights() const { return weights_; }
    double normalizer() const { return normalizer_; }
    std::size_t link_count() const;

private:
    UndirectedNetwork(int year, CountryRegistry registry, Matrix adjacency, Matrix weights, double normalizer);

    int year_;
    CountryRegistry registry_;
    Matrix adjacency_;
    Matrix weights_;
    double normalizer_;
};

/// Throws DataError when the year is absent, a required GDP is missing
/// (naming the country) or no flow passes the threshold.
DirectedTradeNetwork build_directed(const PanelDataset& panel, int year, const WeightScheme& scheme);

/// a_ij = max(ã_ij, ã_ji); w_ij = (w̃_ij + w̃_ji) / 2, then divided by the largest w_ij.
UndirectedNetwork symmetrize(const DirectedTradeNetwork& net);

/// ||W - W^T||_F / ||W + W^T||_F: 0 for symmetric weights, 1 when nothing is reciprocated.
double symmetry_index(const DirectedTradeNetwork& net);

struct MatrixDump {
    int year = 0;
    std::string scheme;
    double normalizer = 0.0;
    Matrix values;
};

/// Header `# year=<y> scheme=<s> normalizer=<v>` then one whitespace-separated
/// row per line, 17 significant digits.
void write_matrix_dump(std::ostream& out, const MatrixDump& dump);
MatrixDump read_matrix_dump(std::istream& in);

} // namespace wnet
