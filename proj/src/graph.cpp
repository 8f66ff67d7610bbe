#include "wnet/graph.hpp"

#include "text.hpp"
#include "wnet/error.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace wnet {

std::string_view to_string(WeightVariant v) {
    switch (v) {
    case WeightVariant::ExporterGdp:
        return "exporter-gdp";
    case WeightVariant::ImporterGdp:
        return "importer-gdp";
    case WeightVariant::Raw:
        return "raw";
    }
    return "unknown";
}

WeightVariant parse_weight_variant(std::string_view name) {
    if (name == "exporter-gdp")
        return WeightVariant::ExporterGdp;
    if (name == "importer-gdp")
        return WeightVariant::ImporterGdp;
    if (name == "raw")
        return WeightVariant::Raw;
    throw ValidationError("unknown weighting scheme '" + std::string(name) + "'");
}

namespace {

Matrix indicator(const Matrix& weights) {
    return (weights.array() > 0.0).cast<double>().matrix();
}

std::size_t count_nonzero(const Matrix& m) {
    return static_cast<std::size_t>((m.array() != 0.0).count());
}

} // namespace

DirectedTradeNetwork::DirectedTradeNetwork(int year, CountryRegistry registry, Matrix weights)
    : year_(year), registry_(std::move(registry)), weights_(std::move(weights)) {
    const auto n = static_cast<Eigen::Index>(registry_.size());
    if (weights_.rows() != n || weights_.cols() != n)
        throw DataError("weight matrix does not match registry size");
    if (!weights_.allFinite() || (weights_.array() < 0.0).any())
        throw DataError("weights must be finite and nonnegative");
    if ((weights_.diagonal().array() != 0.0).any())
        throw DataError("self-loops are not allowed");
    adjacency_ = indicator(weights_);
}

std::size_t DirectedTradeNetwork::link_count() const { return count_nonzero(adjacency_); }

UndirectedNetwork::UndirectedNetwork(int year, CountryRegistry registry, Matrix adjacency, Matrix weights,
                                     double normalizer)
    : year_(year), registry_(std::move(registry)), adjacency_(std::move(adjacency)), weights_(std::move(weights)),
      normalizer_(normalizer) {}

UndirectedNetwork UndirectedNetwork::from_symmetric(int year, CountryRegistry registry, const Matrix& weights) {
    const auto n = static_cast<Eigen::Index>(registry.size());
    if (weights.rows() != n || weights.cols() != n)
        throw DataError("weight matrix does not match registry size");
    if (!weights.allFinite() || (weights.array() < 0.0).any())
        throw DataError("weights must be finite and nonnegative");
    if ((weights.diagonal().array() != 0.0).any())
        throw DataError("self-loops are not allowed");
    if (weights != weights.transpose())
        throw DataError("weight matrix is not symmetric");
    const double top = n == 0 ? 0.0 : weights.maxCoeff();
    if (!(top > 0.0))
        throw DataError("network for " + std::to_string(year) + " has no links");

    Matrix normalized = weights / top;
    // Exact 1 at the maximum, whatever the rounding of w / max elsewhere.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (weights(i, j) == top)
                normalized(i, j) = 1.0;
    Matrix adjacency = indicator(normalized);
    return UndirectedNetwork(year, std::move(registry), std::move(adjacency), std::move(normalized), top);
}

std::size_t UndirectedNetwork::link_count() const { return count_nonzero(adjacency_) / 2; }

DirectedTradeNetwork build_directed(const PanelDataset& panel, int year, const WeightScheme& scheme) {
    if (!(scheme.threshold >= 0.0) || !std::isfinite(scheme.threshold))
        throw ValidationError("threshold must be a finite nonnegative number");
    if (!panel.has_year(year))
        throw DataError("year " + std::to_string(year) + " is not in the panel");

    const auto& registry = panel.registry();
    const auto n = static_cast<Eigen::Index>(registry.size());
    const auto gdp = panel.gdp(year);
    Matrix weights = Matrix::Zero(n, n);

    auto divisor = [&](std::size_t country) {
        const auto& g = gdp[country];
        if (!g)
            throw DataError("missing gdp for " + registry.code(country) + " in " + std::to_string(year) +
                            " (required by scheme " + std::string(to_string(scheme.variant)) + ")");
        return *g;
    };

    std::size_t links = 0;
    for (const auto& flow : panel.flows(year)) {
        if (!(flow.value > scheme.threshold))
            continue;
        const auto i = registry.index(flow.exporter);
        const auto j = registry.index(flow.importer);
        double w = flow.value;
        switch (scheme.variant) {
        case WeightVariant::ExporterGdp:
            w /= divisor(i);
            break;
        case WeightVariant::ImporterGdp:
            w /= divisor(j);
            break;
        case WeightVariant::Raw:
            break;
        }
        // A positive flow over a huge GDP can underflow to zero; the link still exists.
        if (!(w > 0.0))
            throw DataError("weight underflow for " + flow.exporter + "->" + flow.importer + " in " +
                            std::to_string(year));
        weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
        ++links;
    }
    if (links == 0)
        throw DataError("no flows above threshold in " + std::to_string(year));
    return DirectedTradeNetwork(year, registry, std::move(weights));
}

UndirectedNetwork symmetrize(const DirectedTradeNetwork& net) {
    const Matrix& w = net.weights();
    const Matrix averaged = 0.5 * (w + w.transpose());
    return UndirectedNetwork::from_symmetric(net.year(), net.registry(), averaged);
}

double symmetry_index(const DirectedTradeNetwork& net) {
    const Matrix& w = net.weights();
    // Rescale first so squaring tiny (or huge) raw weights cannot under/overflow.
    const double top = w.size() == 0 ? 0.0 : w.maxCoeff();
    if (!(top > 0.0))
        throw DataError("symmetry index undefined for a network without links");
    const Matrix scaled = w / top;
    const double diff = (scaled - scaled.transpose()).norm();
    const double sum = (scaled + scaled.transpose()).norm();
    return diff / sum;
}

void write_matrix_dump(std::ostream& out, const MatrixDump& dump) {
    out << "# year=" << dump.year << " scheme=" << dump.scheme << " normalizer=" << text::format_g17(dump.normalizer)
        << '\n';
    for (Eigen::Index i = 0; i < dump.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < dump.values.cols(); ++j) {
            if (j > 0)
                out << ' ';
            out << text::format_g17(dump.values(i, j));
        }
        out << '\n';
    }
}

MatrixDump read_matrix_dump(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# ", 0) != 0)
        throw DataError("matrix dump: missing '# year=... scheme=... normalizer=...' header");

    MatrixDump dump;
    bool have_year = false, have_scheme = false, have_norm = false;
    std::istringstream fields(header.substr(2));
    std::string token;
    while (fields >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw DataError("matrix dump: malformed header token '" + token + "'");
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "year") {
            const auto y = text::parse_int(value);
            if (!y)
                throw DataError("matrix dump: bad year '" + value + "'");
            dump.year = *y;
            have_year = true;
        } else if (key == "scheme") {
            dump.scheme = value;
            have_scheme = true;
        } else if (key == "normalizer") {
            const auto v = text::parse_double(value);
            if (!v)
                throw DataError("matrix dump: bad normalizer '" + value + "'");
            dump.normalizer = *v;
            have_norm = true;
        }
    }
    if (!have_year || !have_scheme || !have_norm)
        throw DataError("matrix dump: header must carry year, scheme and normalizer");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty())
            continue;
        std::istringstream cells(line);
        std::vector<double> row;
        std::string cell;
        while (cells >> cell) {
            const auto v = text::parse_double(cell);
            if (!v)
                throw DataError("matrix dump line " + std::to_string(lineno) + ": bad value '" + cell + "'");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    dump.values = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n)
            throw DataError("matrix dump: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                            " entries, expected " + std::to_string(n));
        for (Eigen::Index j = 0; j < n; ++j)
            dump.values(i, j) = rows[i][j];
    }
    return dump;
}

} // namespace wnet
