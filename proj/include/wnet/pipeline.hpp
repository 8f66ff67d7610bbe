#pragma once

#include "wnet/distributions.hpp"
#include "wnet/graph.hpp"
#include "wnet/stats.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wnet {

enum class Analysis { Stats, Moments, Correlations, Density, RankSize, TailFit, Symmetry };

std::string to_string(Analysis a);
/// Comma-separated names: stats, moments, correlations, density, ranksize, tailfit, symmetry.
std::set<Analysis> parse_analyses(std::string_view list);
std::set<Analysis> all_analyses();

/// "A:B" (inclusive) or "y1,y2,...". Result is sorted and deduplicated.
std::vector<int> parse_years(std::string_view selection);

struct PipelineConfig {
    std::string flows_path;
    std::optional<std::string> gdp_path;
    WeightScheme scheme;
    std::optional<std::vector<int>> years; // every panel year when unset
    std::set<Analysis> analyses;
    double ci_level = 0.90;
    double tail_fraction = 0.05;
    std::optional<double> bandwidth;
    unsigned jobs = 1;
    std::filesystem::path out_dir;
    bool write_networks = false; // dump each year's normalized W
    bool compare = false;        // add the BNA/WNA comparison table
    double strong_threshold = 0.7;
    double moderate_threshold = 0.3;

    /// Throws ValidationError. Touches no files.
    void validate() const;
};

struct LogEntry {
    int year = 0;
    std::string subject; // statistic, pair or analysis name
    std::string item;    // undefined, dropped, skipped, warning
    std::size_t count = 0;
    std::string note;
};

struct YearResult {
    int year = 0;
    double normalizer = 0.0;
    std::size_t directed_links = 0;
    std::size_t undirected_links = 0;
    std::optional<double> symmetry;
    NodeStatsTable table;
    std::optional<Matrix> weights; // normalized W, kept only when dumping networks
    std::map<std::string, DensityEstimate> densities;
    std::optional<RankSizeCurve> rank_size;
    std::optional<TailFit> tail_fit;
    std::vector<LogEntry> log;
};

struct ComparisonRow {
    std::string view; // BNA or WNA
    std::string assortativity_pair;
    double assortativity_r = 0.0;
    std::string assortativity_label;
    std::string clustering_pair;
    double clustering_r = 0.0;
    std::string clustering_label;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
};

struct ReportBundle {
    PipelineConfig config;
    std::vector<int> years;
    std::vector<YearResult> results; // parallel to years
    std::vector<MomentSummary> moments;
    std::map<std::string, std::vector<CorrelationPoint>> correlations; // keyed by pair label
    std::optional<ComparisonTable> comparison;
    std::vector<LogEntry> log;
    /// Relative path -> sha256 hex of every emitted file except the manifest.
    std::map<std::string, std::string> files;
};

/// Reads the inputs and computes every selected analysis in memory. Data
/// errors abort; degenerate statistics are logged and skipped.
ReportBundle compute_bundle(const PipelineConfig& config);

/// Writes the bundle into `dir` through a staging directory, so a failure
/// leaves nothing behind. Fills `bundle.files`.
void write_bundle(ReportBundle& bundle, const std::filesystem::path& dir);

/// compute_bundle + write_bundle into config.out_dir.
ReportBundle run_pipeline(const PipelineConfig& config);

/// "strong negative", "moderate positive", ... by |r| against the thresholds.
std::string correlation_label(double r, double strong = 0.7, double moderate = 0.3);

/// BNA row: ND-ANND and BCC-ND. WNA row: NS-ANNS and WCC-NS. Each cell is the
/// mean r over the series. Throws DataError naming a missing or empty series.
ComparisonTable compare_views(const ReportBundle& bundle, double strong = 0.7, double moderate = 0.3);

/// Loads correlations/<pair>.csv files from an existing bundle directory.
ReportBundle load_bundle_correlations(const std::filesystem::path& dir);

void write_comparison(std::ostream& out, const ComparisonTable& table);
void write_correlation_series(std::ostream& out, const std::vector<CorrelationPoint>& series);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

std::string version();

} // namespace wnet
