#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wnet {

/// Sorted set of country identifiers with a dense 0..N-1 index.
class CountryRegistry {
public:
    CountryRegistry() = default;
    /// Deduplicates and sorts lexicographically, so input order never matters.
    explicit CountryRegistry(std::vector<std::string> codes);

    std::size_t size() const { return codes_.size(); }
    bool empty() const { return codes_.empty(); }
    const std::vector<std::string>& codes() const { return codes_; }
    const std::string& code(std::size_t i) const { return codes_.at(i); }

    std::optional<std::size_t> find(std::string_view code) const;
    /// Throws DataError for unknown codes.
    std::size_t index(std::string_view code) const;

    friend bool operator==(const CountryRegistry&, const CountryRegistry&) = default;

private:
    std::vector<std::string> codes_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

struct FlowRecord {
    int year = 0;
    std::string exporter;
    std::string importer;
    double value = 0.0; // current US dollars

    friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

struct SizeRecord {
    int year = 0;
    std::string country;
    double gdp = 0.0;

    friend bool operator==(const SizeRecord&, const SizeRecord&) = default;
};

struct FlowFormat {
    char delimiter = ',';
    char comment = '#';
};

/// A flow whose exporter has no GDP record for that year. Only fatal for
/// weighting schemes that divide by the exporter's (or importer's) GDP.
struct PanelWarning {
    int year = 0;
    std::string country;
    std::string message;

    friend bool operator==(const PanelWarning&, const PanelWarning&) = default;
};

class PanelDataset {
public:
    const CountryRegistry& registry() const { return registry_; }
    const std::vector<int>& years() const { return years_; }
    bool has_year(int year) const;

    /// Flows for one year in canonical (exporter, importer) order. Empty if absent.
    const std::vector<FlowRecord>& flows(int year) const;
    /// GDP by country index for one year; nullopt where no record exists.
    std::vector<std::optional<double>> gdp(int year) const;
    const std::vector<SizeRecord>& sizes(int year) const;

    const std::vector<PanelWarning>& warnings() const { return warnings_; }

    /// Every record, canonical order (year, then codes).
    std::vector<FlowRecord> all_flows() const;
    std::vector<SizeRecord> all_sizes() const;

    friend bool operator==(const PanelDataset&, const PanelDataset&) = default;

private:
    friend PanelDataset assemble_panel(std::vector<FlowRecord>, std::vector<SizeRecord>);

    CountryRegistry registry_;
    std::vector<int> years_;
    std::map<int, std::vector<FlowRecord>> flows_;
    std::map<int, std::vector<SizeRecord>> sizes_;
    std::vector<PanelWarning> warnings_;
};

/// Header-labeled CSV with columns year, exporter, importer, value (any order,
/// extra columns ignored). Errors carry the 1-based line number.
std::vector<FlowRecord> parse_flows(std::istream& source, const FlowFormat& format = {});
/// Header-labeled CSV with columns year, country, gdp.
std::vector<SizeRecord> parse_sizes(std::istream& source, const FlowFormat& format = {});

PanelDataset assemble_panel(std::vector<FlowRecord> flows, std::vector<SizeRecord> sizes);

/// Canonical serialization; values at 17 significant digits.
void write_flows(std::ostream& out, const std::vector<FlowRecord>& flows);
void write_sizes(std::ostream& out, const std::vector<SizeRecord>& sizes);

PanelDataset load_panel(const std::string& flow_path, const std::optional<std::string>& gdp_path);

} // namespace wnet
