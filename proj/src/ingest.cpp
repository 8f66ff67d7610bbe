#include "wnet/ingest.hpp"

#include "text.hpp"
#include "wnet/error.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

namespace wnet {

CountryRegistry::CountryRegistry(std::vector<std::string> codes) : codes_(std::move(codes)) {
    std::sort(codes_.begin(), codes_.end());
    codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
    for (std::size_t i = 0; i < codes_.size(); ++i)
        index_.emplace(codes_[i], i);
}

std::optional<std::size_t> CountryRegistry::find(std::string_view code) const {
    const auto it = index_.find(code);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t CountryRegistry::index(std::string_view code) const {
    if (const auto i = find(code))
        return *i;
    throw DataError("unknown country '" + std::string(code) + "'");
}

namespace {

std::string line_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

// Streams data rows of a header-labeled delimited file, resolving the
// required columns by name.
template <std::size_t K, typename RowFn>
void read_table(std::istream& in, const FlowFormat& format, const std::array<std::string_view, K>& columns,
                RowFn&& on_row) {
    std::string line;
    std::size_t lineno = 0;
    std::array<std::size_t, K> position{};
    std::size_t width = 0;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++lineno;
        const auto body = text::trim(line);
        if (body.empty() || body.front() == format.comment)
            continue;
        auto fields = text::split(body, format.delimiter);

        if (!have_header) {
            for (std::size_t k = 0; k < K; ++k) {
                std::size_t hits = 0;
                for (std::size_t f = 0; f < fields.size(); ++f) {
                    if (fields[f] == columns[k]) {
                        position[k] = f;
                        ++hits;
                    }
                }
                if (hits == 0)
                    throw DataError(line_error(lineno, "header is missing column '" + std::string(columns[k]) + "'"));
                if (hits > 1)
                    throw DataError(line_error(lineno, "header repeats column '" + std::string(columns[k]) + "'"));
            }
            width = fields.size();
            have_header = true;
            continue;
        }

        if (fields.size() != width)
            throw DataError(line_error(lineno, "expected " + std::to_string(width) + " fields, found " +
                                                   std::to_string(fields.size())));
        std::array<std::string_view, K> row{};
        for (std::size_t k = 0; k < K; ++k)
            row[k] = fields[position[k]];
        on_row(lineno, row);
    }
    if (!have_header)
        throw DataError("missing header row");
}

int require_year(std::size_t lineno, std::string_view field) {
    const auto year = text::parse_int(field);
    if (!year)
        throw DataError(line_error(lineno, "malformed year '" + std::string(field) + "'"));
    return *year;
}

std::string require_code(std::size_t lineno, std::string_view field, std::string_view what) {
    if (field.empty())
        throw DataError(line_error(lineno, "empty " + std::string(what)));
    return std::string(field);
}

} // namespace

std::vector<FlowRecord> parse_flows(std::istream& source, const FlowFormat& format) {
    static constexpr std::array<std::string_view, 4> columns{"year", "exporter", "importer", "value"};
    std::vector<FlowRecord> out;
    std::set<std::tuple<int, std::string, std::string>> seen;

    read_table(source, format, columns, [&](std::size_t lineno, const auto& row) {
        FlowRecord rec;
        rec.year = require_year(lineno, row[0]);
        rec.exporter = require_code(lineno, row[1], "exporter");
        rec.importer = require_code(lineno, row[2], "importer");
        const auto value = text::parse_double(row[3]);
        if (!value)
            throw DataError(line_error(lineno, "malformed value '" + std::string(row[3]) + "'"));
        if (*value < 0.0)
            throw DataError(line_error(lineno, "negative value " + std::string(row[3])));
        if (rec.exporter == rec.importer)
            throw DataError(line_error(lineno, "self-flow for " + rec.exporter));
        rec.value = *value;
        if (!seen.emplace(rec.year, rec.exporter, rec.importer).second)
            throw DataError(line_error(lineno, "duplicate flow " + rec.exporter + "->" + rec.importer + " in " +
                                                   std::to_string(rec.year)));
        out.push_back(std::move(rec));
    });
    return out;
}

std::vector<SizeRecord> parse_sizes(std::istream& source, const FlowFormat& format) {
    static constexpr std::array<std::string_view, 3> columns{"year", "country", "gdp"};
    std::vector<SizeRecord> out;
    std::set<std::pair<int, std::string>> seen;

    read_table(source, format, columns, [&](std::size_t lineno, const auto& row) {
        SizeRecord rec;
        rec.year = require_year(lineno, row[0]);
        rec.country = require_code(lineno, row[1], "country");
        const auto gdp = text::parse_double(row[2]);
        if (!gdp)
            throw DataError(line_error(lineno, "malformed gdp '" + std::string(row[2]) + "'"));
        if (*gdp <= 0.0)
            throw DataError(line_error(lineno, "nonpositive gdp for " + rec.country));
        rec.gdp = *gdp;
        if (!seen.emplace(rec.year, rec.country).second)
            throw DataError(line_error(lineno, "duplicate gdp for " + rec.country + " in " + std::to_string(rec.year)));
        out.push_back(std::move(rec));
    });
    return out;
}

PanelDataset assemble_panel(std::vector<FlowRecord> flows, std::vector<SizeRecord> sizes) {
    if (flows.empty())
        throw DataError("no flow records");

    std::vector<std::string> codes;
    std::set<int> years;
    for (const auto& f : flows) {
        codes.push_back(f.exporter);
        codes.push_back(f.importer);
        years.insert(f.year);
    }
    for (const auto& s : sizes) {
        codes.push_back(s.country);
        years.insert(s.year);
    }

    PanelDataset panel;
    panel.registry_ = CountryRegistry(std::move(codes));
    panel.years_.assign(years.begin(), years.end());

    // Re-check uniqueness: the record lists may not come from one parse.
    std::set<std::tuple<int, std::string, std::string>> seen_flows;
    for (auto& f : flows) {
        if (!seen_flows.emplace(f.year, f.exporter, f.importer).second)
            throw DataError("duplicate flow " + f.exporter + "->" + f.importer + " in " + std::to_string(f.year));
        panel.flows_[f.year].push_back(std::move(f));
    }
    std::set<std::pair<int, std::string>> seen_sizes;
    for (auto& s : sizes) {
        if (!seen_sizes.emplace(s.year, s.country).second)
            throw DataError("duplicate gdp for " + s.country + " in " + std::to_string(s.year));
        panel.sizes_[s.year].push_back(std::move(s));
    }

    for (auto& [year, list] : panel.flows_)
        std::sort(list.begin(), list.end(), [](const FlowRecord& a, const FlowRecord& b) {
            return std::tie(a.exporter, a.importer) < std::tie(b.exporter, b.importer);
        });
    for (auto& [year, list] : panel.sizes_)
        std::sort(list.begin(), list.end(),
                  [](const SizeRecord& a, const SizeRecord& b) { return a.country < b.country; });

    for (const auto& [year, list] : panel.flows_) {
        std::set<std::string> with_gdp;
        if (const auto it = panel.sizes_.find(year); it != panel.sizes_.end())
            for (const auto& s : it->second)
                with_gdp.insert(s.country);
        std::set<std::string> flagged;
        for (const auto& f : list) {
            if (!with_gdp.contains(f.exporter) && flagged.insert(f.exporter).second)
                panel.warnings_.push_back({year, f.exporter, "exports without a gdp record"});
        }
    }
    return panel;
}

bool PanelDataset::has_year(int year) const {
    return std::binary_search(years_.begin(), years_.end(), year);
}

const std::vector<FlowRecord>& PanelDataset::flows(int year) const {
    static const std::vector<FlowRecord> none;
    const auto it = flows_.find(year);
    return it == flows_.end() ? none : it->second;
}

const std::vector<SizeRecord>& PanelDataset::sizes(int year) const {
    static const std::vector<SizeRecord> none;
    const auto it = sizes_.find(year);
    return it == sizes_.end() ? none : it->second;
}

std::vector<std::optional<double>> PanelDataset::gdp(int year) const {
    std::vector<std::optional<double>> out(registry_.size());
    for (const auto& s : sizes(year))
        out[registry_.index(s.country)] = s.gdp;
    return out;
}

std::vector<FlowRecord> PanelDataset::all_flows() const {
    std::vector<FlowRecord> out;
    for (const auto& [year, list] : flows_)
        out.insert(out.end(), list.begin(), list.end());
    return out;
}

std::vector<SizeRecord> PanelDataset::all_sizes() const {
    std::vector<SizeRecord> out;
    for (const auto& [year, list] : sizes_)
        out.insert(out.end(), list.begin(), list.end());
    return out;
}

void write_flows(std::ostream& out, const std::vector<FlowRecord>& flows) {
    out << "year,exporter,importer,value\n";
    for (const auto& f : flows)
        out << f.year << ',' << f.exporter << ',' << f.importer << ',' << text::format_g17(f.value) << '\n';
}

void write_sizes(std::ostream& out, const std::vector<SizeRecord>& sizes) {
    out << "year,country,gdp\n";
    for (const auto& s : sizes)
        out << s.year << ',' << s.country << ',' << text::format_g17(s.gdp) << '\n';
}

PanelDataset load_panel(const std::string& flow_path, const std::optional<std::string>& gdp_path) {
    std::ifstream flow_in(flow_path);
    if (!flow_in)
        throw DataError("cannot open flow file " + flow_path);
    std::vector<FlowRecord> flows;
    try {
        flows = parse_flows(flow_in);
    } catch (const DataError& e) {
        throw DataError(flow_path + ": " + e.what());
    }

    std::vector<SizeRecord> sizes;
    if (gdp_path) {
        std::ifstream gdp_in(*gdp_path);
        if (!gdp_in)
            throw DataError("cannot open gdp file " + *gdp_path);
        try {
            sizes = parse_sizes(gdp_in);
        } catch (const DataError& e) {
            throw DataError(*gdp_path + ": " + e.what());
        }
    }
    return assemble_panel(std::move(flows), std::move(sizes));
}

} // namespace wnet
